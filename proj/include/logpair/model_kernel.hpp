#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "logpair/exp_sum.hpp"
#include "logpair/log_real.hpp"
#include "logpair/quadrature.hpp"

namespace logpair {

/// Tensor power of the Bergman space H_{k,0} on the punctured disk. Real
/// valued: the global estimator rescales the level by the curvature, so k is
/// not restricted to integers.
///
/// Convention: level k always refers to H_{k,0} itself. Monomial norms carry
/// (k-2)! and a^{k-1}; the phi/psi series attached to this level therefore use
/// the exponent k-1. The series helpers phi_k/psi_k below take that exponent
/// directly, matching the variable the two-term ladder estimates are stated in.
struct ModelLevel {
  double k;
  explicit ModelLevel(double level) : k(level) {
    if (!(k >= 8.0)) throw std::invalid_argument("ModelLevel: k must be >= 8");
  }
  double phi_exponent() const { return k - 1.0; }
};

enum class Regime { CaseI, CaseII, CaseIII };

/// CaseI: a >= sqrt(k) log k. CaseIII: sqrt(k)/log k <= a < sqrt(k) log k.
/// CaseII: below that. Sharp cutoffs; in the II/III overlap both mu routes
/// remain valid and are cross-checked against each other.
inline Regime classify_regime(double k, double a) {
  const double s = std::sqrt(k);
  const double lg = std::log(k);
  if (a >= s * lg) return Regime::CaseI;
  if (a >= s / lg) return Regime::CaseIII;
  return Regime::CaseII;
}

inline const char* regime_name(Regime r) {
  switch (r) {
    case Regime::CaseI: return "I";
    case Regime::CaseII: return "II";
    case Regime::CaseIII: return "III";
  }
  return "?";
}

struct RegimeIndex {
  ModelLevel level;
  std::int64_t a;
  Regime regime;
};

inline RegimeIndex make_regime_index(ModelLevel level, std::int64_t a) {
  if (a < 1) throw std::invalid_argument("RegimeIndex: a must be >= 1");
  return RegimeIndex{level, a, classify_regime(level.k, static_cast<double>(a))};
}

// ---------------------------------------------------------------------------
// phi/psi series in the t = log(1/x) coordinate, x = |z|^2.
// phi(x) = sum_{a>=1} a^kexp x^{a-1}. The index distribution's variance gives
// psi through psi = phi^2 * Var(a) / x, which avoids the catastrophic
// cancellation of forming phi*Lap(phi) - |phi'|^2 directly.
// ---------------------------------------------------------------------------

inline SumMoments phi_series_moments(double kexp, double t, double cutoff = 50.0) {
  if (!(t > 0.0)) throw std::invalid_argument("phi series: t must be > 0");
  const double hint_d = std::min(std::max(1.0, kexp / t), 1e18);
  const std::int64_t hint = static_cast<std::int64_t>(std::llround(hint_d));
  return windowed_sum_moments(
      1, std::numeric_limits<std::int64_t>::max() / 4, hint,
      [=](std::int64_t a) { return kexp * std::log(static_cast<double>(a)) - static_cast<double>(a - 1) * t; },
      cutoff);
}

inline LogReal phi_k(double kexp, double t) {
  return LogReal::from_log(phi_series_moments(kexp, t).log_sum);
}

inline LogReal psi_k(double kexp, double t) {
  SumMoments m = phi_series_moments(kexp, t);
  if (m.var <= 0.0) {
    // Deep in the cusp the neighbor of the dominant term falls out of the
    // default window, yet it carries all of psi. Re-open the window far
    // enough for either a peak at a = 1 (gap t - k log 2) or an interior
    // peak (gap t^2/2k <= 0.55 t).
    const double gap = std::max(std::fabs(t - kexp * std::log(2.0)), 0.55 * t) + 35.0;
    if (gap < 700.0) m = phi_series_moments(kexp, t, gap);
    // Beyond double range psi has flattened onto its x -> 0 limit 2^kexp.
    if (m.var <= 0.0) return LogReal::from_log(kexp * std::log(2.0));
  }
  return LogReal::from_log(2.0 * m.log_sum + std::log(m.var) + t);
}

// ---------------------------------------------------------------------------
// Monomial norms and mass concentration.
// ---------------------------------------------------------------------------

/// ||z^a||_k^2 = 2 pi (k-2)! / a^{k-1}, via log-Gamma. Only a >= 1 is
/// integrable against the cusp weight. Valid for any k > 2; the regime
/// machinery is not involved here.
inline LogReal monomial_norm_sq(double k, std::int64_t a) {
  if (a < 1) throw std::invalid_argument("monomial_norm_sq: a must be >= 1 (z^a not integrable)");
  if (!(k > 2.0)) throw std::invalid_argument("monomial_norm_sq: k must be > 2");
  const double lg = std::lgamma(k - 1.0);
  return LogReal::from_log(std::log(2.0 * std::numbers::pi) + lg -
                           (k - 1.0) * std::log(static_cast<double>(a)));
}
inline LogReal monomial_norm_sq(ModelLevel level, std::int64_t a) {
  return monomial_norm_sq(level.k, a);
}

/// Same quantity by radial quadrature of 2 pi Int t^{k-2} e^{-a t} dt.
inline LogReal monomial_norm_sq_by_quadrature(double k, std::int64_t a,
                                              QuadratureSpec spec = {}) {
  if (a < 1) throw std::invalid_argument("monomial_norm_sq_by_quadrature: a must be >= 1");
  if (!(k > 2.0)) throw std::invalid_argument("monomial_norm_sq_by_quadrature: k must be > 2");
  spec.lo = 0.0;
  spec.hi = std::numeric_limits<double>::infinity();
  auto f = [&](double t) -> LogReal {
    if (t <= 0.0) return LogReal::zero();
    return LogReal::from_log((k - 2.0) * std::log(t) - static_cast<double>(a) * t);
  };
  return integrate_adaptive(f, spec) * LogReal::from_log(std::log(2.0 * std::numbers::pi));
}
inline LogReal monomial_norm_sq_by_quadrature(ModelLevel level, std::int64_t a,
                                              QuadratureSpec spec = {}) {
  return monomial_norm_sq_by_quadrature(level.k, a, spec);
}

/// <z^a, z^b>_k. Vanishes identically for a != b by the angular symmetry of
/// the radial reduction; no 2-D integral is ever formed.
inline LogReal inner_product(double k, std::int64_t a, std::int64_t b) {
  if (a < 1 || b < 1) throw std::invalid_argument("inner_product: indices must be >= 1");
  if (a != b) return LogReal::zero();
  return monomial_norm_sq(k, a);
}

/// Fraction of the mass of t^{k-2} e^{-a t} inside the window
/// |t - (k-2)/a| <= half_width. Defaults to the sqrt(k) log k / a window.
/// Computed as head + window + tail so the ratio is exactly <= 1, and exactly
/// 1 once the window covers the whole domain.
inline double concentration_ratio(double k, std::int64_t a,
                                  double half_width = std::numeric_limits<double>::quiet_NaN()) {
  if (a < 1) throw std::invalid_argument("concentration_ratio: a must be >= 1");
  if (!(k > 2.0)) throw std::invalid_argument("concentration_ratio: k must be > 2");
  if (std::isnan(half_width)) half_width = std::sqrt(k) * std::log(k) / static_cast<double>(a);
  const double t0 = (k - 2.0) / static_cast<double>(a);
  const double lo = std::max(0.0, t0 - half_width);
  const double hi = t0 + half_width;
  auto f = [&](double t) -> LogReal {
    if (t <= 0.0) return LogReal::zero();
    return LogReal::from_log((k - 2.0) * std::log(t) - static_cast<double>(a) * t);
  };
  QuadratureSpec spec;
  spec.lo = lo;
  spec.hi = hi;
  const LogReal window = std::isinf(hi)
                             ? integrate_adaptive(f, spec)
                             : detail::integrate_finite(f, lo, hi, spec);
  QuadratureSpec head_spec;
  head_spec.lo = 0.0;
  head_spec.hi = lo;
  const LogReal head = detail::integrate_finite(f, 0.0, lo, head_spec);
  LogReal tail = LogReal::zero();
  if (!std::isinf(hi)) {
    QuadratureSpec tail_spec;
    tail_spec.lo = hi;
    tail = integrate_adaptive(f, tail_spec);
  }
  const LogReal total = head + window + tail;
  if (window.is_zero()) return 0.0;
  return std::exp(window.logmag - total.logmag);
}
inline double concentration_ratio(ModelLevel level, std::int64_t a,
                                  double half_width = std::numeric_limits<double>::quiet_NaN()) {
  return concentration_ratio(level.k, a, half_width);
}

// ---------------------------------------------------------------------------
// Bergman kernel and Fubini-Study density of the model.
// ---------------------------------------------------------------------------

/// rho_{k,0} and the density of omega_{k,0} against i dz d(z bar), both as
/// functions of t = log(1/|z|^2).
struct KernelValue {
  LogReal rho;
  LogReal omega_density;
};

inline KernelValue rho_k0(ModelLevel level, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("rho_k0: t must be > 0");
  const double k = level.k;
  const double kexp = level.phi_exponent();
  const SumMoments m = phi_series_moments(kexp, t);
  KernelValue out;
  // rho = t^k / (2 pi (k-2)!) * sum a^{k-1} x^a, and sum a^{k-1} x^a = x*phi.
  out.rho = LogReal::from_log(k * std::log(t) - std::log(2.0 * std::numbers::pi) -
                              std::lgamma(k - 1.0) - t + m.log_sum);
  // omega density = (1/2pi) psi/phi^2 = (1/2pi) Var(a) e^t.
  out.omega_density = m.var > 0.0
                          ? LogReal::from_log(std::log(m.var) + t - std::log(2.0 * std::numbers::pi))
                          : LogReal::zero();
  return out;
}

/// Fubini-Study mass of the annulus t in [t1, t2]: Int psi/phi^2 dx reduced to
/// Int Var(a)(t) dt.
inline double omega_mass(ModelLevel level, double t1, double t2, QuadratureSpec spec = {}) {
  const double kexp = level.phi_exponent();
  auto f = [&](double t) -> LogReal {
    const SumMoments m = phi_series_moments(kexp, t);
    return m.var > 0.0 ? LogReal::from_log(std::log(m.var)) : LogReal::zero();
  };
  spec.lo = t1;
  spec.hi = t2;
  return integrate_adaptive(f, spec).to_real();
}

/// FS mass of the cusp region t >= sqrt(k)/log k.
inline double volume_near_cusp(ModelLevel level) {
  if (!(level.k >= 50.0)) throw std::invalid_argument("volume_near_cusp: requires k >= 50");
  const double threshold = std::sqrt(level.k) / std::log(level.k);
  return omega_mass(level, threshold, std::numeric_limits<double>::infinity());
}

// ---------------------------------------------------------------------------
// Center-of-mass integrals mu_a, direct series route.
// ---------------------------------------------------------------------------

namespace detail {

inline double mu_integrand_log(double kexp, std::int64_t a, double t) {
  const SumMoments m = phi_series_moments(kexp, t);
  if (m.var <= 0.0) return -std::numeric_limits<double>::infinity();
  return kexp * std::log(static_cast<double>(a)) - static_cast<double>(a - 1) * t - m.log_sum +
         std::log(m.var);
}

// Bracket the support of the mu_a integrand by scanning log-spaced t values
// and keeping everything within e^-46 of the maximum.
inline std::pair<double, double> mu_bracket(double kexp, std::int64_t a) {
  const double t0 = kexp / static_cast<double>(a);
  const int n = 400;
  const double lo = t0 * 0.02, hi = t0 * 10.0;
  const double step = std::log(hi / lo) / (n - 1);
  double best = -std::numeric_limits<double>::infinity();
  std::vector<double> logs(n);
  for (int i = 0; i < n; ++i) {
    const double t = lo * std::exp(step * i);
    logs[i] = mu_integrand_log(kexp, a, t);
    best = std::max(best, logs[i]);
  }
  int ilo = 0, ihi = n - 1;
  while (ilo < n - 1 && logs[ilo] < best - 46.0) ++ilo;
  while (ihi > 0 && logs[ihi] < best - 46.0) --ihi;
  double tlo = lo * std::exp(step * std::max(0, ilo - 1));
  double thi = lo * std::exp(step * std::min(n - 1, ihi + 1));
  // Edges must sit below threshold; widen if the scan window was too tight.
  for (int i = 0; i < 60 && mu_integrand_log(kexp, a, tlo) > best - 46.0; ++i) tlo *= 0.5;
  for (int i = 0; i < 60 && mu_integrand_log(kexp, a, thi) > best - 46.0; ++i) thi *= 1.5;
  return {tlo, thi};
}

}  // namespace detail

/// mu_a at the given level: Int_0^infty a^{k-1} e^{-a t} psi/phi^3 dt with the
/// series evaluated pointwise. O(1) result, so it exits log space at the end.
inline double mu_direct(ModelLevel level, std::int64_t a, QuadratureSpec spec = {}) {
  if (a < 1) throw std::invalid_argument("mu_direct: a must be >= 1");
  const double kexp = level.phi_exponent();
  const auto [tlo, thi] = detail::mu_bracket(kexp, a);
  auto f = [&](double t) -> LogReal {
    return LogReal::from_log(detail::mu_integrand_log(kexp, a, t));
  };
  spec.lo = tlo;
  spec.hi = thi;
  return integrate_adaptive(f, spec).to_real();
}

/// Contribution to mu_a from the annulus t in [t1, t2] (for the mass-balance
/// identity sum_a mu-integrand = psi/phi^2).
inline double mu_partial(ModelLevel level, std::int64_t a, double t1, double t2,
                         QuadratureSpec spec = {}) {
  const double kexp = level.phi_exponent();
  auto f = [&](double t) -> LogReal {
    return LogReal::from_log(detail::mu_integrand_log(kexp, a, t));
  };
  spec.lo = t1;
  spec.hi = t2;
  return integrate_adaptive(f, spec).to_real();
}

}  // namespace logpair
