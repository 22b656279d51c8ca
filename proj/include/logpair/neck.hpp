#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "logpair/exp_sum.hpp"
#include "logpair/model_kernel.hpp"
#include "logpair/quadrature.hpp"

namespace logpair {

// Case III machinery: on the neck the section z^a concentrates around the
// circle log(1/|z|^2) = k/a, and in the centered coordinate u the normalized
// series becomes f_a(u) = sum_{c >= -a+1} e^{k(log(1+c/a) - c/a)} e^{-c u}.

namespace detail {

inline std::int64_t neck_peak_hint(double k, double a, double u) {
  // Stationary term of k(log(1+c/a) - c/a) - c u.
  const double c0 = -a * a * u / (k + a * u);
  return static_cast<std::int64_t>(std::llround(c0));
}

}  // namespace detail

/// Moments of the f_a term distribution: log f, E[c], Var[c]. Then
/// f' = -f E[c] and f'' = f (Var + E^2), which is how the u-integrals are
/// evaluated without forming differences of huge sums.
inline SumMoments neck_moments(double k, std::int64_t a, double u, double cutoff = 50.0) {
  const double ad = static_cast<double>(a);
  if (!(k + ad * u > 0.0)) throw std::invalid_argument("neck_moments: u below -k/a");
  return windowed_sum_moments(
      -a + 1, std::numeric_limits<std::int64_t>::max() / 4, detail::neck_peak_hint(k, ad, u),
      [=](std::int64_t c) {
        const double cd = static_cast<double>(c);
        return k * (std::log1p(cd / ad) - cd / ad) - cd * u;
      },
      cutoff);
}

/// Gaussian-comb moments for h_a(u) = sum_c e^{-k c^2/(2a^2)} e^{-c u}, with
/// the quadratic coefficient b = k/(2 a^2).
inline SumMoments gaussian_comb_moments(double b, double u, double cutoff = 60.0) {
  if (!(b > 0.0)) throw std::invalid_argument("gaussian_comb_moments: b must be > 0");
  const std::int64_t hint = static_cast<std::int64_t>(std::llround(-u / (2.0 * b)));
  return windowed_sum_moments(
      std::numeric_limits<std::int64_t>::min() / 4, std::numeric_limits<std::int64_t>::max() / 4,
      hint, [=](std::int64_t c) {
        const double cd = static_cast<double>(c);
        return -b * cd * cd - cd * u;
      },
      cutoff);
}

struct NeckFunctions {
  LogReal f;    // f_a(u)
  LogReal fdd;  // d^2 f / du^2, termwise c^2 weights (nonnegative)
  LogReal g;    // truncation of f to |c| <= (log k)^5
  LogReal h;    // Gaussian comb with the same k c^2/(2a^2) exponent
};

/// f_a, f_a'', the truncated g_a and the Gaussian h_a at a neck index.
/// Requires (k, a) in Case III and |u| <= 2 (log k)^2.
inline NeckFunctions neck_functions(ModelLevel level, std::int64_t a, double u) {
  const double k = level.k;
  const double ad = static_cast<double>(a);
  if (classify_regime(k, ad) != Regime::CaseIII)
    throw std::invalid_argument("neck_functions: (k, a) not in Case III");
  const double lk2 = std::log(k) * std::log(k);
  if (!(std::fabs(u) <= 2.0 * lk2))
    throw std::invalid_argument("neck_functions: |u| beyond 2 (log k)^2");

  NeckFunctions out;
  const SumMoments mf = neck_moments(k, a, u);
  out.f = LogReal::from_log(mf.log_sum);
  const double second = mf.var + mf.mean * mf.mean;
  out.fdd = second > 0.0 ? LogReal::from_log(mf.log_sum + std::log(second)) : LogReal::zero();

  const double cap = std::pow(std::log(k), 5.0);
  const std::int64_t c_cap = static_cast<std::int64_t>(std::floor(cap));
  const SumMoments mg = windowed_sum_moments(
      std::max<std::int64_t>(-a + 1, -c_cap), c_cap, detail::neck_peak_hint(k, ad, u),
      [=](std::int64_t c) {
        const double cd = static_cast<double>(c);
        return k * (std::log1p(cd / ad) - cd / ad) - cd * u;
      });
  out.g = LogReal::from_log(mg.log_sum);

  const SumMoments mh = gaussian_comb_moments(k / (2.0 * ad * ad), u);
  out.h = LogReal::from_log(mh.log_sum);
  return out;
}

/// mu_a through the neck route: Int (log f)'' / f du over |u| <= (log k)^2,
/// with (log f)'' = Var[c]. The u-domain is (-k/a, inf); within 10% of the
/// left endpoint f blows up like e^{O(k)} so the integrand carries no mass
/// there. The contribution beyond the window is measured once per call and
/// must stay below 1e-12 of the total.
inline double mu_neck(ModelLevel level, std::int64_t a, QuadratureSpec spec = {}) {
  const double k = level.k;
  const double ad = static_cast<double>(a);
  if (classify_regime(k, ad) != Regime::CaseIII)
    throw std::invalid_argument("mu_neck: (k, a) not in Case III");
  const double L = std::log(k) * std::log(k);
  const double lo_dom = -0.9 * k / ad;
  const double lo = std::max(-L, lo_dom);
  auto f = [&](double u) -> LogReal {
    const SumMoments m = neck_moments(k, a, u);
    if (m.var <= 0.0) return LogReal::zero();
    return LogReal::from_log(std::log(m.var) - m.log_sum);
  };
  QuadratureSpec sp = spec;
  sp.lo = lo;
  sp.hi = L;
  const double core = integrate_adaptive(f, sp).to_real();

  QuadratureSpec tail_sp = spec;
  tail_sp.rel_tol = 1e-6;
  tail_sp.lo = L;
  tail_sp.hi = L + 30.0;
  double tail = integrate_adaptive(f, tail_sp).to_real();
  if (lo == -L) {
    tail_sp.lo = std::max(-L - 30.0, lo_dom);
    tail_sp.hi = -L;
    tail += integrate_adaptive(f, tail_sp).to_real();
  }
  if (!(std::fabs(tail) <= 1e-12 * std::fabs(core)))
    throw NonConvergence("mu_neck: mass beyond the (log k)^2 window is not negligible");
  return core;
}

/// The two sides of the integration-by-parts identity
/// Int f''/f^2 = 2 Int (f')^2/f^3 (up to boundary terms) over the same window.
struct IbpCheck {
  double lhs;  // Int f''/f^2
  double rhs;  // 2 Int (f')^2/f^3
};

inline IbpCheck ibp_check(ModelLevel level, std::int64_t a, QuadratureSpec spec = {}) {
  const double k = level.k;
  const double L = std::log(k) * std::log(k);
  const double lo = std::max(-L, -0.9 * k / static_cast<double>(a));
  auto lhs_f = [&](double u) -> LogReal {
    const SumMoments m = neck_moments(k, a, u);
    const double second = m.var + m.mean * m.mean;
    if (second <= 0.0) return LogReal::zero();
    return LogReal::from_log(std::log(second) - m.log_sum);
  };
  auto rhs_f = [&](double u) -> LogReal {
    const SumMoments m = neck_moments(k, a, u);
    const double sq = m.mean * m.mean;
    if (sq <= 0.0) return LogReal::zero();
    return LogReal::from_log(std::log(sq) - m.log_sum);
  };
  QuadratureSpec sp = spec;
  sp.lo = lo;
  sp.hi = L;
  IbpCheck out;
  out.lhs = integrate_adaptive(lhs_f, sp).to_real();
  out.rhs = 2.0 * integrate_adaptive(rhs_f, sp).to_real();
  return out;
}

/// Int_{-inf}^{inf} h''/h^2 du for the Gaussian comb with quadratic
/// coefficient b; equals 2 for every b > 0.
inline double theta_identity(double b, QuadratureSpec spec = {}) {
  if (!(b > 0.0)) throw std::invalid_argument("theta_identity: b must be > 0");
  auto f = [&](double u) -> LogReal {
    const SumMoments m = gaussian_comb_moments(b, u);
    const double second = m.var + m.mean * m.mean;
    if (second <= 0.0) return LogReal::zero();
    return LogReal::from_log(std::log(second) - m.log_sum);
  };
  const double U = 2.0 * std::sqrt(b * 46.0) + 12.0;
  QuadratureSpec sp = spec;
  sp.rel_tol = std::min(spec.rel_tol, 1e-11);
  sp.lo = -U;
  sp.hi = U;
  return integrate_adaptive(f, sp).to_real();
}

}  // namespace logpair
