#pragma once

#include <cmath>
#include <cstdint>

#include "logpair/exp_sum.hpp"
#include "logpair/model_kernel.hpp"

namespace logpair {

/// Flat-cylinder Gaussian model for the neck: the measure e^{-a^2 u^2/(2k)} du dt
/// on C*, valid for (k, a) in Case III.
struct CylinderParams {
  double k;
  std::int64_t a;
  CylinderParams(double k_, std::int64_t a_) : k(k_), a(a_) {
    if (a < 1) throw std::invalid_argument("CylinderParams: a must be >= 1");
    if (classify_regime(k, static_cast<double>(a)) != Regime::CaseIII)
      throw std::invalid_argument("CylinderParams: (k, a) not in Case III");
  }
  double period() const { return k / (static_cast<double>(a) * static_cast<double>(a)); }
};

/// ||z^c||^2 = e^{k c^2 / (2 a^2)}; every integer c is admissible on C*.
inline LogReal cylinder_norm_sq(const CylinderParams& p, std::int64_t c) {
  const double cd = static_cast<double>(c);
  const double ad = static_cast<double>(p.a);
  return LogReal::from_log(p.k * cd * cd / (2.0 * ad * ad));
}

/// Bergman kernel of the model: rho(u) = sum_c e^{-(a^2/2k)(u - k c/a^2)^2},
/// a Gaussian comb, periodic under u -> u + k/a^2 by index shift and even in u
/// (exactly: the sum is evaluated at |u|).
inline LogReal cylinder_rho(const CylinderParams& p, double u) {
  const double ad = static_cast<double>(p.a);
  const double coeff = ad * ad / (2.0 * p.k);
  const double period = p.period();
  u = std::fabs(u);
  const std::int64_t hint = static_cast<std::int64_t>(std::llround(u / period));
  const SumMoments m = windowed_sum_moments(
      std::numeric_limits<std::int64_t>::min() / 4, std::numeric_limits<std::int64_t>::max() / 4,
      hint, [=](std::int64_t c) {
        const double d = u - static_cast<double>(c) * period;
        return -coeff * d * d;
      });
  return LogReal::from_log(m.log_sum);
}

/// Sup over one comb period of |rho_cyl(u) / rho_{k,0}(t_c + u) - 1| with the
/// scale fixed by matching at u = 0 and the annulus centered on the circle
/// log(1/|z|^2) = (k-2)/a.
inline double cylinder_model_deviation(const CylinderParams& p, int samples = 81) {
  const ModelLevel level(p.k);
  const double t_c = (p.k - 2.0) / static_cast<double>(p.a);
  const double norm = rho_k0(level, t_c).rho.logmag - cylinder_rho(p, 0.0).logmag;
  const double half = 0.5 * p.period();
  double sup = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double u = -half + 2.0 * half * i / (samples - 1);
    const double ratio_log =
        cylinder_rho(p, u).logmag + norm - rho_k0(level, t_c + u).rho.logmag;
    sup = std::max(sup, std::fabs(std::expm1(ratio_log)));
  }
  return sup;
}

}  // namespace logpair
