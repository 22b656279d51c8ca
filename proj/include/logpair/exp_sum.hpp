#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include "logpair/errors.hpp"

namespace logpair {

/// Log of a positive sum together with the first two moments of its index
/// distribution. mean/var refer to the integer summation index weighted by the
/// terms themselves; the variance is accumulated centered on the peak index so
/// it stays accurate even when the mean is large.
struct SumMoments {
  double log_sum = -std::numeric_limits<double>::infinity();
  double mean = 0.0;
  double var = 0.0;
};

/// Sum a log-concave sequence of positive terms given by log_term(i) over
/// [lo, hi], visiting only a window around the peak. Terms are dropped once
/// they fall below exp(-cutoff) of the maximum; the default window is twice as
/// deep as the 1e-18 relative cutoff the callers rely on, and tests verify
/// that doubling it further changes nothing at double precision.
template <class F>
SumMoments windowed_sum_moments(std::int64_t lo, std::int64_t hi, std::int64_t peak_hint,
                                F&& log_term, double cutoff = 50.0) {
  if (lo > hi) return SumMoments{};
  std::int64_t p = std::clamp(peak_hint, lo, hi);

  // Hill-climb to the local (= global, by log-concavity) maximum.
  const std::int64_t climb_cap = 100000000;
  std::int64_t steps = 0;
  while (p + 1 <= hi && log_term(p + 1) > log_term(p)) {
    ++p;
    if (++steps > climb_cap) throw NonConvergence("windowed_sum_moments: runaway climb");
  }
  while (p - 1 >= lo && log_term(p - 1) > log_term(p)) {
    --p;
    if (++steps > climb_cap) throw NonConvergence("windowed_sum_moments: runaway climb");
  }

  const double lmax = log_term(p);
  double s0 = 1.0, s1 = 0.0, s2 = 0.0;
  for (std::int64_t i = p + 1; i <= hi; ++i) {
    const double lt = log_term(i) - lmax;
    if (lt < -cutoff) break;
    const double w = std::exp(lt);
    const double d = static_cast<double>(i - p);
    s0 += w;
    s1 += w * d;
    s2 += w * d * d;
    if (i - p > climb_cap) throw NonConvergence("windowed_sum_moments: runaway window");
  }
  for (std::int64_t i = p - 1; i >= lo; --i) {
    const double lt = log_term(i) - lmax;
    if (lt < -cutoff) break;
    const double w = std::exp(lt);
    const double d = static_cast<double>(i - p);
    s0 += w;
    s1 += w * d;
    s2 += w * d * d;
    if (p - i > climb_cap) throw NonConvergence("windowed_sum_moments: runaway window");
  }

  SumMoments out;
  out.log_sum = lmax + std::log(s0);
  const double m = s1 / s0;
  out.mean = static_cast<double>(p) + m;
  out.var = std::max(0.0, s2 / s0 - m * m);
  return out;
}

}  // namespace logpair
