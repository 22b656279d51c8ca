#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "logpair/errors.hpp"
#include "logpair/log_real.hpp"

namespace logpair {

/// Tolerances and domain for adaptive integration. `hi` may be +infinity, in
/// which case the tail is truncated where the integrand falls below
/// rel_tol * 1e-3 of its running maximum and the cut is verified by doubling.
struct QuadratureSpec {
  double abs_tol = 1e-300;  // log-space work makes very small absolute floors meaningful
  double rel_tol = 1e-10;
  int max_depth = 60;
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();

  void validate() const {
    if (!(abs_tol > 0.0)) throw std::invalid_argument("QuadratureSpec: abs_tol must be > 0");
    if (!(rel_tol > 0.0)) throw std::invalid_argument("QuadratureSpec: rel_tol must be > 0");
    if (max_depth < 1) throw std::invalid_argument("QuadratureSpec: max_depth must be >= 1");
    if (std::isnan(lo) || std::isnan(hi)) throw std::invalid_argument("QuadratureSpec: bad domain");
  }
};

using LogIntegrand = std::function<LogReal(double)>;

namespace detail {

// Gauss-Kronrod 15(7) on [-1,1]. Kronrod weights are all positive, so panel
// sums stay sign-stable under log-space accumulation.
inline constexpr double kGK15Nodes[15] = {
    -0.99145537112081263920685469752633, -0.94910791234275852452618968404785,
    -0.86486442335976907278971278864093, -0.74153118559939443986386477328079,
    -0.58608723546769113029414483825873, -0.40584515137739716690660641207696,
    -0.20778495500789846760068940377324, 0.0,
    0.20778495500789846760068940377324,  0.40584515137739716690660641207696,
    0.58608723546769113029414483825873,  0.74153118559939443986386477328079,
    0.86486442335976907278971278864093,  0.94910791234275852452618968404785,
    0.99145537112081263920685469752633};

inline constexpr double kK15Weights[15] = {
    0.02293532201052922496373200805897, 0.06309209262997855329070066318920,
    0.10479001032225018383987632254152, 0.14065325971552591874518959051024,
    0.16900472663926790282658342659855, 0.19035057806478540991325640242101,
    0.20443294007529889241416199923465, 0.20948214108472782801299917489171,
    0.20443294007529889241416199923465, 0.19035057806478540991325640242101,
    0.16900472663926790282658342659855, 0.14065325971552591874518959051024,
    0.10479001032225018383987632254152, 0.06309209262997855329070066318920,
    0.02293532201052922496373200805897};

// Embedded 7-point Gauss rule lives on the odd Kronrod nodes.
inline constexpr double kG7Weights[7] = {
    0.12948496616886969327061143267908, 0.27970539148927666790146777142378,
    0.38183005050511894495036977548898, 0.41795918367346938775510204081633,
    0.38183005050511894495036977548898, 0.27970539148927666790146777142378,
    0.12948496616886969327061143267908};

struct Panel {
  double lo, hi;
  int depth;
  LogReal integral;
  LogReal error;
};

template <class F>
Panel evaluate_panel(F&& f, double lo, double hi, int depth) {
  const double h = 0.5 * (hi - lo);
  const double c = 0.5 * (hi + lo);
  const double log_h = std::log(h);
  LogReal k_terms[15];
  LogReal g_terms[7];
  for (int i = 0; i < 15; ++i) {
    const LogReal fx = f(c + h * kGK15Nodes[i]);
    k_terms[i] = fx * LogReal::from_log(log_h + std::log(kK15Weights[i]));
    if (i % 2 == 1) g_terms[i / 2] = fx * LogReal::from_log(log_h + std::log(kG7Weights[i / 2]));
  }
  const LogReal k15 = log_sum_exp(std::span<const LogReal>(k_terms, 15));
  const LogReal g7 = log_sum_exp(std::span<const LogReal>(g_terms, 7));
  return Panel{lo, hi, depth, k15, (k15 - g7).abs()};
}

template <class F>
LogReal integrate_finite(F&& f, double lo, double hi, const QuadratureSpec& spec) {
  if (!(lo < hi)) return LogReal::zero();
  std::vector<Panel> panels;
  panels.push_back(evaluate_panel(f, lo, hi, 0));

  const double log_abs = std::log(spec.abs_tol);
  const double log_rel = std::log(spec.rel_tol);
  const std::size_t panel_cap = 40000;

  while (true) {
    std::vector<LogReal> ints, errs;
    ints.reserve(panels.size());
    errs.reserve(panels.size());
    for (const auto& p : panels) {
      ints.push_back(p.integral);
      errs.push_back(p.error);
    }
    const LogReal total = log_sum_exp(ints);
    const LogReal total_err = log_sum_exp(errs);

    double bound = log_abs;
    if (!total.is_zero()) bound = std::max(bound, log_rel + total.logmag);
    if (total_err.is_zero() || total_err.logmag <= bound) return total;

    std::size_t worst = 0;
    double worst_err = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < panels.size(); ++i) {
      if (panels[i].error.sign != 0 && panels[i].error.logmag > worst_err) {
        worst_err = panels[i].error.logmag;
        worst = i;
      }
    }
    const Panel bad = panels[worst];
    if (bad.depth >= spec.max_depth || panels.size() >= panel_cap)
      throw NonConvergence("integrate_adaptive: error " + std::to_string(total_err.logmag) +
                           " (log) above tolerance with depth exhausted on [" +
                           std::to_string(bad.lo) + ", " + std::to_string(bad.hi) + "]");
    const double mid = 0.5 * (bad.lo + bad.hi);
    panels[worst] = evaluate_panel(f, bad.lo, mid, bad.depth + 1);
    panels.push_back(evaluate_panel(f, mid, bad.hi, bad.depth + 1));
  }
}

// Pick a finite truncation point for a decaying tail: walk geometrically until
// the integrand drops below rel_tol*1e-3 of the running maximum.
template <class F>
double truncate_tail(F&& f, double lo, double rel_tol) {
  double max_log = -std::numeric_limits<double>::infinity();
  double step = 1.0;
  double t = lo + step;
  const double drop = std::log(rel_tol) + std::log(1e-3);
  for (int i = 0; i < 4000; ++i) {
    const LogReal v = f(t);
    if (v.sign != 0) max_log = std::max(max_log, v.logmag);
    const bool below = v.is_zero() || (std::isfinite(max_log) && v.logmag < max_log + drop);
    if (below && std::isfinite(max_log)) return t;
    if (below && i > 60) return t;  // integrand identically ~0 so far
    step *= 1.5;
    t = lo + step;
    if (!std::isfinite(t)) break;
  }
  throw NonConvergence("integrate_adaptive: could not truncate semi-infinite tail");
}

}  // namespace detail

/// Adaptive Gauss-Kronrod integration of a (possibly astronomically scaled)
/// integrand supplied in log form. Subdivision is error-driven bisection with
/// fixed-order nodes per panel; throws NonConvergence when max_depth is
/// exhausted with the error estimate still above tolerance.
template <class F>
LogReal integrate_adaptive(F&& f, const QuadratureSpec& spec) {
  spec.validate();
  if (std::isinf(spec.hi)) {
    double t = detail::truncate_tail(f, spec.lo, spec.rel_tol);
    LogReal result = detail::integrate_finite(f, spec.lo, t, spec);
    // Verify the cut by doubling: extend while the next block still matters.
    for (int i = 0; i < 64; ++i) {
      const double t2 = 2.0 * t - spec.lo;
      QuadratureSpec tail_spec = spec;
      tail_spec.rel_tol = std::max(spec.rel_tol, 1e-6);
      const LogReal tail = detail::integrate_finite(f, t, t2, tail_spec);
      if (tail.is_zero() ||
          (!result.is_zero() && tail.logmag < result.logmag + std::log(spec.rel_tol) - 1.0)) {
        return result;
      }
      result = result + tail;
      t = t2;
    }
    throw NonConvergence("integrate_adaptive: tail did not settle under doubling");
  }
  return detail::integrate_finite(f, spec.lo, spec.hi, spec);
}

inline LogReal integrate_adaptive(const LogIntegrand& f, const QuadratureSpec& spec) {
  return integrate_adaptive<const LogIntegrand&>(f, spec);
}

}  // namespace logpair
