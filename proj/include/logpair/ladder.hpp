#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "logpair/errors.hpp"
#include "logpair/model_kernel.hpp"

namespace logpair {

// The interval system a_n = (n+1)/n, b_n = sqrt((n+2)/n): phi is two-term
// dominated on [a_n^-k, b_n^-k] and [b_n^-k, a_{n+1}^-k], psi on both. All
// bookkeeping lives in the t = log(1/x) coordinate, where the endpoints are
// t_a(n) = k log a_n and t_b(n) = (k/2) log((n+2)/n).

inline double ladder_t_a(double kexp, int n) {
  return kexp * std::log((n + 1.0) / n);
}
inline double ladder_t_b(double kexp, int n) {
  return 0.5 * kexp * std::log((n + 2.0) / n);
}

/// Largest n for which the two-term forms are trusted. The n^2 = o(k/log k)
/// validity range is realized with a decimal log so that the usable window at
/// desk-scale k covers the intervals the integral tables need.
inline int ladder_max_n(double kexp) {
  return static_cast<int>(std::floor(std::sqrt(kexp / (2.0 * std::log10(kexp)))));
}

struct LadderPartition {
  double kexp = 0.0;
  int n_max = 0;
  std::vector<double> t_breaks;  // t_a(1), t_b(1), t_a(2), t_b(2), ... strictly decreasing
};

inline LadderPartition ladder_partition(double kexp, int n_max = -1) {
  if (!(kexp >= 8.0)) throw std::invalid_argument("ladder_partition: exponent must be >= 8");
  const int cap = ladder_max_n(kexp);
  if (n_max < 0) n_max = cap;
  if (n_max < 1 || n_max > cap)
    throw std::invalid_argument("ladder_partition: n_max outside validity range");
  LadderPartition part;
  part.kexp = kexp;
  part.n_max = n_max;
  for (int n = 1; n <= n_max; ++n) {
    part.t_breaks.push_back(ladder_t_a(kexp, n));
    part.t_breaks.push_back(ladder_t_b(kexp, n));
  }
  return part;
}

struct LadderApprox {
  int n = 0;
  bool first_form = true;  // true: [a_n^-k, b_n^-k]; false: [b_n^-k, a_{n+1}^-k]
  LogReal phi;
  LogReal psi;
};

/// Two-term closed forms for phi and psi on the interval containing t.
/// x <= b_1^-k (including the deep-cusp head) uses the n = 1 first form, whose
/// two terms reduce to 1 + 2^k x and 2^k + 6^k x^2.
inline LadderApprox ladder_approx(double kexp, double t, const LadderPartition& part) {
  if (!(t > 0.0)) throw std::invalid_argument("ladder_approx: t must be > 0");
  int n = 0;
  bool first_form = true;
  if (t >= ladder_t_b(kexp, 1)) {
    n = 1;
  } else {
    for (n = 1;; ++n) {
      if (n > part.n_max)
        throw OutOfLadder("ladder_approx: t = " + std::to_string(t) +
                          " below interval n_max = " + std::to_string(part.n_max) +
                          "; use the full series");
      if (t >= ladder_t_a(kexp, n + 1) && t <= ladder_t_b(kexp, n)) {
        first_form = false;
        break;
      }
      if (t >= ladder_t_b(kexp, n + 1) && t <= ladder_t_a(kexp, n + 1)) {
        if (n + 1 > part.n_max)
          throw OutOfLadder("ladder_approx: t falls in interval n = " + std::to_string(n + 1) +
                            " beyond n_max = " + std::to_string(part.n_max));
        ++n;
        first_form = true;
        break;
      }
    }
  }

  const double ln_n = std::log(static_cast<double>(n));
  const double ln_n1 = std::log(n + 1.0);
  const double ln_n2 = std::log(n + 2.0);
  LadderApprox out;
  out.n = n;
  out.first_form = first_form;
  LogReal phi_terms[2];
  if (first_form) {
    phi_terms[0] = LogReal::from_log(kexp * ln_n - (n - 1.0) * t);
    phi_terms[1] = LogReal::from_log(kexp * ln_n1 - static_cast<double>(n) * t);
  } else {
    phi_terms[0] = LogReal::from_log(kexp * ln_n1 - static_cast<double>(n) * t);
    phi_terms[1] = LogReal::from_log(kexp * ln_n2 - (n + 1.0) * t);
  }
  out.phi = phi_terms[0] + phi_terms[1];
  const LogReal psi_lo = LogReal::from_log(kexp * (ln_n + ln_n1) - 2.0 * (n - 1.0) * t);
  const LogReal psi_hi = LogReal::from_log(kexp * (ln_n1 + ln_n2) - 2.0 * static_cast<double>(n) * t);
  out.psi = psi_lo + psi_hi;
  return out;
}

inline LadderApprox ladder_approx(double kexp, double t) {
  return ladder_approx(kexp, t, ladder_partition(kexp));
}

// ---------------------------------------------------------------------------
// Ladder integrals I_{a,n}, I'_{a,n} of (a+1)^k x^a psi/phi^3 over the two
// interval types, evaluated through the rational substitution y = alpha x that
// normalizes the dominant phi terms.
// ---------------------------------------------------------------------------

struct LadderIntegrals {
  double first;   // over [a_n^-k, b_n^-k]
  double second;  // over [b_n^-k, a_{n+1}^-k]
};

inline LadderIntegrals ladder_integrals(double kexp, std::int64_t a, int n,
                                        QuadratureSpec spec = {}) {
  if (n < 1) throw std::invalid_argument("ladder_integrals: n must be >= 1");
  if (a < 0) throw std::invalid_argument("ladder_integrals: a must be >= 0");
  if (n > ladder_max_n(kexp))
    throw OutOfLadder("ladder_integrals: n = " + std::to_string(n) + " beyond n_max = " +
                      std::to_string(ladder_max_n(kexp)));
  const double ln_n = std::log(static_cast<double>(n));
  const double ln_n1 = std::log(n + 1.0);
  const double ln_n2 = std::log(n + 2.0);
  const double ln_a1 = std::log(a + 1.0);
  const double lb = kexp * (ln_n + ln_n2 - 2.0 * ln_n1);  // log of b, large negative

  LadderIntegrals out{0.0, 0.0};
  {
    // I: y = ((n+1)/n)^k x over y in [1, 1/sqrt(b)], integrand
    // C^k y^{a-n+1} (1 + b y^2) / (1+y)^3 with s = log y.
    const double lC = kexp * (ln_a1 - ln_n1 + static_cast<double>(a - n) * (ln_n - ln_n1));
    const double p1 = static_cast<double>(a - n + 2);
    auto f = [&](double s) -> LogReal {
      return LogReal::from_log(lC + p1 * s + std::log1p(std::exp(lb + 2.0 * s)) -
                               3.0 * std::log1p(std::exp(s)));
    };
    QuadratureSpec sp = spec;
    sp.lo = 0.0;
    sp.hi = -0.5 * lb;
    out.first = integrate_adaptive(f, sp).to_real();
  }
  {
    // I': y = ((n+2)/(n+1))^k x over y in [sqrt(b), 1], integrand
    // D^k y^{a-n-2} (1 + y^2/b) / (1+y)^3.
    const double lD =
        kexp * (ln_a1 + ln_n - 2.0 * ln_n1 + static_cast<double>(a - n - 1) * (ln_n1 - ln_n2));
    const double p1 = static_cast<double>(a - n - 1);
    auto f = [&](double s) -> LogReal {
      return LogReal::from_log(lD + p1 * s + std::log1p(std::exp(2.0 * s - lb)) -
                               3.0 * std::log1p(std::exp(s)));
    };
    QuadratureSpec sp = spec;
    sp.lo = 0.5 * lb;
    sp.hi = 0.0;
    out.second = integrate_adaptive(f, sp).to_real();
  }
  return out;
}

/// Head piece of the mu_a ladder route: Int_0^{2^-k} a^k x^{a-1} psi/phi^3 dx
/// with the deep-cusp two-term forms, via y = 2^k x.
inline double ladder_head_integral(double kexp, std::int64_t a, QuadratureSpec spec = {}) {
  if (a < 1) throw std::invalid_argument("ladder_head_integral: a must be >= 1");
  const double ln2 = std::log(2.0);
  const double lpre = kexp * (std::log(static_cast<double>(a)) - static_cast<double>(a) * ln2);
  const double lratio = kexp * (std::log(1.5) - ln2);  // (3/2)^k vs 2^k inside psi
  auto f = [&](double s) -> LogReal {
    const double psi_log = kexp * ln2 + std::log1p(std::exp(lratio + 2.0 * s));
    return LogReal::from_log(lpre + static_cast<double>(a) * s + psi_log -
                             3.0 * std::log1p(std::exp(s)));
  };
  QuadratureSpec sp = spec;
  sp.lo = -(60.0 / static_cast<double>(a) + 20.0);
  sp.hi = 0.0;
  return integrate_adaptive(f, sp).to_real();
}

/// mu_a reassembled from the ladder: head piece plus I_{a-1,n} + I'_{a-1,n}
/// summed over the intervals around n = a (everything further is negligible
/// by the interval estimates).
inline double ladder_mu(double kexp, std::int64_t a) {
  double total = ladder_head_integral(kexp, a);
  const int n_max = ladder_max_n(kexp);
  const int n_lo = static_cast<int>(std::max<std::int64_t>(1, a - 3));
  const int n_hi = static_cast<int>(std::min<std::int64_t>(n_max, a + 3));
  for (int n = n_lo; n <= n_hi; ++n) {
    const LadderIntegrals li = ladder_integrals(kexp, a - 1, n);
    total += li.first + li.second;
  }
  return total;
}

}  // namespace logpair
