#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "logpair/errors.hpp"
#include "logpair/moment.hpp"

namespace logpair {

// ---------------------------------------------------------------------------
// Torus-reduced Kempf-Ness energy. Its gradient in tau is exactly the
// diagonal of the lambda-center of mass, which is automatically trace-free,
// so descent stays on the SL slice sum(tau) = 0.
// ---------------------------------------------------------------------------

namespace detail {

/// Int log(1 + c s) against ds/(1+s)^2 equals lr/(1 - e^{-lr}) for c = e^lr.
inline double line_log_integral(double lr) {
  if (std::fabs(lr) < 1e-4) return 1.0 + lr / 2.0 + lr * lr / 12.0;
  return lr / (-std::expm1(-lr));
}

inline double rnc_log_energy(const std::vector<double>& theta) {
  const int m = static_cast<int>(theta.size()) - 1;
  double reach = 0.0;
  for (int i = 0; i <= m; ++i)
    for (int j = i + 1; j <= m; ++j)
      reach = std::max(reach, std::fabs(theta[static_cast<std::size_t>(i)] - theta[static_cast<std::size_t>(j)]) / (j - i));
  const double R = reach + 50.0;
  auto f = [&](double s) -> LogReal {
    double mx = -std::numeric_limits<double>::infinity();
    for (int i = 0; i <= m; ++i) mx = std::max(mx, theta[static_cast<std::size_t>(i)] + i * s);
    double acc = 0.0;
    for (int i = 0; i <= m; ++i) acc += std::exp(theta[static_cast<std::size_t>(i)] + i * s - mx);
    const double lse = mx + std::log(acc);
    const double log_meas = s - 2.0 * (std::max(s, 0.0) + std::log1p(std::exp(-std::fabs(s))));
    return LogReal::from_real(lse * std::exp(log_meas));
  };
  QuadratureSpec sp;
  sp.rel_tol = 1e-12;
  sp.abs_tol = 1e-13;
  sp.lo = -R;
  sp.hi = R;
  return 0.5 * static_cast<double>(m) * integrate_adaptive(f, sp).to_real();
}

/// Covariance block 2 m Int (diag p - p p^T) dnu of a weighted curve, the
/// Hessian of its reduced energy. Composite fixed-order panels suffice here;
/// the Newton direction only needs a few good digits.
inline std::vector<std::vector<double>> rnc_hessian_block(const std::vector<double>& theta) {
  const int m = static_cast<int>(theta.size()) - 1;
  double reach = 0.0;
  for (int i = 0; i <= m; ++i)
    for (int j = i + 1; j <= m; ++j)
      reach = std::max(reach, std::fabs(theta[static_cast<std::size_t>(i)] - theta[static_cast<std::size_t>(j)]) / (j - i));
  const double R = reach + 45.0;
  std::vector<std::vector<double>> H(theta.size(), std::vector<double>(theta.size(), 0.0));
  std::vector<double> p(theta.size());
  const int panels = std::max(64, static_cast<int>(R));
  const double h = 2.0 * R / panels;
  for (int pi = 0; pi < panels; ++pi) {
    const double a = -R + pi * h;
    for (int q = 0; q < 15; ++q) {
      const double s = a + 0.5 * h * (1.0 + detail::kGK15Nodes[q]);
      const double w = 0.5 * h * detail::kK15Weights[q];
      double mx = -std::numeric_limits<double>::infinity();
      for (int i = 0; i <= m; ++i) mx = std::max(mx, theta[static_cast<std::size_t>(i)] + i * s);
      double denom = 0.0;
      for (int i = 0; i <= m; ++i) {
        p[static_cast<std::size_t>(i)] = std::exp(theta[static_cast<std::size_t>(i)] + i * s - mx);
        denom += p[static_cast<std::size_t>(i)];
      }
      for (double& v : p) v /= denom;
      const double meas = std::exp(s - 2.0 * (std::max(s, 0.0) + std::log1p(std::exp(-std::fabs(s)))));
      const double scale = 2.0 * m * w * meas;
      for (int i = 0; i <= m; ++i) {
        for (int j = 0; j <= m; ++j)
          H[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] -= scale * p[static_cast<std::size_t>(i)] * p[static_cast<std::size_t>(j)];
        H[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] += scale * p[static_cast<std::size_t>(i)];
      }
    }
  }
  return H;
}

inline std::vector<double> solve_spd(std::vector<std::vector<double>> A, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t i = 0; i < n; ++i) A[i][i] += 1e-11;
  // Gaussian elimination with partial pivoting; n is tiny here.
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::fabs(A[r][col]) > std::fabs(A[piv][col])) piv = r;
    std::swap(A[col], A[piv]);
    std::swap(b[col], b[piv]);
    const double d = A[col][col];
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = A[r][col] / d;
      if (f == 0.0) continue;
      for (std::size_t c2 = col; c2 < n; ++c2) A[r][c2] -= f * A[col][c2];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t c2 = i + 1; c2 < n; ++c2) s -= A[i][c2] * x[c2];
    x[i] = s / A[i][i];
  }
  return x;
}

}  // namespace detail

/// Kempf-Ness energy of the configuration at the diagonal element exp(tau).
inline double kempf_ness_energy(const CycleConfig& cfg, const std::vector<double>& tau) {
  double e = 0.0;
  for (const auto& comp : cfg.curve) {
    if (const auto* p = std::get_if<PointComp>(&comp)) {
      e += cfg.lambda * tau[static_cast<std::size_t>(p->i)];
    } else if (const auto* l = std::get_if<LineComp>(&comp)) {
      const double ti = tau[static_cast<std::size_t>(l->i)], tj = tau[static_cast<std::size_t>(l->j)];
      e += cfg.lambda * 0.5 * (2.0 * tj + detail::line_log_integral(2.0 * (ti - tj)));
    } else {
      // Unshifted weights here: the energy itself must be consistent across
      // tau for the line search (the softmax mass routine may shift freely,
      // this one may not).
      const auto& r = std::get<RncComp>(comp);
      std::vector<double> theta(r.indices.size());
      for (std::size_t j = 0; j < r.indices.size(); ++j)
        theta[j] = 2.0 * (tau[static_cast<std::size_t>(r.indices[j])] + std::log(r.weights[j]));
      e += cfg.lambda * detail::rnc_log_energy(theta);
    }
  }
  for (const auto& p : cfg.divisor) e += (1.0 - cfg.lambda) * tau[static_cast<std::size_t>(p.i)];
  const double c =
      (cfg.lambda * curve_volume(cfg) + (1.0 - cfg.lambda) * divisor_volume(cfg)) / (cfg.n + 1);
  e -= c * std::accumulate(tau.begin(), tau.end(), 0.0);
  return e;
}

struct BalanceResult {
  std::vector<double> weights;  // exp(tau) with sum tau = 0
  std::vector<double> tau;
  double residual = 0.0;  // ||diag mu||_inf at termination
  int iterations = 0;
  std::vector<double> energy_history;  // accepted steps, monotone nonincreasing
};

/// Minimize the reduced Kempf-Ness energy over the diagonal group by descent
/// on tau (gradient = diag of the moment), with backtracking line search and
/// Newton acceleration once the residual is small. Terminates when
/// ||diag mu||_inf < tol; throws MaxIterExceeded (with diagnostics) when the
/// iteration cap is reached, which signals possible strict semistability.
inline BalanceResult balance_flow(const CycleConfig& cfg, double tol, int max_iter) {
  validate_config(cfg);
  if (!(tol > 0.0)) throw std::invalid_argument("balance_flow: tol must be > 0");
  const std::size_t n1 = static_cast<std::size_t>(cfg.n) + 1;
  std::vector<double> tau(n1, 0.0);
  double energy = kempf_ness_energy(cfg, tau);
  double best_res = std::numeric_limits<double>::infinity();

  BalanceResult out;
  out.energy_history.push_back(energy);
  for (int it = 0; it <= max_iter; ++it) {
    const HermitianMoment mu = lambda_center_of_mass(cfg, tau);
    const double res = mu.max_abs();
    best_res = std::min(best_res, res);
    if (res < tol) {
      out.tau = tau;
      out.weights.resize(n1);
      for (std::size_t i = 0; i < n1; ++i) out.weights[i] = std::exp(tau[i]);
      out.residual = res;
      out.iterations = it;
      return out;
    }
    if (it == max_iter) break;

    // Direction: plain gradient while far out, Newton once in the basin.
    std::vector<double> dir(n1);
    if (res > 0.2) {
      for (std::size_t i = 0; i < n1; ++i) dir[i] = -mu.diag[i];
    } else {
      std::vector<std::vector<double>> H(n1, std::vector<double>(n1, 0.0));
      for (const auto& comp : cfg.curve) {
        if (const auto* l = std::get_if<LineComp>(&comp)) {
          const std::size_t i = static_cast<std::size_t>(l->i), j = static_cast<std::size_t>(l->j);
          const double h =
              cfg.lambda * 2.0 * detail::line_mass_fraction_deriv(2.0 * (tau[i] - tau[j]));
          H[i][i] += h;
          H[j][j] += h;
          H[i][j] -= h;
          H[j][i] -= h;
        } else if (const auto* r = std::get_if<RncComp>(&comp)) {
          const auto block = detail::rnc_hessian_block(detail::rnc_theta(*r, tau));
          for (std::size_t bi = 0; bi < r->indices.size(); ++bi)
            for (std::size_t bj = 0; bj < r->indices.size(); ++bj)
              H[static_cast<std::size_t>(r->indices[bi])][static_cast<std::size_t>(r->indices[bj])] +=
                  cfg.lambda * block[bi][bj];
        }
      }
      std::vector<double> rhs(n1);
      for (std::size_t i = 0; i < n1; ++i) rhs[i] = -mu.diag[i];
      dir = detail::solve_spd(std::move(H), std::move(rhs));
      const double mean = std::accumulate(dir.begin(), dir.end(), 0.0) / static_cast<double>(n1);
      for (double& v : dir) v -= mean;
      double descent = 0.0;
      for (std::size_t i = 0; i < n1; ++i) descent += dir[i] * mu.diag[i];
      if (!(descent < 0.0))
        for (std::size_t i = 0; i < n1; ++i) dir[i] = -mu.diag[i];
    }

    double slope = 0.0;
    for (std::size_t i = 0; i < n1; ++i) slope += dir[i] * mu.diag[i];
    double step = 1.0;
    bool accepted = false;
    std::vector<double> trial(n1);
    for (int bt = 0; bt < 60; ++bt) {
      for (std::size_t i = 0; i < n1; ++i) trial[i] = tau[i] + step * dir[i];
      const double e2 = kempf_ness_energy(cfg, trial);
      bool ok = e2 <= energy + 1e-4 * step * slope;
      if (!ok && res < 1e-5) {
        // Near the minimum the Armijo decrease drops below the floating-point
        // resolution of the energy; fall back to accepting on residual.
        const double res2 = lambda_center_of_mass(cfg, trial).max_abs();
        ok = res2 <= 0.9 * res && e2 <= energy + 1e-12 * (1.0 + std::fabs(energy));
      }
      if (ok) {
        tau = trial;
        energy = std::min(energy, e2);
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // stalled line search; report via MaxIterExceeded below
    const double mean = std::accumulate(tau.begin(), tau.end(), 0.0) / static_cast<double>(n1);
    for (double& v : tau) v -= mean;
    out.energy_history.push_back(energy);
  }

  double tnorm = 0.0;
  for (double v : tau) tnorm = std::max(tnorm, std::fabs(v));
  throw MaxIterExceeded(
      "balance_flow: no balanced point within iteration budget (best residual " +
          std::to_string(best_res) + ", |tau|_inf " + std::to_string(tnorm) +
          "); residual plateau with growing tau indicates strict semistability",
      best_res, tnorm, max_iter);
}

// ---------------------------------------------------------------------------
// Explicit balanced configurations and the lambda_k thresholds.
// ---------------------------------------------------------------------------

struct Rational {
  long long num = 0;
  long long den = 1;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

inline Rational make_rational(long long num, long long den) {
  const long long g = std::gcd(num, den);
  return Rational{num / g, den / g};
}

/// Threshold lambda_k for (P^1, d points) embedded by O(d)^k:
/// 2/(d+1) at k = 1 and (2kd+2)/(3kd+d+1) for k >= 2.
inline Rational lambda_k(long long d, long long k) {
  if (d < 2) throw std::invalid_argument("lambda_k: d must be >= 2");
  if (k < 1) throw std::invalid_argument("lambda_k: k must be >= 1");
  if (k == 1) return make_rational(2, d + 1);
  return make_rational(2 * k * d + 2, 3 * k * d + d + 1);
}

/// The coordinate-point star in P^d: lines from each q_i (i < d) to the hub
/// q_d, with the divisor on the outer points.
inline CycleConfig star_config(int d, double lambda) {
  CycleConfig cfg;
  cfg.n = d;
  cfg.lambda = lambda;
  for (int i = 0; i < d; ++i) {
    cfg.curve.push_back(LineComp{i, d});
    cfg.divisor.push_back(PointComp{i});
  }
  return cfg;
}

struct Theorem41Report {
  long long d = 0;
  long long k = 0;
  Rational lambda;
  double tol = 0.0;
  double residual = 0.0;        // ||mu||_2 at lambda_k
  double residual_minus = 0.0;  // at lambda_k - 0.05
  double residual_plus = 0.0;   // at lambda_k + 0.05
  double measured_lambda = 0.0; // argmin_lambda ||mu(lambda)||_2 for the built cycle
  double measured_residual = 0.0;
  int flow_iterations = 0;
  bool balanced = false;
  bool strict_window = false;
  bool pass() const { return balanced && strict_window; }
};

namespace detail {

/// ||mu(lambda)||_2 is quadratic in lambda: mu = P + lambda Q entrywise.
/// Returns the minimizing lambda and the residual there.
inline std::pair<double, double> best_lambda(const CycleConfig& base,
                                             const std::vector<double>& tau) {
  CycleConfig at0 = base;
  at0.lambda = 0.0;
  CycleConfig at1 = base;
  at1.lambda = 1.0;
  const HermitianMoment m0 = lambda_center_of_mass(at0, tau);
  const HermitianMoment m1 = lambda_center_of_mass(at1, tau);
  double pq = 0.0, qq = 0.0;
  for (int i = 0; i <= base.n; ++i) {
    const double p = m0.diag[static_cast<std::size_t>(i)];
    const double q = m1.diag[static_cast<std::size_t>(i)] - p;
    pq += p * q;
    qq += q * q;
  }
  const double lam = qq > 0.0 ? -pq / qq : 0.0;
  CycleConfig at = base;
  at.lambda = lam;
  return {lam, lambda_center_of_mass(at, tau).norm2()};
}

}  // namespace detail

/// Builds the degenerate cycle for (P^1, d points) at level k and evaluates
/// its lambda-center of mass at lambda_k and at lambda_k +- 0.05. For k = 1
/// this is the symmetric star; for k >= 2 a rational normal curve of degree
/// (k-1)d is first flowed to its 2/3-balanced weights in the coordinate
/// subspace, then joined by d lines to the divisor points, with each line
/// weighted equally at both ends. The report also carries the lambda that
/// actually balances the built cycle.
inline Theorem41Report verify_theorem41(long long d, long long k, double tol) {
  if (d < 3) throw std::invalid_argument("verify_theorem41: d must be >= 3");
  if (k < 1) throw std::invalid_argument("verify_theorem41: k must be >= 1");
  if (!(tol > 0.0)) throw std::invalid_argument("verify_theorem41: tol must be > 0");

  Theorem41Report rep;
  rep.d = d;
  rep.k = k;
  rep.lambda = lambda_k(d, k);
  rep.tol = tol;

  const int N = static_cast<int>(k * d);
  CycleConfig cfg;
  std::vector<double> tau(static_cast<std::size_t>(N) + 1, 0.0);
  if (k == 1) {
    cfg = star_config(static_cast<int>(d), rep.lambda.value());
  } else {
    const int M = N - static_cast<int>(d);
    CycleConfig sub;
    sub.n = M;
    sub.lambda = 2.0 / 3.0;
    RncComp curve;
    for (int i = 0; i <= M; ++i) {
      curve.indices.push_back(i);
      curve.weights.push_back(1.0);
    }
    sub.curve.push_back(curve);
    for (int i = 0; i < d; ++i) sub.divisor.push_back(PointComp{i});
    const BalanceResult sub_res = balance_flow(sub, std::min(1e-10, tol * 1e-2), 400);
    rep.flow_iterations = sub_res.iterations;

    cfg.n = N;
    cfg.lambda = rep.lambda.value();
    cfg.curve.push_back(curve);
    for (int i = 0; i < d; ++i) {
      cfg.curve.push_back(LineComp{static_cast<int>(i), M + 1 + static_cast<int>(i)});
      cfg.divisor.push_back(PointComp{M + 1 + static_cast<int>(i)});
    }
    for (int i = 0; i <= M; ++i) tau[static_cast<std::size_t>(i)] = sub_res.tau[static_cast<std::size_t>(i)];
    // Equal-weight lines: the divisor-side ends inherit the weight of the
    // curve point they attach to.
    for (int i = 0; i < d; ++i)
      tau[static_cast<std::size_t>(M + 1 + i)] = sub_res.tau[static_cast<std::size_t>(i)];
  }

  auto norm_at = [&](double lam) {
    CycleConfig c2 = cfg;
    c2.lambda = lam;
    return lambda_center_of_mass(c2, tau).norm2();
  };
  rep.residual = norm_at(rep.lambda.value());
  rep.residual_minus = norm_at(rep.lambda.value() - 0.05);
  rep.residual_plus = norm_at(rep.lambda.value() + 0.05);
  const auto [lam_best, res_best] = detail::best_lambda(cfg, tau);
  rep.measured_lambda = lam_best;
  rep.measured_residual = res_best;
  rep.balanced = rep.residual <= tol;
  rep.strict_window = rep.residual_minus > 1e-4 && rep.residual_plus > 1e-4;
  return rep;
}

}  // namespace logpair
