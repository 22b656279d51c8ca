#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "logpair/quadrature.hpp"

namespace logpair {

/// Moment matrix of a torus-symmetric configuration. Coordinate-aligned cycles
/// keep the matrix diagonal under diagonal group elements, so only the
/// diagonal is stored and the flag records that reduction.
struct HermitianMoment {
  int dim = 0;
  bool diagonal_only = true;
  std::vector<double> diag;

  static HermitianMoment zeros(int dim) {
    HermitianMoment m;
    m.dim = dim;
    m.diag.assign(static_cast<std::size_t>(dim), 0.0);
    return m;
  }
  double trace() const { return std::accumulate(diag.begin(), diag.end(), 0.0); }
  double norm2() const {  // Frobenius
    double s = 0.0;
    for (double v : diag) s += v * v;
    return std::sqrt(s);
  }
  double max_abs() const {
    double s = 0.0;
    for (double v : diag) s = std::max(s, std::fabs(v));
    return s;
  }
  HermitianMoment& add_scaled(const HermitianMoment& other, double c) {
    for (int i = 0; i < dim; ++i) diag[static_cast<std::size_t>(i)] += c * other.diag[static_cast<std::size_t>(i)];
    return *this;
  }
};

// ---------------------------------------------------------------------------
// Cycle configurations: points, coordinate lines, weighted rational normal
// curves, all supported on coordinate subspaces of P^N.
// ---------------------------------------------------------------------------

struct PointComp {
  int i = 0;
};
struct LineComp {
  int i = 0, j = 0;
};
struct RncComp {
  std::vector<int> indices;      // coordinates hosting the curve, degree = size-1
  std::vector<double> weights;   // positive parametrization weights per index
};
using CycleComponent = std::variant<PointComp, LineComp, RncComp>;

struct CycleConfig {
  int n = 0;  // ambient P^n
  std::vector<CycleComponent> curve;
  std::vector<PointComp> divisor;
  double lambda = 1.0;
};

inline double component_volume(const CycleComponent& c) {
  if (std::holds_alternative<PointComp>(c)) return 1.0;
  if (std::holds_alternative<LineComp>(c)) return 1.0;
  return static_cast<double>(std::get<RncComp>(c).indices.size()) - 1.0;
}

inline void validate_config(const CycleConfig& cfg) {
  const int n1 = cfg.n + 1;
  if (cfg.n < 0) throw std::invalid_argument("CycleConfig: negative ambient dimension");
  if (!(cfg.lambda >= 0.0 && cfg.lambda <= 1.0))
    throw std::invalid_argument("CycleConfig: lambda must lie in [0,1]");
  auto check_index = [&](int i) {
    if (i < 0 || i >= n1) throw std::invalid_argument("CycleConfig: coordinate index out of range");
  };
  for (const auto& c : cfg.curve) {
    if (const auto* p = std::get_if<PointComp>(&c)) {
      check_index(p->i);
    } else if (const auto* l = std::get_if<LineComp>(&c)) {
      check_index(l->i);
      check_index(l->j);
      if (l->i == l->j) throw std::invalid_argument("CycleConfig: degenerate line");
    } else {
      const auto& r = std::get<RncComp>(c);
      if (r.indices.size() < 2) throw std::invalid_argument("CycleConfig: rnc needs >= 2 indices");
      std::set<int> seen;
      for (int i : r.indices) {
        check_index(i);
        if (!seen.insert(i).second) throw std::invalid_argument("CycleConfig: rnc indices must be distinct");
      }
      if (r.weights.size() != r.indices.size())
        throw std::invalid_argument("CycleConfig: rnc weight count mismatch");
      for (double w : r.weights)
        if (!(w > 0.0)) throw std::invalid_argument("CycleConfig: rnc weights must be positive");
    }
  }
  for (const auto& p : cfg.divisor) check_index(p.i);
}

inline double curve_volume(const CycleConfig& cfg) {
  double v = 0.0;
  for (const auto& c : cfg.curve) v += component_volume(c);
  return v;
}
inline double divisor_volume(const CycleConfig& cfg) {
  return static_cast<double>(cfg.divisor.size());
}

// ---------------------------------------------------------------------------
// Component moments. Mass distributions are taken against the fixed reference
// measure of the parametrizing P^1 (ds/(1+s)^2 in s = |t|^2, scaled to total
// mass = degree), with the group weights entering the integrand. This is the
// torus-reduced Kempf-Ness model: the diagonal of the moment is exactly the
// gradient of the convex energy in the log-weights.
// ---------------------------------------------------------------------------

/// Moment of the coordinate point e_i.
inline HermitianMoment moment_of_point(int i, int n) {
  if (i < 0 || i > n) throw std::invalid_argument("moment_of_point: index out of range");
  HermitianMoment m = HermitianMoment::zeros(n + 1);
  m.diag[static_cast<std::size_t>(i)] = 1.0;
  return m;
}

namespace detail {

/// Mass at the i-end of a line with weight ratio r = (w_i/w_j)^2 = e^lr:
/// M = r (r - 1 - log r)/(r - 1)^2. Odd around lr = 0 after subtracting 1/2.
inline double line_mass_fraction(double lr) {
  const double al = std::fabs(lr);
  if (al < 1e-3) {
    return 0.5 + lr / 6.0 - lr * lr * lr / 180.0;
  }
  if (lr > 40.0) return 1.0 - (lr - 1.0) * std::exp(-lr);
  if (lr < -40.0) return (-lr - 1.0) * std::exp(lr);
  const double em = std::expm1(lr);
  return (em + 1.0) * (em - lr) / (em * em);
}

/// Masses at the two ends, evaluated at |lr| and mirrored so that swapping
/// the ends transposes the entries exactly.
inline std::pair<double, double> line_mass_pair(double lr) {
  const double hi = line_mass_fraction(std::fabs(lr));
  if (lr >= 0.0) return {hi, 1.0 - hi};
  return {1.0 - hi, hi};
}

/// d/d(lr) of line_mass_fraction; the line's contribution to the flow Hessian.
inline double line_mass_fraction_deriv(double lr) {
  const double al = std::fabs(lr);
  if (al < 1e-3) return 1.0 / 6.0 - lr * lr / 60.0;
  if (al > 40.0) return (al - 2.0) * std::exp(-al);
  const double r = std::exp(lr);
  const double em = std::expm1(lr);
  const double A = em - lr;  // r - 1 - log r
  return r * ((em * em - A * (r + 1.0)) / (em * em * em));
}

/// Softmax mass integrals of a weighted rational normal curve against the
/// reference measure: returns per-exponent masses summing to the degree m.
/// theta[j] = 2(tau_j + log w_j) are the doubled log weights.
inline std::vector<double> rnc_masses(const std::vector<double>& theta, QuadratureSpec spec = {}) {
  const int m = static_cast<int>(theta.size()) - 1;
  // Softmax transitions happen where levels theta_i + i s cross; include them all.
  double reach = 0.0;
  for (int i = 0; i <= m; ++i)
    for (int j = i + 1; j <= m; ++j)
      reach = std::max(reach, std::fabs(theta[static_cast<std::size_t>(i)] - theta[static_cast<std::size_t>(j)]) / (j - i));
  const double R = reach + 50.0;
  std::vector<double> masses(theta.size());
  std::vector<double> levels(theta.size());
  for (int j = 0; j <= m; ++j) {
    auto f = [&](double s) -> LogReal {
      double mx = -std::numeric_limits<double>::infinity();
      for (int i = 0; i <= m; ++i) {
        levels[static_cast<std::size_t>(i)] = theta[static_cast<std::size_t>(i)] + i * s;
        mx = std::max(mx, levels[static_cast<std::size_t>(i)]);
      }
      double denom = 0.0;
      for (int i = 0; i <= m; ++i) denom += std::exp(levels[static_cast<std::size_t>(i)] - mx);
      const double log_p = levels[static_cast<std::size_t>(j)] - mx - std::log(denom);
      // measure e^s ds/(1+e^s)^2 written stably: s - 2 log(1+e^s)
      const double log_meas = s - 2.0 * (std::max(s, 0.0) + std::log1p(std::exp(-std::fabs(s))));
      return LogReal::from_log(log_p + log_meas);
    };
    QuadratureSpec sp = spec;
    sp.rel_tol = std::min(spec.rel_tol, 1e-12);
    sp.lo = -R;
    sp.hi = R;
    masses[static_cast<std::size_t>(j)] = static_cast<double>(m) * integrate_adaptive(f, sp).to_real();
  }
  return masses;
}

inline std::vector<double> rnc_theta(const RncComp& r, const std::vector<double>& tau) {
  std::vector<double> theta(r.indices.size());
  for (std::size_t j = 0; j < r.indices.size(); ++j)
    theta[j] = 2.0 * (tau[static_cast<std::size_t>(r.indices[j])] + std::log(r.weights[j]));
  // A common shift cancels in every softmax; remove it for bit-stable scale invariance.
  const double mx = *std::max_element(theta.begin(), theta.end());
  for (double& t : theta) t -= mx;
  return theta;
}

}  // namespace detail

/// Moment of the coordinate line through e_i, e_j with weights (w_i, w_j):
/// diagonal (M_ii, M_jj) with M_ii = W(W - V - V log(W/V))/(W - V)^2 for
/// W = w_i^2, V = w_j^2, and M_jj = 1 - M_ii.
inline HermitianMoment moment_of_line(int i, int j, double w_i, double w_j, int n) {
  if (i < 0 || i > n || j < 0 || j > n || i == j)
    throw std::invalid_argument("moment_of_line: bad coordinate indices");
  if (!(w_i > 0.0 && w_j > 0.0)) throw std::invalid_argument("moment_of_line: weights must be > 0");
  HermitianMoment m = HermitianMoment::zeros(n + 1);
  const auto [mass_i, mass_j] = detail::line_mass_pair(2.0 * (std::log(w_i) - std::log(w_j)));
  m.diag[static_cast<std::size_t>(i)] = mass_i;
  m.diag[static_cast<std::size_t>(j)] = mass_j;
  return m;
}

/// Moment of the weighted rational normal curve [w_0 : w_1 t : ... : w_m t^m]
/// on the listed coordinates; diagonal entries sum to the degree m.
inline HermitianMoment moment_of_rnc(const std::vector<int>& indices,
                                     const std::vector<double>& weights, int n) {
  RncComp r{indices, weights};
  CycleConfig probe;
  probe.n = n;
  probe.curve.push_back(r);
  validate_config(probe);
  HermitianMoment m = HermitianMoment::zeros(n + 1);
  std::vector<double> tau(static_cast<std::size_t>(n) + 1, 0.0);
  const std::vector<double> masses = detail::rnc_masses(detail::rnc_theta(r, tau));
  for (std::size_t jj = 0; jj < indices.size(); ++jj)
    m.diag[static_cast<std::size_t>(indices[jj])] += masses[jj];
  return m;
}

/// lambda mu_V + (1-lambda) mu_W - (lambda Vol V + (1-lambda) Vol W)/(N+1) Id,
/// evaluated at the diagonal group element exp(tau) (tau = 0 if omitted).
/// The identity multiple uses the exact component volumes, so the trace
/// vanishes by construction up to quadrature error.
inline HermitianMoment lambda_center_of_mass(const CycleConfig& cfg,
                                             const std::vector<double>& tau) {
  validate_config(cfg);
  const int n1 = cfg.n + 1;
  if (tau.size() != static_cast<std::size_t>(n1))
    throw std::invalid_argument("lambda_center_of_mass: tau size mismatch");
  HermitianMoment acc = HermitianMoment::zeros(n1);
  for (const auto& comp : cfg.curve) {
    if (const auto* p = std::get_if<PointComp>(&comp)) {
      acc.diag[static_cast<std::size_t>(p->i)] += cfg.lambda;
    } else if (const auto* l = std::get_if<LineComp>(&comp)) {
      const auto [mass_i, mass_j] = detail::line_mass_pair(
          2.0 * (tau[static_cast<std::size_t>(l->i)] - tau[static_cast<std::size_t>(l->j)]));
      acc.diag[static_cast<std::size_t>(l->i)] += cfg.lambda * mass_i;
      acc.diag[static_cast<std::size_t>(l->j)] += cfg.lambda * mass_j;
    } else {
      const auto& r = std::get<RncComp>(comp);
      const std::vector<double> masses = detail::rnc_masses(detail::rnc_theta(r, tau));
      for (std::size_t jj = 0; jj < r.indices.size(); ++jj)
        acc.diag[static_cast<std::size_t>(r.indices[jj])] += cfg.lambda * masses[jj];
    }
  }
  for (const auto& p : cfg.divisor) acc.diag[static_cast<std::size_t>(p.i)] += 1.0 - cfg.lambda;
  const double c =
      (cfg.lambda * curve_volume(cfg) + (1.0 - cfg.lambda) * divisor_volume(cfg)) / n1;
  for (double& v : acc.diag) v -= c;
  return acc;
}

inline HermitianMoment lambda_center_of_mass(const CycleConfig& cfg) {
  return lambda_center_of_mass(cfg, std::vector<double>(static_cast<std::size_t>(cfg.n) + 1, 0.0));
}

}  // namespace logpair
