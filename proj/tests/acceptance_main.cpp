// Acceptance suite: every release-gating check, one pass/fail line each.
// Exit code is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "logpair/balance.hpp"
#include "logpair/cylinder.hpp"
#include "logpair/energy.hpp"
#include "logpair/ladder.hpp"
#include "logpair/model_kernel.hpp"
#include "logpair/neck.hpp"

using namespace logpair;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

int g_failures = 0;

void run_criterion(int id, const std::string& name, double time_limit_s,
                   const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out.pass = false;
    out.detail = std::string("exception: ") + e.what();
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (elapsed > time_limit_s) {
    out.pass = false;
    out.detail += (out.detail.empty() ? "" : "; ") + std::string("over time limit");
  }
  if (!out.pass) ++g_failures;
  std::printf("%s criterion %d: %s (%.1fs, limit %.0fs)%s%s\n", out.pass ? "PASS" : "FAIL", id,
              name.c_str(), elapsed, time_limit_s, out.detail.empty() ? "" : " -- ",
              out.detail.c_str());
  std::fflush(stdout);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

// --------------------------------------------------------------------------

Outcome monomial_norms() {
  Outcome out;
  double worst = 0.0;
  for (const double k : {10.0, 100.0, 1000.0}) {
    const ModelLevel level(k);
    for (std::int64_t a = 1; a <= 50; ++a) {
      const double closed = monomial_norm_sq(level, a).logmag;
      const double quad = monomial_norm_sq_by_quadrature(level, a).logmag;
      worst = std::max(worst, std::fabs(std::expm1(quad - closed)));
    }
  }
  out.pass = worst <= 1e-10;
  out.detail = "max rel err " + fmt(worst);
  return out;
}

Outcome theta_grid() {
  Outcome out;
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double b = 1e-2 * std::pow(1e4, i / 19.0);
    worst = std::max(worst, std::fabs(theta_identity(b) - 2.0));
  }
  out.pass = worst < 1e-8;
  out.detail = "max |integral - 2| = " + fmt(worst);
  return out;
}

Outcome ladder_references() {
  Outcome out;
  const double k = 400.0;
  double worst_center = 0.0, worst_side = 0.0, worst_eps = 0.0;
  for (int n = 2; n <= 6; ++n) {
    worst_center = std::max(worst_center, std::fabs(ladder_integrals(k, n, n).first - 0.375));
    worst_side = std::max(worst_side, std::fabs(ladder_integrals(k, n - 1, n).first - 0.125));
    worst_eps = std::max(worst_eps, std::fabs(ladder_integrals(k, n - 2, n).first));
  }
  out.pass = worst_center <= 0.01 && worst_side <= 0.01 && worst_eps <= 1e-4;
  out.detail = "|I(n,n)-3/8| <= " + fmt(worst_center) + ", |I(n-1,n)-1/8| <= " + fmt(worst_side) +
               ", |I(n-2,n)| <= " + fmt(worst_eps);
  return out;
}

Outcome mu_small_indices() {
  Outcome out;
  std::vector<double> max_dev;
  for (const double k : {200.0, 400.0, 800.0}) {
    const ModelLevel level(k);
    double dev = std::fabs(mu_direct(level, 1) - 0.5);
    for (std::int64_t a = 2; a <= 8; ++a)
      dev = std::max(dev, std::fabs(mu_direct(level, a) - 1.0));
    max_dev.push_back(dev);
  }
  const bool at_800 = max_dev[2] <= 0.01;
  const bool monotone = max_dev[0] > max_dev[1] && max_dev[1] > max_dev[2];
  out.pass = at_800 && monotone;
  out.detail = "max dev(200,400,800) = " + fmt(max_dev[0]) + ", " + fmt(max_dev[1]) + ", " +
               fmt(max_dev[2]);
  return out;
}

Outcome mu_neck_indices() {
  Outcome out;
  const ModelLevel level(1e4);
  double worst_dev = 0.0, worst_route = 0.0;
  for (const std::int64_t a : {50, 100, 200}) {
    const double direct = mu_direct(level, a);
    const double neck = mu_neck(level, a);
    worst_dev = std::max(worst_dev, std::fabs(direct - 1.0));
    worst_route = std::max(worst_route, std::fabs(direct - neck));
  }
  out.pass = worst_dev <= 0.01 && worst_route <= 1e-3;
  out.detail = "max |mu - 1| = " + fmt(worst_dev) + ", route gap " + fmt(worst_route);
  return out;
}

Outcome chow_thresholds() {
  Outcome out;
  const struct {
    long long d, k, num, den;
  } cases[] = {{3, 1, 1, 2}, {4, 1, 2, 5}, {3, 2, 7, 11}, {4, 2, 18, 29}, {3, 3, 20, 31}};
  std::ostringstream detail;
  for (const auto& c : cases) {
    const Rational lam = lambda_k(c.d, c.k);
    bool ok = lam.num == c.num && lam.den == c.den;
    const Theorem41Report rep = verify_theorem41(c.d, c.k, 1e-7);
    ok = ok && rep.balanced && rep.strict_window;
    if (!ok) {
      out.pass = false;
      detail << " (d=" << c.d << ",k=" << c.k << "): residual " << fmt(rep.residual) << " at "
             << lam.num << "/" << lam.den << ", cycle balances at lambda=" << fmt(rep.measured_lambda)
             << " (residual " << fmt(rep.measured_residual) << ");";
    }
  }
  out.detail = out.pass ? "all five (d,k) cases balanced with strict windows"
                        : "failing cases:" + detail.str();
  return out;
}

Outcome veronese_recovery() {
  Outcome out;
  double worst = 0.0;
  for (int m = 1; m <= 12; ++m) {
    CycleConfig cfg;
    cfg.n = m;
    cfg.lambda = 1.0;
    RncComp r;
    for (int j = 0; j <= m; ++j) {
      r.indices.push_back(j);
      r.weights.push_back(1.0);
    }
    cfg.curve.push_back(r);
    const BalanceResult res = balance_flow(cfg, 1e-10, 300);
    double weight_gap = 0.0;
    double mean = 0.0;
    std::vector<double> target(static_cast<std::size_t>(m) + 1);
    for (int j = 0; j <= m; ++j) {
      target[static_cast<std::size_t>(j)] =
          0.5 * (std::lgamma(m + 1.0) - std::lgamma(j + 1.0) - std::lgamma(m - j + 1.0));
      mean += target[static_cast<std::size_t>(j)] / (m + 1.0);
    }
    for (int j = 0; j <= m; ++j)
      weight_gap = std::max(weight_gap, std::fabs(res.tau[static_cast<std::size_t>(j)] -
                                                  (target[static_cast<std::size_t>(j)] - mean)));
    worst = std::max(worst, std::max(res.residual, weight_gap * 1e-3));
    if (res.residual >= 1e-9) out.pass = false;
    if (weight_gap > 1e-5) out.pass = false;
  }
  out.detail = "worst residual-scale gap " + fmt(worst);
  return out;
}

Outcome energy_decay() {
  Outcome out;
  const SurfaceData surface(0, 3, 3);
  const std::vector<long long> ks{100, 200, 400, 800};
  const std::vector<EnergyRow> rows = scan_energy(surface, ks);
  bool positive = true, decreasing = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    positive = positive && rows[i].energy > 0.0;
    if (i > 0) decreasing = decreasing && rows[i].energy < rows[i - 1].energy;
  }
  const double slope = log_log_slope(rows);
  out.pass = positive && decreasing && slope <= -1.2;
  std::ostringstream d;
  d << "energies";
  for (const auto& r : rows) d << " " << fmt(r.energy);
  d << ", regression slope " << fmt(slope);
  out.detail = d.str();
  return out;
}

Outcome invariant_suites() {
  Outcome out;
  std::ostringstream detail;
  std::mt19937 rng(2024);

  {  // trace-zero and volume sums, 200 random configurations
    double worst_trace = 0.0;
    double worst_volume = 0.0;
    std::uniform_real_distribution<double> w(0.2, 5.0);
    for (int i = 0; i < 200; ++i) {
      const int n = 2 + static_cast<int>(rng() % 7);
      CycleConfig cfg;
      cfg.n = n;
      cfg.lambda = std::uniform_real_distribution<double>(0.02, 0.98)(rng);
      const int m = 1 + static_cast<int>(rng() % std::min(4, n));
      RncComp r;
      std::vector<int> all(static_cast<std::size_t>(n) + 1);
      for (int j = 0; j <= n; ++j) all[static_cast<std::size_t>(j)] = j;
      std::shuffle(all.begin(), all.end(), rng);
      for (int j = 0; j <= m; ++j) {
        r.indices.push_back(all[static_cast<std::size_t>(j)]);
        r.weights.push_back(w(rng));
      }
      cfg.curve.push_back(r);
      int li = static_cast<int>(rng() % (n + 1)), lj = static_cast<int>(rng() % (n + 1));
      if (li == lj) lj = (lj + 1) % (n + 1);
      cfg.curve.push_back(LineComp{li, lj});
      cfg.divisor.push_back(PointComp{static_cast<int>(rng() % (n + 1))});
      const HermitianMoment mu = lambda_center_of_mass(cfg);
      worst_trace = std::max(worst_trace, std::fabs(mu.trace()));
      const HermitianMoment rm = moment_of_rnc(r.indices, r.weights, n);
      worst_volume = std::max(worst_volume, std::fabs(rm.trace() - static_cast<double>(m)));
    }
    if (worst_trace > 1e-12) out.pass = false;
    if (worst_volume > 1e-9) out.pass = false;
    detail << "trace " << fmt(worst_trace) << ", volume gap " << fmt(worst_volume);
  }

  {  // balance flow energy monotonicity, 200 feasible flows
    int violations = 0;
    std::uniform_real_distribution<double> w(0.2, 5.0);
    for (int i = 0; i < 200; ++i) {
      CycleConfig cfg;
      if (i % 2 == 0) {
        const int m = 2 + static_cast<int>(rng() % 6);
        cfg.n = m;
        cfg.lambda = 1.0;
        RncComp r;
        for (int j = 0; j <= m; ++j) {
          r.indices.push_back(j);
          r.weights.push_back(w(rng));
        }
        cfg.curve.push_back(r);
      } else {
        const int d = 3 + static_cast<int>(rng() % 5);
        const double lo = 1.0 / (d + 1.0) + 0.05;
        cfg = star_config(d, std::uniform_real_distribution<double>(lo, 0.95)(rng));
      }
      const BalanceResult res = balance_flow(cfg, 1e-9, 400);
      for (std::size_t h = 1; h < res.energy_history.size(); ++h)
        if (res.energy_history[h] > res.energy_history[h - 1] + 1e-12) ++violations;
      if (res.residual >= 1e-9) ++violations;
    }
    if (violations > 0) out.pass = false;
    detail << ", monotonicity violations " << violations;
  }

  {  // route equivalence in the regime overlap, 200 cases
    double worst = 0.0;
    std::uniform_real_distribution<double> pick_k(2000.0, 9000.0);
    for (int i = 0; i < 200; ++i) {
      const double k = pick_k(rng);
      const double lo = std::sqrt(k) / std::log(k), hi = std::sqrt(k) * std::log(k);
      const std::int64_t a = static_cast<std::int64_t>(
          std::llround(std::uniform_real_distribution<double>(lo * 1.3, std::min(hi * 0.7, 3.0 * std::sqrt(k)))(rng)));
      const ModelLevel level(k);
      worst = std::max(worst, std::fabs(mu_direct(level, a) - mu_neck(level, a)));
    }
    if (worst > 1e-3) out.pass = false;
    detail << ", route gap " << fmt(worst);
  }

  {  // cylinder/h consistency, 200 cases
    double worst = 0.0;
    std::uniform_real_distribution<double> pick_k(2000.0, 20000.0);
    for (int i = 0; i < 200; ++i) {
      const double k = pick_k(rng);
      const double lo = std::sqrt(k) / std::log(k), hi = std::sqrt(k) * std::log(k);
      const std::int64_t a = static_cast<std::int64_t>(
          std::llround(std::uniform_real_distribution<double>(lo * 1.2, hi * 0.8)(rng)));
      const ModelLevel level(k);
      const CylinderParams p(k, a);
      // Stay inside the common domain of f and the comb: u > -k/a.
      const double L = std::min(std::log(k) * std::log(k), 0.75 * k / static_cast<double>(a));
      const double u = std::uniform_real_distribution<double>(-L, L)(rng);
      const double lhs = neck_functions(level, a, u).h.logmag;
      const double rhs = cylinder_rho(p, u).logmag +
                         static_cast<double>(a) * static_cast<double>(a) * u * u / (2.0 * k);
      const double gap = std::fabs(lhs - rhs) / std::max(1.0, std::fabs(lhs));
      worst = std::max(worst, gap);
    }
    if (worst > 1e-12) out.pass = false;
    detail << ", cylinder gap " << fmt(worst);
  }

  out.detail = detail.str();
  return out;
}

}  // namespace

int main() {
  run_criterion(1, "monomial norms by quadrature, a <= 50, k in {10,100,1000}", 10, monomial_norms);
  run_criterion(2, "Gaussian-comb integral = 2 on 20 log-spaced b in [1e-2,1e2]", 5, theta_grid);
  run_criterion(3, "ladder integrals at k=400, n in {2..6}", 30, ladder_references);
  run_criterion(4, "mu_1 -> 1/2 and mu_a -> 1 at k=800 with shrinking deviations", 60,
                mu_small_indices);
  run_criterion(5, "neck mu at k=1e4, a in {50,100,200}, route agreement", 120, mu_neck_indices);
  run_criterion(6, "degenerate-cycle thresholds for (d,k) pairs at tol 1e-7", 60, chow_thresholds);
  run_criterion(7, "balance flow recovers binomial weights for degree <= 12", 30,
                veronese_recovery);
  run_criterion(8, "energy model positive, decreasing, slope <= -1.2 on k in {100..800}", 600,
                energy_decay);
  run_criterion(9, "invariant property suites (>= 200 randomized cases each)", 300,
                invariant_suites);
  if (g_failures > 0) std::printf("%d criterion(s) failed\n", g_failures);
  return g_failures;
}
