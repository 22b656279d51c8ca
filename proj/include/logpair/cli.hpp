#pragma once

#include <atomic>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "logpair/balance.hpp"
#include "logpair/cycle_io.hpp"
#include "logpair/energy.hpp"
#include "logpair/ladder.hpp"
#include "logpair/model_kernel.hpp"
#include "logpair/neck.hpp"

namespace logpair::cli {

using Cell = std::variant<double, long long, std::string>;

struct Report {
  std::string command;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::map<std::string, Cell> scalars;
  std::vector<std::string> failures;

  void fail(const std::string& msg) { failures.push_back(msg); }
  bool pass() const { return failures.empty(); }
};

namespace detail {

inline std::string format_cell(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) {
    if (std::isnan(*d)) return "";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", *d);  // round-trip safe
    return buf;
  }
  if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
  return std::get<std::string>(c);
}

inline nlohmann::json cell_to_json(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) {
    if (std::isnan(*d)) return nullptr;
    return *d;
  }
  if (const auto* i = std::get_if<long long>(&c)) return *i;
  return std::get<std::string>(c);
}

}  // namespace detail

inline void write_report(const Report& rep, const std::string& format, std::ostream& out) {
  if (format == "json") {
    nlohmann::json j;
    j["schemaVersion"] = 1;
    j["command"] = rep.command;
    j["columns"] = rep.columns;
    j["rows"] = nlohmann::json::array();
    for (const auto& row : rep.rows) {
      nlohmann::json r = nlohmann::json::array();
      for (const auto& c : row) r.push_back(detail::cell_to_json(c));
      j["rows"].push_back(r);
    }
    for (const auto& [k, v] : rep.scalars) j[k] = detail::cell_to_json(v);
    j["failures"] = rep.failures;
    j["pass"] = rep.pass();
    out << j.dump(2) << "\n";
    return;
  }
  for (std::size_t i = 0; i < rep.columns.size(); ++i)
    out << rep.columns[i] << (i + 1 < rep.columns.size() ? "," : "");
  out << "\n";
  for (const auto& row : rep.rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      out << detail::format_cell(row[i]) << (i + 1 < row.size() ? "," : "");
    out << "\n";
  }
}

inline int emit(const Report& rep, const std::string& format, const std::string& out_path) {
  if (out_path.empty()) {
    write_report(rep, format, std::cout);
  } else {
    std::ofstream out(out_path);
    if (!out) {
      std::cerr << "cannot open output path " << out_path << "\n";
      return 2;
    }
    write_report(rep, format, out);
  }
  if (!rep.pass() && format != "json")
    for (const auto& f : rep.failures) std::cerr << "failure," << f << "\n";
  return rep.pass() ? 0 : 1;
}

/// Order-preserving parallel map over [0, n); each job must be a pure function.
template <class F>
void parallel_for(int threads, std::size_t n, F&& f) {
  threads = std::max(1, threads);
  if (threads == 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  const int count = std::min<std::size_t>(threads, n);
  pool.reserve(static_cast<std::size_t>(count));
  for (int t = 0; t < count; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) f(i);
    });
  for (auto& th : pool) th.join();
}

// ---------------------------------------------------------------------------
// Subcommand bodies.
// ---------------------------------------------------------------------------

inline Report run_model_mu(double k, std::vector<long long> a_list, bool sweep, double tol,
                           int threads) {
  Report rep;
  rep.command = "model-mu";
  rep.columns = {"a", "regime", "mu", "route", "dev"};
  const ModelLevel level(k);
  if (sweep) {
    const double s = std::sqrt(k), lg = std::log(k);
    for (long long a : {static_cast<long long>(1), static_cast<long long>(2), static_cast<long long>(3),
                        static_cast<long long>(std::llround(s / lg)) + 1,
                        static_cast<long long>(std::llround(s)),
                        static_cast<long long>(std::llround(0.5 * s * lg)),
                        static_cast<long long>(std::llround(1.2 * s * lg))})
      if (a >= 1) a_list.push_back(a);
  }
  std::sort(a_list.begin(), a_list.end());
  a_list.erase(std::unique(a_list.begin(), a_list.end()), a_list.end());

  struct Row {
    long long a;
    Regime regime;
    double mu;
    const char* route;
  };
  std::vector<Row> rows(a_list.size());
  parallel_for(threads, a_list.size(), [&](std::size_t i) {
    const long long a = a_list[i];
    const Regime r = classify_regime(k, static_cast<double>(a));
    const bool neck = (r == Regime::CaseIII);
    rows[i] = Row{a, r, neck ? mu_neck(level, a) : mu_direct(level, a), neck ? "neck" : "direct"};
  });
  for (const auto& row : rows) {
    const double expected = row.a == 1 ? 0.5 : 1.0;
    const double dev = std::fabs(row.mu - expected);
    rep.rows.push_back({row.a, std::string(regime_name(row.regime)), row.mu, std::string(row.route), dev});
    if (dev > tol)
      rep.fail("mu_" + std::to_string(row.a) + " deviates " + std::to_string(dev) +
               " from expected (tol " + std::to_string(tol) + ")");
  }
  return rep;
}

inline Report run_theta_check(std::vector<double> bs, double grid_lo, double grid_hi, int grid_n,
                              double tol, int threads) {
  Report rep;
  rep.command = "theta-check";
  rep.columns = {"b", "integral", "dev"};
  if (grid_n > 0) {
    const double step = grid_n > 1 ? std::log(grid_hi / grid_lo) / (grid_n - 1) : 0.0;
    for (int i = 0; i < grid_n; ++i) bs.push_back(grid_lo * std::exp(step * i));
  }
  std::vector<double> vals(bs.size());
  parallel_for(threads, bs.size(), [&](std::size_t i) { vals[i] = theta_identity(bs[i]); });
  for (std::size_t i = 0; i < bs.size(); ++i) {
    const double dev = std::fabs(vals[i] - 2.0);
    rep.rows.push_back({bs[i], vals[i], dev});
    if (dev > tol)
      rep.fail("theta(" + std::to_string(bs[i]) + ") deviates " + std::to_string(dev));
  }
  return rep;
}

inline Report run_ladder_table(double k, int n_max, double tol, double eps_tol, int threads) {
  Report rep;
  rep.command = "ladder-table";
  rep.columns = {"n", "a", "I", "Iprime", "refI", "refIprime", "devI", "devIprime"};
  struct Job {
    int n;
    long long a;
  };
  std::vector<Job> jobs;
  for (int n = 2; n <= n_max; ++n)
    for (long long a = std::max<long long>(0, n - 2); a <= n + 2; ++a) jobs.push_back({n, a});
  std::vector<LadderIntegrals> vals(jobs.size());
  parallel_for(threads, jobs.size(), [&](std::size_t i) {
    vals[i] = ladder_integrals(k, jobs[i].a, jobs[i].n);
  });
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const auto [n, a] = jobs[i];
    auto ref = [&](bool prime) {
      if (!prime) {
        if (a == n) return 0.375;
        if (a == n - 1) return 0.125;
        return 0.0;
      }
      if (a == n) return 0.375;
      if (a == n + 1) return 0.125;
      return 0.0;
    };
    const double rI = ref(false), rIp = ref(true);
    const double dI = std::fabs(vals[i].first - rI);
    const double dIp = std::fabs(vals[i].second - rIp);
    rep.rows.push_back({static_cast<long long>(n), a, vals[i].first, vals[i].second, rI, rIp, dI, dIp});
    const double tolI = rI == 0.0 ? eps_tol : tol;
    const double tolIp = rIp == 0.0 ? eps_tol : tol;
    if (dI > tolI)
      rep.fail("I(a=" + std::to_string(a) + ",n=" + std::to_string(n) + ") off by " + std::to_string(dI));
    if (dIp > tolIp)
      rep.fail("I'(a=" + std::to_string(a) + ",n=" + std::to_string(n) + ") off by " + std::to_string(dIp));
  }
  return rep;
}

inline Report run_chow_verify(long long d, long long k, double tol) {
  Report rep;
  rep.command = "chow-verify";
  rep.columns = {"d", "k", "lambda_num", "lambda_den", "residual", "residual_minus",
                 "residual_plus", "measured_lambda", "measured_residual", "flow_iterations"};
  const Theorem41Report r = verify_theorem41(d, k, tol);
  rep.rows.push_back({d, k, r.lambda.num, r.lambda.den, r.residual, r.residual_minus,
                      r.residual_plus, r.measured_lambda, r.measured_residual,
                      static_cast<long long>(r.flow_iterations)});
  rep.scalars["balanced"] = std::string(r.balanced ? "true" : "false");
  rep.scalars["strict_window"] = std::string(r.strict_window ? "true" : "false");
  if (!r.balanced)
    rep.fail("residual " + std::to_string(r.residual) + " at lambda=" + std::to_string(r.lambda.value()) +
             " above tol " + std::to_string(tol) + " (cycle balances at lambda=" +
             std::to_string(r.measured_lambda) + ")");
  if (!r.strict_window) rep.fail("residual did not rise in the lambda window");
  return rep;
}

inline Report run_energy_scan(int genus, long long l, long long d, std::vector<long long> ks,
                              const std::string& plot_path, int threads) {
  Report rep;
  rep.command = "energy-scan";
  rep.columns = {"k", "energy", "slope"};
  const SurfaceData surface(genus, l, d);
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());

  // One mu table per k; entries are independent, so parallelize across all (k, a).
  std::vector<std::map<long long, double>> mus(ks.size());
  struct Job {
    std::size_t ki;
    long long a;
  };
  std::vector<Job> jobs;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    mus[i] = {};
    for (long long a = 1; a <= cusp_index_cut(ks[i]); ++a) jobs.push_back({i, a});
  }
  std::vector<double> vals(jobs.size());
  parallel_for(threads, jobs.size(), [&](std::size_t j) {
    const ModelLevel level(rescaled_level(surface, ks[jobs[j].ki]));
    const Regime r = classify_regime(level.k, static_cast<double>(jobs[j].a));
    vals[j] = (r == Regime::CaseIII) ? mu_neck(level, jobs[j].a) : mu_direct(level, jobs[j].a);
  });
  for (std::size_t j = 0; j < jobs.size(); ++j) mus[jobs[j].ki][jobs[j].a] = vals[j];

  std::vector<EnergyRow> rows;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    EnergyRow row;
    row.k = ks[i];
    row.energy = assemble_energy(surface, ks[i], mus[i]).energy;
    if (!rows.empty())
      row.slope = (std::log(row.energy) - std::log(rows.back().energy)) /
                  (std::log(static_cast<double>(row.k)) - std::log(static_cast<double>(rows.back().k)));
    rows.push_back(row);
  }
  for (const auto& r : rows) {
    rep.rows.push_back({r.k, r.energy, r.slope});
    if (!(r.energy > 0.0)) rep.fail("energy not positive at k=" + std::to_string(r.k));
  }
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (!(rows[i].energy < rows[i - 1].energy))
      rep.fail("energy not decreasing at k=" + std::to_string(rows[i].k));

  if (!plot_path.empty()) {
    std::ofstream plot(plot_path);
    if (!plot) {
      rep.fail("cannot write plot data to " + plot_path);
    } else {
      char buf[96];
      for (const auto& r : rows) {
        std::snprintf(buf, sizeof(buf), "%.17g %.17g\n", std::log(static_cast<double>(r.k)),
                      std::log(r.energy));
        plot << buf;
      }
    }
  }
  return rep;
}

inline Report run_balance_flow(const std::string& config_path, double tol, int max_iter) {
  Report rep;
  rep.command = "balance-flow";
  rep.columns = {"index", "tau", "weight"};
  const CycleConfig cfg = load_cycle_config(config_path);
  try {
    const BalanceResult res = balance_flow(cfg, tol, max_iter);
    for (std::size_t i = 0; i < res.weights.size(); ++i)
      rep.rows.push_back({static_cast<long long>(i), res.tau[i], res.weights[i]});
    rep.scalars["residual"] = res.residual;
    rep.scalars["iterations"] = static_cast<long long>(res.iterations);
    rep.scalars["energy_initial"] = res.energy_history.front();
    rep.scalars["energy_final"] = res.energy_history.back();
  } catch (const MaxIterExceeded& e) {
    rep.scalars["residual"] = e.best_residual;
    rep.scalars["iterations"] = static_cast<long long>(e.iterations);
    rep.scalars["tau_norm"] = e.tau_norm;
    rep.fail(e.what());
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Argument surface.
// ---------------------------------------------------------------------------

inline int run_cli(int argc, const char* const* argv) {
  CLI::App app{"model Bergman kernel of the hyperbolic punctured disk and "
               "lambda-balanced moment maps for log pairs"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  std::string format = "csv";
  std::string out_path;
  int threads = 1;
  app.add_option("--format", format, "output format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--out", out_path, "write the report to this path instead of stdout");
  app.add_option("--threads", threads, "parallelism for independent evaluations")
      ->check(CLI::PositiveNumber);

  // model-mu
  auto* mu_cmd = app.add_subcommand("model-mu", "center-of-mass integrals mu_a on the model");
  double mu_k = 400.0;
  std::vector<long long> mu_as;
  bool mu_sweep = false;
  double mu_tol = 0.01;
  mu_cmd->add_option("--k", mu_k, "model level")->required();
  mu_cmd->add_option("--a", mu_as, "basis indices (repeatable)");
  mu_cmd->add_flag("--sweep", mu_sweep, "add one index per regime");
  mu_cmd->add_option("--tol", mu_tol, "asserted deviation from the expected value");

  // theta-check
  auto* theta_cmd = app.add_subcommand("theta-check", "Gaussian-comb integral, expected 2");
  std::vector<double> theta_bs;
  double theta_lo = 1e-2, theta_hi = 1e2;
  int theta_n = 0;
  double theta_tol = 1e-8;
  theta_cmd->add_option("--b", theta_bs, "quadratic coefficients (repeatable)");
  theta_cmd->add_option("--grid-lo", theta_lo, "log-grid start");
  theta_cmd->add_option("--grid-hi", theta_hi, "log-grid end");
  theta_cmd->add_option("--grid-n", theta_n, "log-grid size (0 = no grid)");
  theta_cmd->add_option("--tol", theta_tol, "asserted |integral - 2|");

  // ladder-table
  auto* ladder_cmd = app.add_subcommand("ladder-table", "two-term interval integrals I, I'");
  double ladder_k = 400.0;
  int ladder_nmax = 6;
  double ladder_tol = 0.01, ladder_eps_tol = 1e-4;
  ladder_cmd->add_option("--k", ladder_k, "series exponent")->required();
  ladder_cmd->add_option("--nmax", ladder_nmax, "largest interval index");
  ladder_cmd->add_option("--tol", ladder_tol, "asserted deviation from 3/8 and 1/8");
  ladder_cmd->add_option("--eps-tol", ladder_eps_tol, "asserted size of the negligible integrals");

  // chow-verify
  auto* chow_cmd = app.add_subcommand("chow-verify", "balanced degenerate cycles in P^{kd}");
  long long chow_d = 3, chow_k = 1;
  double chow_tol = 1e-7;
  chow_cmd->add_option("--d", chow_d, "number of divisor points")->required();
  chow_cmd->add_option("--k", chow_k, "embedding level")->required();
  chow_cmd->add_option("--tol", chow_tol, "asserted residual at lambda_k");

  // energy-scan
  auto* energy_cmd = app.add_subcommand("energy-scan", "balancing-energy model over a k grid");
  int energy_genus = 0;
  long long energy_l = 3, energy_d = 3;
  std::vector<long long> energy_ks;
  std::string plot_path;
  energy_cmd->add_option("--genus", energy_genus, "genus");
  energy_cmd->add_option("--l", energy_l, "polarization degree")->required();
  energy_cmd->add_option("--d", energy_d, "number of cusps")->required();
  energy_cmd->add_option("--k", energy_ks, "levels (repeatable)")->required();
  energy_cmd->add_option("--plot-out", plot_path, "write (log k, log energy) pairs here");

  // balance-flow
  auto* flow_cmd = app.add_subcommand("balance-flow", "balance a cycle configuration");
  std::string flow_config;
  double flow_tol = 1e-9;
  int flow_maxiter = 500;
  flow_cmd->add_option("--config", flow_config, "cycle configuration (JSON)")->required();
  flow_cmd->add_option("--tol", flow_tol, "target residual");
  flow_cmd->add_option("--maxiter", flow_maxiter, "iteration cap");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    Report rep;
    if (mu_cmd->parsed()) rep = run_model_mu(mu_k, mu_as, mu_sweep, mu_tol, threads);
    else if (theta_cmd->parsed()) rep = run_theta_check(theta_bs, theta_lo, theta_hi, theta_n, theta_tol, threads);
    else if (ladder_cmd->parsed()) rep = run_ladder_table(ladder_k, ladder_nmax, ladder_tol, ladder_eps_tol, threads);
    else if (chow_cmd->parsed()) rep = run_chow_verify(chow_d, chow_k, chow_tol);
    else if (energy_cmd->parsed()) rep = run_energy_scan(energy_genus, energy_l, energy_d, energy_ks, plot_path, threads);
    else if (flow_cmd->parsed()) rep = run_balance_flow(flow_config, flow_tol, flow_maxiter);
    return emit(rep, format, out_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace logpair::cli
