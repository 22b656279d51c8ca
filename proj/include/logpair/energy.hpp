#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "logpair/errors.hpp"
#include "logpair/model_kernel.hpp"
#include "logpair/neck.hpp"

namespace logpair {

/// A polarized log curve: genus g, polarization degree l, d cusps. The
/// hyperbolic condition is d > chi(X); the scalar curvature of the cusp
/// metric is then S = -(d + 2g - 2)/l < 0.
struct SurfaceData {
  int genus = 0;
  long long degree_l = 1;
  long long cusps_d = 1;

  SurfaceData(int g, long long l, long long d) : genus(g), degree_l(l), cusps_d(d) {
    if (g < 0 || l < 1 || d < 1) throw std::invalid_argument("SurfaceData: bad parameters");
    if (!(d > 2 - 2 * g)) throw std::invalid_argument("SurfaceData: need d > 2 - 2g");
  }
  double scalar_curvature() const {
    return -static_cast<double>(cusps_d + 2 * genus - 2) / static_cast<double>(degree_l);
  }
  /// dim of the L^2 section space at level k: kl - d - g + 1 (Riemann-Roch).
  long long dim(long long k) const { return k * degree_l - cusps_d - genus + 1; }
};

/// c~_k = (kl - d + d/2)/(kl - d - g + 1) = 1 - (S/2) k^{-1} + O(k^{-2}).
inline double c_tilde_k(const SurfaceData& s, long long k) {
  const double denom = static_cast<double>(s.dim(k));
  if (!(denom > 0.0)) throw std::invalid_argument("c_tilde_k: kl - d - g + 1 must be positive");
  const double numer = static_cast<double>(k * s.degree_l - s.cusps_d) +
                       0.5 * static_cast<double>(s.cusps_d);
  return numer / denom;
}

/// First-order expansion 1 - S/(2k) of c~_k.
inline double c_tilde_k_first_order(const SurfaceData& s, long long k) {
  return 1.0 - s.scalar_curvature() / (2.0 * static_cast<double>(k));
}

/// Model level matching the local cusp geometry: omega = -(2/S) omega_0, so
/// the punctured-disk computations run at -2k/S.
inline double rescaled_level(const SurfaceData& s, long long k) {
  return -2.0 * static_cast<double>(k) / s.scalar_curvature();
}

/// Cusp index range a <= 2 sqrt(k) log k handled through the model kernel.
inline long long cusp_index_cut(long long k) {
  const double kd = static_cast<double>(k);
  return static_cast<long long>(std::floor(2.0 * std::sqrt(kd) * std::log(kd)));
}

/// Knobs of the deviation model: the O(k^-2) constant, the exponent of the
/// rapidly-decaying class (eps(k) = k^-eps_pow), and which class the
/// cusp-bulk cross pairs land in.
struct EnergyParams {
  double C = 1.0;
  double eps_pow = 10.0;
  bool cusp_bulk_as_eps = false;
};

/// Per-entry accounting of the deviation model at one level. Counts add up to
/// the full (N_k+1)^2 matrix.
struct DeviationLedger {
  long long k = 0;
  double model_level = 0.0;
  double c_tilde = 0.0;
  std::vector<std::pair<long long, double>> diag_neck;  // (a, deviation) for one cusp
  double neck_sum_one_cusp = 0.0;                        // sum of squared neck deviations
  long long neck_count = 0;                              // d * a_cut
  long long bulk_count = 0;
  double bulk_deviation = 0.0;
  long long cusp_pair_count = 0;
  double eps_value = 0.0;
  long long other_pair_count = 0;
  double other_bound = 0.0;

  long long entries_accounted() const {
    return neck_count + bulk_count + cusp_pair_count + other_pair_count;
  }
};

struct EnergyBreakdown {
  double energy = 0.0;
  DeviationLedger ledger;
};

/// Model mu_a values for one cusp at level k, a = 1..cusp_index_cut(k),
/// computed at the rescaled level. Case III indices go through the neck
/// route, everything else through the direct series integral.
inline std::map<long long, double> model_mu_map(const SurfaceData& s, long long k) {
  const ModelLevel level(rescaled_level(s, k));
  const long long cut = cusp_index_cut(k);
  std::map<long long, double> mus;
  for (long long a = 1; a <= cut; ++a) {
    const Regime r = classify_regime(level.k, static_cast<double>(a));
    mus[a] = (r == Regime::CaseIII) ? mu_neck(level, a) : mu_direct(level, a);
  }
  return mus;
}

/// Squared deviation of the embedding from 2/3-balance, assembled from the
/// computed cusp diagonals plus the bulk and off-diagonal bound classes:
///   - cusp diagonal (i, a), a >= 2: mu_a(model) - c~_k
///   - cusp diagonal (i, 1): mu_1(model) + 1/2 - c~_k
///   - bulk diagonal: 1 - S/(2k) + C k^-2 - c~_k
///   - off-diagonal: eps(k) for cusp-cusp pairs, C k^-2 otherwise.
inline EnergyBreakdown assemble_energy(const SurfaceData& s, long long k,
                                       const std::map<long long, double>& mus,
                                       const EnergyParams& params = {}) {
  const long long n1 = s.dim(k);
  if (n1 <= 0) throw std::invalid_argument("assemble_energy: section space is empty");
  const long long cut = cusp_index_cut(k);
  const long long neck_count = s.cusps_d * cut;
  if (neck_count > n1)
    throw std::invalid_argument("assemble_energy: cusp indices exceed the section space; k too small");
  for (long long a = 1; a <= cut; ++a)
    if (!mus.count(a)) throw MissingMu("assemble_energy: mu_" + std::to_string(a) + " not supplied");

  const double kd = static_cast<double>(k);
  const double ct = c_tilde_k(s, k);

  DeviationLedger led;
  led.k = k;
  led.model_level = rescaled_level(s, k);
  led.c_tilde = ct;
  led.neck_count = neck_count;

  double neck_sum = 0.0;
  for (long long a = 1; a <= cut; ++a) {
    const double mu = mus.at(a);
    const double dev = (a == 1) ? (mu + 0.5 - ct) : (mu - ct);
    led.diag_neck.emplace_back(a, dev);
    neck_sum += dev * dev;
  }
  led.neck_sum_one_cusp = neck_sum;

  led.bulk_count = n1 - neck_count;
  led.bulk_deviation = 1.0 - s.scalar_curvature() / (2.0 * kd) + params.C / (kd * kd) - ct;

  const long long total_pairs = n1 * n1 - n1;
  long long cusp_pairs = neck_count * neck_count - neck_count;
  if (params.cusp_bulk_as_eps) cusp_pairs += 2 * neck_count * led.bulk_count;
  led.cusp_pair_count = cusp_pairs;
  led.other_pair_count = total_pairs - cusp_pairs;
  led.eps_value = std::pow(kd, -params.eps_pow);
  led.other_bound = params.C / (kd * kd);

  EnergyBreakdown out;
  out.ledger = led;
  out.energy = static_cast<double>(s.cusps_d) * neck_sum +
               static_cast<double>(led.bulk_count) * led.bulk_deviation * led.bulk_deviation +
               static_cast<double>(led.cusp_pair_count) * led.eps_value * led.eps_value +
               static_cast<double>(led.other_pair_count) * led.other_bound * led.other_bound;
  return out;
}

struct EnergyRow {
  long long k = 0;
  double energy = 0.0;
  double slope = std::numeric_limits<double>::quiet_NaN();  // local log-log slope vs previous row
};

/// Energy over an increasing k grid with local log-log slopes.
inline std::vector<EnergyRow> scan_energy(const SurfaceData& s, const std::vector<long long>& ks,
                                          const EnergyParams& params = {}) {
  if (ks.empty()) throw std::invalid_argument("scan_energy: empty k list");
  for (std::size_t i = 1; i < ks.size(); ++i)
    if (ks[i] <= ks[i - 1]) throw std::invalid_argument("scan_energy: k list must be increasing");
  std::vector<EnergyRow> rows;
  for (const long long k : ks) {
    EnergyRow row;
    row.k = k;
    row.energy = assemble_energy(s, k, model_mu_map(s, k), params).energy;
    if (!rows.empty()) {
      row.slope = (std::log(row.energy) - std::log(rows.back().energy)) /
                  (std::log(static_cast<double>(k)) - std::log(static_cast<double>(rows.back().k)));
    }
    rows.push_back(row);
  }
  return rows;
}

/// Least-squares slope of log(energy) against log(k).
inline double log_log_slope(const std::vector<EnergyRow>& rows) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double n = static_cast<double>(rows.size());
  for (const auto& r : rows) {
    const double x = std::log(static_cast<double>(r.k));
    const double y = std::log(r.energy);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace logpair
