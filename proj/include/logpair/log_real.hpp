#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace logpair {

/// Signed scalar stored as a sign and the natural log of its magnitude.
///
/// Series terms such as a^{k-1} x^a overflow double long before the exponents
/// used in this library, so intermediate arithmetic carries log-magnitudes and
/// converts back to double only once a result is O(1).
struct LogReal {
  int sign = 0;  // -1, 0, +1
  double logmag = -std::numeric_limits<double>::infinity();  // meaningless when sign == 0

  constexpr LogReal() = default;
  constexpr LogReal(int s, double lm) : sign(s), logmag(lm) {}

  static constexpr LogReal zero() { return {}; }
  static constexpr LogReal one() { return {1, 0.0}; }

  /// exp(lm) with the given sign, exact in the log variable.
  static constexpr LogReal from_log(double lm, int s = 1) { return {s, lm}; }

  static LogReal from_real(double x) {
    if (x == 0.0) return {};
    return {x > 0.0 ? 1 : -1, std::log(std::fabs(x))};
  }

  double to_real() const { return sign == 0 ? 0.0 : static_cast<double>(sign) * std::exp(logmag); }

  bool is_zero() const { return sign == 0; }
  bool positive() const { return sign > 0; }

  LogReal abs() const { return {sign == 0 ? 0 : 1, logmag}; }

  // Products and quotients act on log-magnitudes exactly; no cancellation.
  friend constexpr LogReal operator*(LogReal a, LogReal b) {
    if (a.sign == 0 || b.sign == 0) return {};
    return {a.sign * b.sign, a.logmag + b.logmag};
  }
  friend constexpr LogReal operator/(LogReal a, LogReal b) {
    if (a.sign == 0) return {};
    return {a.sign * b.sign, a.logmag - b.logmag};
  }
  friend constexpr LogReal operator-(LogReal a) { return {-a.sign, a.logmag}; }

  friend LogReal operator+(LogReal a, LogReal b) {
    if (a.sign == 0) return b;
    if (b.sign == 0) return a;
    if (b.logmag > a.logmag) std::swap(a, b);
    const double s = a.sign + b.sign * std::exp(b.logmag - a.logmag);
    if (s == 0.0) return {};
    return {s > 0.0 ? 1 : -1, a.logmag + std::log(std::fabs(s))};
  }
  friend LogReal operator-(LogReal a, LogReal b) { return a + (-b); }
};

/// Signed sum of a list of terms, pivoting on the largest magnitude so no
/// intermediate overflows. Zero-sign entries are skipped; an empty list (or
/// exact cancellation) sums to zero.
inline LogReal log_sum_exp(std::span<const LogReal> terms) {
  double pivot = -std::numeric_limits<double>::infinity();
  for (const auto& t : terms)
    if (t.sign != 0 && t.logmag > pivot) pivot = t.logmag;
  if (pivot == -std::numeric_limits<double>::infinity()) return LogReal::zero();

  double acc = 0.0;
  for (const auto& t : terms)
    if (t.sign != 0) acc += static_cast<double>(t.sign) * std::exp(t.logmag - pivot);
  if (acc == 0.0) return LogReal::zero();
  return {acc > 0.0 ? 1 : -1, pivot + std::log(std::fabs(acc))};
}

inline LogReal log_sum_exp(const std::vector<LogReal>& terms) {
  return log_sum_exp(std::span<const LogReal>(terms.data(), terms.size()));
}

}  // namespace logpair
