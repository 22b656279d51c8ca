#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>

#include "logpair/log_real.hpp"

using logpair::LogReal;
using logpair::log_sum_exp;

TEST_CASE("round trip through to_real") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> mag(-200.0, 200.0);
  for (int i = 0; i < 1000; ++i) {
    const double x = (i % 2 ? -1.0 : 1.0) * std::exp(mag(rng));
    const LogReal lr = LogReal::from_real(x);
    REQUIRE(lr.to_real() == Catch::Approx(x).epsilon(1e-14));
  }
  REQUIRE(LogReal::from_real(0.0).is_zero());
  REQUIRE(LogReal::from_real(0.0).to_real() == 0.0);
}

TEST_CASE("product rule adds log magnitudes exactly") {
  const LogReal a = LogReal::from_log(1234.5, -1);
  const LogReal b = LogReal::from_log(-987.25, -1);
  const LogReal p = a * b;
  REQUIRE(p.sign == 1);
  REQUIRE(p.logmag == 1234.5 + -987.25);
  REQUIRE((a / b).logmag == 1234.5 - -987.25);
  REQUIRE((a * LogReal::zero()).is_zero());
}

TEST_CASE("log_sum_exp basics") {
  SECTION("1 + 1 = 2") {
    std::vector<LogReal> terms{LogReal::from_real(1.0), LogReal::from_real(1.0)};
    const LogReal s = log_sum_exp(terms);
    REQUIRE(s.sign == 1);
    REQUIRE(s.logmag == Catch::Approx(std::log(2.0)).margin(1e-15));
  }
  SECTION("single term is the identity") {
    std::vector<LogReal> terms{LogReal::from_log(-4321.0, -1)};
    const LogReal s = log_sum_exp(terms);
    REQUIRE(s.sign == -1);
    REQUIRE(s.logmag == -4321.0);
  }
  SECTION("huge terms pivot on the max") {
    // e^1000 + e^998 = e^(1000 + log(1 + e^-2)); reference value computed with
    // 30-digit arithmetic.
    std::vector<LogReal> terms{LogReal::from_log(1000.0), LogReal::from_log(998.0)};
    const LogReal s = log_sum_exp(terms);
    REQUIRE(s.sign == 1);
    REQUIRE(s.logmag == Catch::Approx(1000.12692801104297249644372681).epsilon(1e-15));
  }
  SECTION("empty and zero-sign input") {
    REQUIRE(log_sum_exp(std::vector<LogReal>{}).is_zero());
    std::vector<LogReal> zeros{LogReal::zero(), LogReal::zero()};
    REQUIRE(log_sum_exp(zeros).is_zero());
  }
  SECTION("exact cancellation") {
    std::vector<LogReal> terms{LogReal::from_log(5.0, 1), LogReal::from_log(5.0, -1)};
    REQUIRE(log_sum_exp(terms).is_zero());
  }
  SECTION("mixed signs") {
    // e^2 - e^1 - e^0
    std::vector<LogReal> terms{LogReal::from_log(2.0, 1), LogReal::from_log(1.0, -1),
                               LogReal::from_log(0.0, -1)};
    const double expected = std::exp(2.0) - std::exp(1.0) - 1.0;
    REQUIRE(log_sum_exp(terms).to_real() == Catch::Approx(expected).epsilon(1e-14));
  }
}

TEST_CASE("log_sum_exp is permutation invariant to 1e-13") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> mag(-50.0, 50.0);
  std::uniform_int_distribution<int> sgn(0, 1);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<LogReal> terms;
    for (int i = 0; i < 64; ++i) terms.push_back(LogReal::from_log(mag(rng), sgn(rng) ? 1 : -1));
    const LogReal base = log_sum_exp(terms);
    for (int shuffle = 0; shuffle < 4; ++shuffle) {
      std::shuffle(terms.begin(), terms.end(), rng);
      const LogReal again = log_sum_exp(terms);
      if (base.is_zero()) {
        REQUIRE(again.is_zero());
      } else {
        REQUIRE(again.sign == base.sign);
        REQUIRE(again.logmag == Catch::Approx(base.logmag).margin(1e-13));
      }
    }
  }
}

TEST_CASE("binary addition agrees with list form") {
  const LogReal a = LogReal::from_log(700.0, 1);
  const LogReal b = LogReal::from_log(699.0, -1);
  std::vector<LogReal> terms{a, b};
  const LogReal s1 = a + b;
  const LogReal s2 = log_sum_exp(terms);
  REQUIRE(s1.sign == s2.sign);
  REQUIRE(s1.logmag == Catch::Approx(s2.logmag).margin(1e-14));
}
