#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "logpair/model_kernel.hpp"
#include "logpair/neck.hpp"

using namespace logpair;

TEST_CASE("neck functions at the origin") {
  const ModelLevel level(10000.0);
  const std::int64_t a = 100;
  const NeckFunctions nf = neck_functions(level, a, 0.0);
  // c = 0 contributes 1, everything else is positive
  REQUIRE(nf.f.to_real() >= 1.0);
  // f = g (1 + eps): the truncation only removes far-out terms
  REQUIRE(std::fabs(std::expm1(nf.f.logmag - nf.g.logmag)) <= 1e-6);
}

TEST_CASE("neck preconditions") {
  const ModelLevel level(10000.0);
  REQUIRE_THROWS_AS(neck_functions(level, 2, 0.0), std::invalid_argument);  // Case II index
  const double too_far = 2.0 * std::log(1e4) * std::log(1e4) + 5.0;
  REQUIRE_THROWS_AS(neck_functions(level, 100, too_far), std::invalid_argument);
}

TEST_CASE("gaussian comb is symmetric and windowed on both sides") {
  const ModelLevel level(10000.0);
  for (const double u : {0.3, 2.5, 20.0}) {
    const NeckFunctions plus = neck_functions(level, 100, u);
    const NeckFunctions minus = neck_functions(level, 100, -u);
    REQUIRE(plus.h.logmag == Catch::Approx(minus.h.logmag).margin(1e-12));
  }
}

TEST_CASE("mu through the neck at k = 2500") {
  const ModelLevel level(2500.0);
  const std::int64_t a = 30;
  REQUIRE(classify_regime(level.k, static_cast<double>(a)) == Regime::CaseIII);
  const double neck = mu_neck(level, a);
  REQUIRE(std::fabs(neck - 1.0) <= 0.01);
  const double direct = mu_direct(level, a);
  REQUIRE(std::fabs(neck - direct) <= 1e-3);
}

TEST_CASE("integration by parts closes to 1e-5") {
  const ModelLevel level(2500.0);
  const IbpCheck c = ibp_check(level, 30);
  REQUIRE(c.lhs == Catch::Approx(c.rhs).epsilon(1e-5));
}

TEST_CASE("theta integral equals 2") {
  for (const double b : {0.1, 1.0, 10.0}) {
    REQUIRE(theta_identity(b) == Catch::Approx(2.0).margin(1e-8));
  }
  REQUIRE_THROWS_AS(theta_identity(0.0), std::invalid_argument);
}

TEST_CASE("theta integral equals 2 on a log grid") {
  for (int i = 0; i < 9; ++i) {
    const double b = 1e-2 * std::pow(10.0, 0.5 * i);
    REQUIRE(theta_identity(b) == Catch::Approx(2.0).margin(1e-8));
  }
}
