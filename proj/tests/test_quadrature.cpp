#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "logpair/quadrature.hpp"

using logpair::integrate_adaptive;
using logpair::LogReal;
using logpair::NonConvergence;
using logpair::QuadratureSpec;

namespace {

// Int_0^inf t^{k-2} e^{-a t} dt = (k-2)!/a^{k-1}, the workhorse reference.
double gamma_reference_log(double k, double a) {
  return std::lgamma(k - 1.0) - (k - 1.0) * std::log(a);
}

LogReal monomial_exp(double k, double a, double t) {
  if (t <= 0.0) return LogReal::zero();
  return LogReal::from_log((k - 2.0) * std::log(t) - a * t);
}

}  // namespace

TEST_CASE("exact exponential tail") {
  QuadratureSpec spec;
  auto f = [](double t) { return LogReal::from_log(-t); };
  const LogReal v = integrate_adaptive(f, spec);
  REQUIRE(v.to_real() == Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("polynomial on a finite interval") {
  QuadratureSpec spec;
  spec.lo = 0.0;
  spec.hi = 1.0;
  auto f = [](double x) { return LogReal::from_real(x * x * x); };
  REQUIRE(integrate_adaptive(f, spec).to_real() == Catch::Approx(0.25).epsilon(1e-13));
}

TEST_CASE("monomial times exponential, k=5 a=2") {
  QuadratureSpec spec;
  auto f = [](double t) { return monomial_exp(5.0, 2.0, t); };
  REQUIRE(integrate_adaptive(f, spec).to_real() == Catch::Approx(0.375).epsilon(1e-11));
}

TEST_CASE("gamma integrals across the k, a range") {
  const std::pair<double, double> cases[] = {{10, 1},   {10, 200},  {50, 7},    {200, 3},
                                             {617, 41}, {1000, 50}, {1500, 199}, {2000, 200},
                                             {2000, 1}, {37, 113}};
  for (const auto& [k, a] : cases) {
    QuadratureSpec spec;
    auto f = [k = k, a = a](double t) { return monomial_exp(k, a, t); };
    const LogReal v = integrate_adaptive(f, spec);
    REQUIRE(v.sign == 1);
    const double rel = std::fabs(std::expm1(v.logmag - gamma_reference_log(k, a)));
    INFO("k=" << k << " a=" << a << " rel=" << rel);
    REQUIRE(rel <= 1e-10);
  }
}

TEST_CASE("additivity under domain splitting") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> split(0.5, 40.0);
  for (int i = 0; i < 10; ++i) {
    const double k = 80.0, a = 3.0;
    const double mid = split(rng) * (k - 2.0) / a / 10.0;
    auto f = [=](double t) { return monomial_exp(k, a, t); };
    QuadratureSpec whole;
    QuadratureSpec left;
    left.lo = 0.0;
    left.hi = mid;
    QuadratureSpec right;
    right.lo = mid;
    const LogReal sum = integrate_adaptive(f, left) + integrate_adaptive(f, right);
    const LogReal direct = integrate_adaptive(f, whole);
    REQUIRE(sum.logmag == Catch::Approx(direct.logmag).margin(2e-10));
  }
}

TEST_CASE("depth exhaustion raises NonConvergence") {
  QuadratureSpec spec;
  spec.lo = 0.0;
  spec.hi = 1.0;
  spec.max_depth = 5;
  spec.rel_tol = 1e-13;
  auto f = [](double x) {
    return LogReal::from_log(-0.97 * std::log(std::fabs(x - 0.31830988618367) + 1e-300));
  };
  REQUIRE_THROWS_AS(integrate_adaptive(f, spec), NonConvergence);
}

TEST_CASE("spec invariants are enforced") {
  QuadratureSpec spec;
  spec.abs_tol = 0.0;
  auto f = [](double) { return LogReal::one(); };
  REQUIRE_THROWS_AS(integrate_adaptive(f, spec), std::invalid_argument);
  spec = {};
  spec.max_depth = 0;
  REQUIRE_THROWS_AS(integrate_adaptive(f, spec), std::invalid_argument);
  spec = {};
  spec.rel_tol = -1.0;
  REQUIRE_THROWS_AS(integrate_adaptive(f, spec), std::invalid_argument);
}

TEST_CASE("empty domain integrates to zero") {
  QuadratureSpec spec;
  spec.lo = 5.0;
  spec.hi = 5.0;
  auto f = [](double) { return LogReal::one(); };
  REQUIRE(integrate_adaptive(f, spec).is_zero());
}
