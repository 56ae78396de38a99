#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "lpzeros/quadrature.hpp"
#include "oracles.hpp"

using namespace lpzeros;

TEST_CASE("two-point Gauss-Legendre on the reference interval") {
  const auto rule = build_rule(BaseMeasure<double>::lebesgue({-1, 1}, 1, 2));
  REQUIRE(rule.size() == 2);
  CHECK(rule.nodes(0) == doctest::Approx(-1 / std::sqrt(3.0)).epsilon(1e-15));
  CHECK(rule.nodes(1) == doctest::Approx(1 / std::sqrt(3.0)).epsilon(1e-15));
  CHECK(rule.weights(0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(rule.weights(1) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("discrete base returns its atoms") {
  const auto rule = build_rule(BaseMeasure<double>::discrete({{-1, 0.5}, {1, 0.5}}));
  REQUIRE(rule.size() == 2);
  CHECK(rule.nodes(0) == -1);
  CHECK(rule.nodes(1) == 1);
  CHECK(rule.weights(0) == 0.5);
  CHECK(rule.weights(1) == 0.5);
}

TEST_CASE("breakpoints split panels") {
  const std::vector<double> bps{0.0};
  const auto base = BaseMeasure<double>::lebesgue({-1, 1}, 1, 8);
  const auto rule = build_rule<double>(base, bps);
  REQUIRE(rule.size() == 16);
  for (int i = 0; i < 8; ++i) CHECK(rule.nodes(i) < 0);
  for (int i = 8; i < 16; ++i) CHECK(rule.nodes(i) > 0);
  const double x2 = integrate(rule, [](double x) { return x * x; });
  CHECK(std::abs(x2 - 2.0 / 3.0) <= 1e-13);

  // breakpoints outside the support and duplicates of panel edges are ignored
  const std::vector<double> outside{-3.0, -1.0, 0.0, 0.0, 2.0};
  CHECK(build_rule<double>(base, outside).size() == 16);
}

TEST_CASE("integrate: constants, odd symmetry, x^6") {
  const auto rule = build_rule(BaseMeasure<double>::lebesgue({-1, 1}));
  CHECK(std::abs(integrate(rule, [](double) { return 1.0; }) - 2.0) <= 1e-13);
  CHECK(std::abs(integrate(rule, [](double x) { return x; })) <= 1e-13);
  const auto small = build_rule(BaseMeasure<double>::lebesgue({-1, 1}, 1, 4));
  CHECK(std::abs(integrate(small, [](double x) { return std::pow(x, 6); }) - 2.0 / 7.0) <= 1e-12);
}

TEST_CASE("rule exactness on monomials up to degree 2m - 1") {
  for (int npp : {2, 3, 5, 8, 16, 64}) {
    for (int panels : {1, 3}) {
      const double a = 0.5, b = 2.0;
      const auto rule = build_rule(BaseMeasure<double>::lebesgue({a, b}, panels, npp));
      for (int m = 0; m <= 2 * npp - 1; ++m) {
        const double exact = oracle::monomial_integral(m, a, b);
        const double got = integrate(rule, [m](double x) { return std::pow(x, m); });
        INFO("npp=" << npp << " panels=" << panels << " m=" << m);
        CHECK(std::abs(got - exact) <= 1e-12 * std::abs(exact));
      }
      CHECK((rule.weights.array() > 0).all());
    }
  }
}

TEST_CASE("long double instantiation reaches extended precision") {
  const auto rule = build_rule(BaseMeasure<long double>::lebesgue({-1, 1}, 1, 20));
  const long double got = integrate(rule, [](long double x) { return std::pow(x, 38); });
  const long double exact = 2.0L / 39.0L;
  CHECK(std::abs(static_cast<double>((got - exact) / exact)) <= 1e-17);
}

TEST_CASE("errors") {
  CHECK_THROWS_AS(BaseMeasure<double>::lebesgue({1, -1}), ConfigError);
  CHECK_THROWS_AS(BaseMeasure<double>::lebesgue({-1, 1}, 0, 4), ConfigError);
  CHECK_THROWS_AS(BaseMeasure<double>::lebesgue({-1, 1}, 1, 1), ConfigError);
  CHECK_THROWS_AS(BaseMeasure<double>::discrete({}), ConfigError);
  CHECK_THROWS_AS(BaseMeasure<double>::discrete({{0, 1}, {0, 1}}), ConfigError);
  CHECK_THROWS_AS(BaseMeasure<double>::discrete({{0, -1}}), ConfigError);

  const auto rule = build_rule(BaseMeasure<double>::lebesgue({-1, 1}, 1, 2));
  try {
    integrate(rule, [](double x) { return x > 0 ? std::numeric_limits<double>::infinity() : 0.0; });
    FAIL("expected NumericError");
  } catch (const NumericError& e) {
    CHECK(e.node() == doctest::Approx(1 / std::sqrt(3.0)));
  }
}
