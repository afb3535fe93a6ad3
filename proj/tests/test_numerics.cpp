#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "dwellflux/numerics.hpp"

using namespace dwell;

TEST_CASE("polynomial and exponential integrals") {
  auto r = integrate([](double x) { return x * x; }, 0.0, 3.0);
  CHECK(r.value == doctest::Approx(9.0).epsilon(1e-14));
  auto e = integrate([](double x) { return std::exp(-x); }, 0.0, kInf);
  CHECK(e.value == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("endpoint singularity at a marked point") {
  QuadratureSpec spec;
  spec.singular_points = {0.0};
  auto r = integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, spec);
  CHECK(r.value == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("complex oscillatory integral") {
  using C = std::complex<double>;
  const double w = 50.0;
  auto r = integrate_oscillatory<C>([&](double x) { return std::exp(C(0, w * x)); }, 0.0, 1.0,
                                     2.0 * std::numbers::pi / w);
  const C exact = (std::exp(C(0, w)) - 1.0) / C(0, w);
  CHECK(std::abs(r.value - exact) < 1e-12);
}

TEST_CASE("piecewise integral with kinks") {
  auto r = integrate_piecewise([](double x) { return std::abs(x - 0.3) + std::abs(x - 0.7); }, 0.0, 1.0,
                               {0.3, 0.7});
  CHECK(r.value == doctest::Approx(0.58).epsilon(1e-13));
}

TEST_CASE("invalid interval throws") {
  CHECK_THROWS_AS(integrate([](double x) { return x; }, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("subdivision limit reports non-convergence") {
  QuadratureSpec spec;
  spec.max_subdivisions = 64;
  spec.rel_tol = 1e-14;
  spec.abs_tol = 1e-15;
  CHECK_THROWS_AS(integrate([](double x) { return std::sin(1.0 / x); }, 1e-6, 1.0, spec), ConvergenceError);
}

TEST_CASE("bracket and refine finds all simple roots") {
  auto roots = bracket_and_refine([](double x) { return std::sin(x); }, 0.5, 10.0, 200);
  REQUIRE(roots.size() == 3);
  for (int i = 0; i < 3; ++i) CHECK(roots[i] == doctest::Approx((i + 1) * std::numbers::pi).epsilon(1e-12));
}

TEST_CASE("richardson removes linear and quadratic terms") {
  ExtrapolationLadder l{{0.4, 0.2, 0.1}, {}};
  for (double h : l.parameters) l.values.push_back(2.0 + 3.0 * h + 5.0 * h * h);
  auto e = richardson(l);
  CHECK(e.limit == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(e.monotone);
}

TEST_CASE("second derivative by finite differences") {
  const double d = second_derivative_fd([](double x) { return std::sin(x); }, 0.7, 1e-2);
  CHECK(d == doctest::Approx(-std::sin(0.7)).epsilon(1e-9));
}
