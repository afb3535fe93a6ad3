#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dwellflux/ffcf.hpp"
#include "dwellflux/freemotion.hpp"

using namespace dwell;

TEST_CASE("analytic kernel matches finite differences of f") {
  const UnitSystem u;
  for (double L : {3.0, 20.0}) {
    const Region r(0.0, L);
    for (double k : {0.5, 1.0, 3.0}) {
      for (double s : {0.1, 0.33, 0.67, 1.67, 5.0}) {
        const double tau = s * L;
        const auto a = kernel_diag(k, tau, r, u);
        const auto b = kernel_diag_fd(k, tau, r, u);
        CAPTURE(L);
        CAPTURE(k);
        CAPTURE(tau);
        CHECK(std::abs(a - b) <= 1e-6 * std::abs(a));
      }
    }
  }
}

TEST_CASE("fixed-k kernel moments at k = 1, L = 3") {
  const Region r(0.0, 3.0);
  const UnitSystem u;
  const auto d = onshell_moments(1.0, r, u);
  const auto m1 = kernel_moment(1.0, r, u, 1);
  const auto m2 = kernel_moment(1.0, r, u, 2);
  const auto m3 = kernel_moment(1.0, r, u, 3);
  CHECK(m1.value == doctest::Approx(d.m1).epsilon(1e-3));
  CHECK(m2.value == doctest::Approx(d.m2).epsilon(1e-3));
  CHECK(m3.value == doctest::Approx(pm_third_moment(1.0, r, u)).epsilon(2e-3));
  CHECK(std::abs(m3.value - d.m3) > 0.5 * d.m3);
  CHECK(kernel_moment(1.0, r, u, 0).value == doctest::Approx(0.0).epsilon(1e-3));
}

TEST_CASE("oracle and kernel routes agree") {
  const Region r(0.0, 3.0);
  const UnitSystem u;
  for (double k : {0.7, 2.0, 20.0}) {
    for (int n : {1, 2, 3}) {
      const auto a = kernel_moment(k, r, u, n);
      const auto b = pm_moment_oracle(k, r, u, n);
      CAPTURE(k);
      CAPTURE(n);
      CHECK(a.value == doctest::Approx(b.value).epsilon(1e-4));
      CHECK(b.route == MomentRoute::kOracle);
    }
  }
}

TEST_CASE("orders outside the supported range throw") {
  const Region r(0.0, 3.0);
  CHECK_THROWS_AS(kernel_moment(1.0, r, UnitSystem{}, 4), std::invalid_argument);
  CHECK_THROWS_AS(pm_moment_oracle(1.0, r, UnitSystem{}, 0), std::invalid_argument);
  CHECK_THROWS_AS(kernel_moment(-1.0, r, UnitSystem{}, 1), std::domain_error);
}

TEST_CASE("packet correlation function moments") {
  const auto psi = make_gauss_cut_packet(0.5, 2.0, 0.4, -100.0);
  const Region r(0.0, 10.0);
  const UnitSystem u;
  const CorrelationFunction c(psi, r, u);
  const auto m = c.moments();
  CHECK(std::abs(m[0].value) < 5e-3);
  CHECK(m[1].value == doctest::Approx(wavepacket_dwell_moments(psi, r, u, 1)).epsilon(1e-3));
  CHECK(m[2].value == doctest::Approx(wavepacket_dwell_moments(psi, r, u, 2)).epsilon(1e-2));
  CHECK_THROWS_AS(c.sample({0.5 * c.tau_min_cutoff()}), std::domain_error);
}
