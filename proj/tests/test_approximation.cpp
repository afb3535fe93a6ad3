#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "dwellflux/approximation.hpp"
#include "dwellflux/freemotion.hpp"

using namespace dwell;

TEST_CASE("polarization identity matches the direct bilinear flux") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> k0(1.0, 3.0), dk(0.1, 0.5), x0(-30.0, -5.0), shift(-3.0, 3.0),
      t(0.0, 20.0);
  const UnitSystem u(1.3, 0.7);
  for (int i = 0; i < 100; ++i) {
    // Sample where both packets carry flux, offset by a few widths.
    const double ka = k0(rng), xa = x0(rng);
    const auto psi = make_gauss_cut_packet(0.5, ka, dk(rng), xa, u);
    const auto phi = make_gauss_cut_packet(0.5, ka + 0.1 * shift(rng), dk(rng), xa + shift(rng), u);
    const double ts = t(rng), xs = xa + u.velocity(ka) * ts + shift(rng);
    const cplx a = cross_flux_polarization(psi, phi, xs, ts, u);
    const cplx b = cross_flux_direct(psi, phi, xs, ts, u);
    const double scale = std::abs(flux_expectation(psi, xs, ts, u)) + std::abs(flux_expectation(phi, xs, ts, u));
    CAPTURE(i);
    CHECK(std::abs(a - b) <= 1e-8 * std::max(std::abs(b), scale));
  }
}

TEST_CASE("diagonal flux is the polarization of a state with itself") {
  const auto psi = make_gauss_cut_packet(0.5, 2.0, 0.4, -20.0);
  const cplx d = cross_flux_direct(psi, psi, 3.0, 10.0);
  CHECK(std::abs(d.imag()) < 1e-14);
  CHECK(d.real() == doctest::Approx(flux_expectation(psi, 3.0, 10.0)).epsilon(1e-12));
}

TEST_CASE("Gram-Schmidt basis is orthonormal and orthogonal to psi") {
  const auto psi = make_gauss_cut_packet(0.5, 2.0, 0.2, -400.0);
  for (int order = 1; order <= kMaxBasisOrder; ++order) {
    const auto b = gram_schmidt_basis(psi, order);
    CAPTURE(order);
    REQUIRE(b.order() == order);
    CHECK(b.gram_deviation < 1e-10);
    CHECK(b.max_overlap < 1e-10);
    for (int i = 0; i < order; ++i) {
      CHECK(std::abs(inner_product(psi, b.states[i])) < 1e-10);
      CHECK(norm_squared(b.states[i]) == doctest::Approx(1.0).epsilon(1e-10));
    }
  }
  CHECK_THROWS_AS(gram_schmidt_basis(psi, 0), std::invalid_argument);
  CHECK_THROWS_AS(gram_schmidt_basis(psi, kMaxBasisOrder + 1), std::invalid_argument);
}

TEST_CASE("boundary flux carries unit probability") {
  const auto psi = make_gauss_cut_packet(0.5, 2.0, 0.4, -200.0);
  const Region r(0.0, 50.0);
  const TransitModel model(psi, r);
  CHECK(model.flux_mass(0) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(model.flux_mass(1) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(model.edge_flux() < 1e-6);
  CHECK(c1_correction(psi, OrthogonalBasis{}, r, UnitSystem{}, 10.0) == 0.0);
}

TEST_CASE("C1 correction improves the first moment") {
  const auto psi = make_gauss_cut_packet(0.5, 2.0, 0.4, -400.0);
  const Region r(0.0, 100.0);
  const auto e = approximation_error(psi, r, UnitSystem{}, 4);
  CHECK(e.tau_d == doctest::Approx(wavepacket_dwell_moments(psi, r, UnitSystem{}, 1)).epsilon(1e-10));
  CHECK(e.rel_error_c0 > 0.0);
  CHECK(e.rel_error_c01 < e.rel_error_c0);
}

TEST_CASE("region must lie to the right of the packet") {
  const auto psi = make_gauss_cut_packet(0.5, 2.0, 0.4, 100.0);
  CHECK_THROWS_AS(TransitModel(psi, Region(0.0, 50.0)), ConfigError);
}
