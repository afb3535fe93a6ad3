#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "dwellflux/freemotion.hpp"

using namespace dwell;

TEST_CASE("on-shell example at k = 1, L = 3") {
  const Region r(0.0, 3.0);
  const auto d = onshell_moments(1.0, r);
  CHECK(d.m1 == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(d.m2 == doctest::Approx(9.019915).epsilon(1e-6));
  CHECK(d.m3 == doctest::Approx(27.18).epsilon(1e-3));
  CHECK(pm_third_moment(1.0, r) == doctest::Approx(8.340987).epsilon(1e-6));
  const auto e = dwell_eigenvalues(1.0, r);
  CHECK(e.t_plus == doctest::Approx(3.0 * (1.0 + std::sin(3.0) / 3.0)).epsilon(1e-15));
  CHECK(e.t_minus == doctest::Approx(3.0 * (1.0 - std::sin(3.0) / 3.0)).epsilon(1e-15));
}

TEST_CASE("degenerate eigenvalues at kL = nπ") {
  const Region r(0.0, M_PI);
  const auto e = dwell_eigenvalues(2.0, r);
  CHECK(e.degenerate);
  CHECK(e.t_plus == doctest::Approx(e.t_minus).epsilon(1e-14));
}

TEST_CASE("moments are power sums of the eigenvalues") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> lg(-3.0, 2.0);
  int checked = 0;
  for (int i = 0; i < 1000; ++i) {
    const double k = std::pow(10.0, lg(rng));
    const double L = std::pow(10.0, lg(rng) + 1.0);
    const UnitSystem u(std::pow(10.0, 0.5 * lg(rng)), std::pow(10.0, 0.5 * lg(rng)));
    const Region r(-0.3 * L, 0.7 * L);
    const auto d = onshell_moments(k, r, u);
    const double p = d.t_plus, m = d.t_minus;
    const double s2 = 0.5 * (p * p + m * m), s3 = 0.5 * (p * p * p + m * m * m);
    CHECK(std::abs(d.m1 - 0.5 * (p + m)) <= 1e-12 * std::abs(d.m1));
    CHECK(std::abs(d.m2 - s2) <= 1e-12 * s2);
    CHECK(std::abs(d.m3 - s3) <= 1e-12 * s3);
    ++checked;
  }
  CHECK(checked == 1000);
}

TEST_CASE("quantum excess variance") {
  const Region r(0.0, 7.0);
  for (double k : {0.3, 1.1, 4.0}) {
    const auto d = onshell_moments(k, r);
    const double kl = k * 7.0;
    const double excess = std::pow(d.m1 * std::sin(kl) / kl, 2);
    CHECK(d.m2 - d.m1 * d.m1 == doctest::Approx(excess).epsilon(1e-10));
  }
}

TEST_CASE("branch roots against a dense scan") {
  const Region r(0.0, 10.0);
  const UnitSystem u;
  const BranchRootFinder finder(r, u, 0.05, 6.0);
  for (double tau : {2.0, 3.3, 5.0, 12.0, 40.0}) {
    const auto roots = finder.roots(tau);
    int scanned = 0;
    for (Branch b : {Branch::kPlus, Branch::kMinus}) {
      const int n = 2000000;
      double prev = branch_time(b, 0.05, r, u) - tau;
      for (int i = 1; i <= n; ++i) {
        const double k = 0.05 + (6.0 - 0.05) * i / n;
        const double cur = branch_time(b, k, r, u) - tau;
        if ((prev < 0.0) != (cur < 0.0)) ++scanned;
        prev = cur;
      }
    }
    CAPTURE(tau);
    CHECK(static_cast<int>(roots.size()) == scanned);
    for (const auto& root : roots) {
      CHECK(std::abs(branch_time(root.branch, root.k_root, r, u) - tau) < 1e-12 * tau);
      const double h = 1e-6 * root.k_root;
      const double fd = (branch_time(root.branch, root.k_root + h, r, u) -
                         branch_time(root.branch, root.k_root - h, r, u)) / (2.0 * h);
      CHECK(root.slope == doctest::Approx(fd).epsilon(1e-5));
    }
  }
}

TEST_CASE("dwell distribution normalisation and moments") {
  const auto psi = make_gauss_cut_packet(0.5, 2.0, 0.4, -100.0);
  const Region r(0.0, 10.0);
  const UnitSystem u;
  const DwellDistribution pi(psi, r, u);
  const auto m0 = pi.moment(0);
  CHECK(m0.value == doctest::Approx(1.0).epsilon(1e-4));
  for (int n : {1, 2, 3}) {
    CAPTURE(n);
    CHECK(pi.moment(n).value == doctest::Approx(wavepacket_dwell_moments(psi, r, u, n)).epsilon(1e-5));
  }
  CHECK_THROWS(pi(-1.0));
}

TEST_CASE("heuristic distribution first moment and excess") {
  const auto psi = make_gauss_cut_packet(0.5, 2.0, 0.4, -100.0);
  const Region r(0.0, 10.0);
  const UnitSystem u;
  CHECK(heuristic_moment(psi, r, u, 0).value == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(heuristic_moment(psi, r, u, 1).value ==
        doctest::Approx(wavepacket_dwell_moments(psi, r, u, 1)).epsilon(1e-8));
  CHECK(heuristic_moment(psi, r, u, 2).value < wavepacket_dwell_moments(psi, r, u, 2));
}
