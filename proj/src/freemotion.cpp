#include "dwellflux/freemotion.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dwell {

namespace {

void require_positive_k(double k, const char* who) {
  if (!(k > 0.0) || !std::isfinite(k)) throw std::domain_error(std::string(who) + ": k must be positive");
}

}  // namespace

DwellEigenvalues dwell_eigenvalues(double k, const Region& region, const UnitSystem& units) {
  require_positive_k(k, "dwell_eigenvalues");
  const double L = region.width();
  const double classical = units.mass * L / (units.hbar * k);
  const double s = std::sin(k * L) / (k * L);
  DwellEigenvalues out;
  out.t_plus = classical * (1.0 + s);
  out.t_minus = classical * (1.0 - s);
  out.degenerate = std::abs(s) <= 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + k * L);
  return out;
}

OnShellDwell onshell_moments(double k, const Region& region, const UnitSystem& units) {
  require_positive_k(k, "onshell_moments");
  const double L = region.width();
  const double t = units.mass * L / (units.hbar * k);
  const double s2 = std::pow(std::sin(k * L) / (k * L), 2);
  const auto eig = dwell_eigenvalues(k, region, units);
  OnShellDwell d;
  d.k = k;
  d.t_plus = eig.t_plus;
  d.t_minus = eig.t_minus;
  d.m1 = t;
  d.m2 = t * t * (1.0 + s2);
  d.m3 = t * t * t * (1.0 + 3.0 * s2);
  assert(d.m2 >= d.m1 * d.m1 && d.t_minus >= 0.0);
  return d;
}

double pm_third_moment(double k, const Region& region, const UnitSystem& units) {
  require_positive_k(k, "pm_third_moment");
  const double L = region.width();
  const double kl = k * L;
  const double t = units.mass * L / (units.hbar * k);
  const double c = std::cos(kl);
  return t * t * t * (1.0 - 3.0 * (1.0 + c * c) / (kl * kl) + 3.0 * std::sin(2.0 * kl) / (kl * kl * kl));
}

double branch_time(Branch b, double k, const Region& region, const UnitSystem& units) {
  const double L = region.width();
  const double sign = b == Branch::kPlus ? 1.0 : -1.0;
  return units.mass / units.hbar * (L / k + sign * std::sin(k * L) / (k * k));
}

double branch_slope(Branch b, double k, const Region& region, const UnitSystem& units) {
  const double L = region.width();
  const double sign = b == Branch::kPlus ? 1.0 : -1.0;
  const double s = std::sin(k * L), c = std::cos(k * L);
  return units.mass / units.hbar * (-L / (k * k) + sign * (L * c / (k * k) - 2.0 * s / (k * k * k)));
}

BranchRootFinder::BranchRootFinder(const Region& region, const UnitSystem& units, double k_lo,
                                   double k_hi, int scan_points)
    : region_(region), units_(units), k_lo_(k_lo), k_hi_(k_hi) {
  if (!(k_lo > 0.0) || !(k_hi > k_lo)) throw std::invalid_argument("BranchRootFinder: need 0 < k_lo < k_hi");
  const double max_step = std::numbers::pi / (8.0 * region.width());
  const int needed = static_cast<int>(std::ceil((k_hi - k_lo) / max_step)) + 1;
  const int n = std::max({scan_points, needed, 2});
  grid_.resize(n);
  t_plus_.resize(n);
  t_minus_.resize(n);
  for (int i = 0; i < n; ++i) {
    grid_[i] = k_lo + (k_hi - k_lo) * double(i) / double(n - 1);
    t_plus_[i] = branch_time(Branch::kPlus, grid_[i], region_, units_);
    t_minus_[i] = branch_time(Branch::kMinus, grid_[i], region_, units_);
  }
  assert((grid_[1] - grid_[0]) < max_step);
  // Stationary points of t± come in close pairs near kL = nπ (spacing
  // ~4/kL² in k), too close for any scan. The bracket
  //   g±(k) = k² t±'(k) ħ/m = -L ± (L cos kL - 2 sin kL / k)
  // is monotone between consecutive zeros of g' (spaced ~π/L), so each such
  // piece holds at most one stationary point.
  const double L = region.width();
  auto dg = [L](double k) {
    const double x = k * L;
    return -L * L * std::sin(x) - 2.0 * L * std::cos(x) / k + 2.0 * std::sin(x) / (k * k);
  };
  std::vector<double> cuts = {k_lo_};
  for (double k : bracket_and_refine(dg, k_lo_, k_hi_, n))
    if (k > cuts.back() && k < k_hi_) cuts.push_back(k);
  cuts.push_back(k_hi_);
  for (Branch b : {Branch::kPlus, Branch::kMinus}) {
    const int idx = b == Branch::kPlus ? 0 : 1;
    const double sign = b == Branch::kPlus ? 1.0 : -1.0;
    auto g = [L, sign](double k) {
      const double x = k * L;
      return -L + sign * (L * std::cos(x) - 2.0 * std::sin(x) / k);
    };
    auto& knots = knots_[idx];
    knots.push_back(k_lo_);
    double g0 = g(cuts[0]);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      const double g1 = g(cuts[i + 1]);
      if (g0 != 0.0 && g1 != 0.0 && (g0 < 0.0) != (g1 < 0.0)) {
        const double k = bisect(g, cuts[i], cuts[i + 1], g0, 1e-15);
        if (k > knots.back() && k < k_hi_) knots.push_back(k);
      }
      g0 = g1;
    }
    knots.push_back(k_hi_);
    for (double k : knots) knot_t_[idx].push_back(branch_time(b, k, region_, units_));
  }
}

double BranchRootFinder::refine(Branch b, double lo, double hi, double tau) const {
  auto F = [&](double k) { return branch_time(b, k, region_, units_) - tau; };
  double flo = F(lo);
  // Bisection to a tight bracket, then safeguarded Newton.
  for (int it = 0; it < 30 && (hi - lo) > 1e-10 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = F(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  double k = 0.5 * (lo + hi);
  for (int it = 0; it < 8; ++it) {
    const double fk = F(k);
    if (std::abs(fk) < 1e-13 * tau) break;
    const double d = branch_slope(b, k, region_, units_);
    if (d == 0.0) break;
    const double next = k - fk / d;
    if (!(next >= lo && next <= hi)) break;
    k = next;
  }
  return k;
}

std::vector<BranchRoot> BranchRootFinder::roots(double tau) const {
  std::vector<BranchRoot> out;
  for (Branch b : {Branch::kPlus, Branch::kMinus}) {
    const int idx = b == Branch::kPlus ? 0 : 1;
    const auto& knots = knots_[idx];
    const auto& t = knot_t_[idx];
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
      const double f0 = t[i] - tau;
      const double f1 = t[i + 1] - tau;
      double k;
      if (f0 == 0.0) {
        k = knots[i];
      } else if (f1 != 0.0 && (f0 < 0.0) != (f1 < 0.0)) {
        k = refine(b, knots[i], knots[i + 1], tau);
      } else {
        continue;
      }
      out.push_back({b, k, branch_slope(b, k, region_, units_)});
    }
    if (t.back() - tau == 0.0) {
      const double k = knots.back();
      out.push_back({b, k, branch_slope(b, k, region_, units_)});
    }
  }
  std::sort(out.begin(), out.end(), [](const BranchRoot& a, const BranchRoot& b) { return a.k_root < b.k_root; });
  return out;
}

std::vector<double> BranchRootFinder::singular_taus() const {
  std::vector<double> out;
  for (int idx = 0; idx < 2; ++idx)
    for (std::size_t i = 1; i + 1 < knot_t_[idx].size(); ++i) out.push_back(knot_t_[idx][i]);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<double> BranchRootFinder::window_edge_taus() const {
  return {t_plus_.front(), t_minus_.front(), t_plus_.back(), t_minus_.back()};
}

std::vector<BranchRoot> find_branch_roots(double tau, const Region& region, const UnitSystem& units,
                                          double k_lo, double k_hi) {
  if (!(tau > 0.0)) throw std::domain_error("find_branch_roots: tau must be positive");
  return BranchRootFinder(region, units, k_lo, k_hi).roots(tau);
}

std::pair<double, double> default_k_window(const MomentumAmplitude& psi) {
  double lo = lower_support_edge(psi, 1e-12);
  lo = std::max(lo, 1e-6 * psi.k_max());
  return {lo, psi.k_max()};
}

DwellDistribution::DwellDistribution(MomentumAmplitude psi, const Region& region,
                                     const UnitSystem& units)
    : psi_(std::move(psi)),
      region_(region),
      units_(units),
      finder_(region, units, default_k_window(psi_).first, default_k_window(psi_).second),
      slope_floor_(1e-8 * units.mass / units.hbar) {}

DistributionPoint DwellDistribution::evaluate(double tau) const {
  if (!(tau > 0.0)) throw std::domain_error("dwell_distribution: tau must be positive");
  DistributionPoint p;
  for (const auto& r : finder_.roots(tau)) {
    double slope = std::abs(r.slope);
    if (slope < slope_floor_) {
      slope = slope_floor_;
      p.capped = true;
    }
    p.value += 0.5 * std::norm(psi_(r.k_root)) / slope;
    ++p.root_count;
  }
  return p;
}

double DwellDistribution::tau_max() const {
  double m = 0.0;
  for (double t : finder_.window_edge_taus()) m = std::max(m, t);
  for (double t : finder_.singular_taus()) m = std::max(m, t);
  return m;
}

MomentEstimate DwellDistribution::moment(int n, double rel_tol) const {
  if (n < 0) throw std::invalid_argument("DwellDistribution::moment: n must be nonnegative");
  QuadratureSpec spec;
  spec.rel_tol = rel_tol;
  spec.abs_tol = 1e-14;
  spec.max_subdivisions = 200000;
  spec.singular_points = finder_.singular_taus();
  for (double t : finder_.window_edge_taus()) spec.singular_points.push_back(t);
  double lo = std::numeric_limits<double>::max();
  for (double t : finder_.window_edge_taus()) lo = std::min(lo, t);
  lo = std::min(lo, spec.singular_points.empty() ? lo : *std::min_element(spec.singular_points.begin(), spec.singular_points.end()));
  lo *= 0.999;
  const double hi = tau_max() * 1.001;
  auto f = [&](double tau) { return std::pow(tau, n) * evaluate(tau).value; };
  const auto r = integrate(f, lo, hi, spec);
  return {r.value, r.est_error};
}

double dwell_distribution(const MomentumAmplitude& psi, const Region& region,
                          const UnitSystem& units, double tau) {
  return DwellDistribution(psi, region, units)(tau);
}

double heuristic_distribution(const MomentumAmplitude& psi, const Region& region,
                              const UnitSystem& units, double tau) {
  if (!(tau > 0.0)) throw std::domain_error("heuristic_distribution: tau must be positive");
  const double scale = units.mass * region.width() / units.hbar;
  return scale / (tau * tau) * std::norm(psi(scale / tau));
}

MomentEstimate heuristic_moment(const MomentumAmplitude& psi, const Region& region,
                                const UnitSystem& units, int n) {
  const auto [k_lo, k_hi] = default_k_window(psi);
  const double scale = units.mass * region.width() / units.hbar;
  QuadratureSpec spec;
  spec.rel_tol = 1e-11;
  spec.abs_tol = 1e-14;
  spec.max_subdivisions = 20000;
  auto f = [&](double tau) { return std::pow(tau, n) * heuristic_distribution(psi, region, units, tau); };
  // Seed panels so the narrow peak is not stepped over.
  const auto r = integrate_oscillatory(f, scale / k_hi, scale / k_lo, scale / k_hi, spec);
  return {r.value, r.est_error};
}

double wavepacket_dwell_moments(const MomentumAmplitude& psi, const Region& region,
                                const UnitSystem& units, int n) {
  if (n < 1 || n > 3) throw std::invalid_argument("wavepacket_dwell_moments: n must be 1, 2 or 3");
  return momentum_average(psi, [&](double k) {
    const auto d = onshell_moments(k, region, units);
    return n == 1 ? d.m1 : n == 2 ? d.m2 : d.m3;
  });
}

}  // namespace dwell
