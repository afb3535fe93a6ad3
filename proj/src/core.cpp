#include "dwellflux/core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace dwell {

namespace {

constexpr double kInvSqrt2Pi = 0.39894228040143267794;  // 1/sqrt(2π)

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

QuadratureSpec tight_spec() {
  QuadratureSpec spec;
  spec.abs_tol = 1e-15;
  spec.rel_tol = 1e-13;
  spec.max_subdivisions = 20000;
  return spec;
}

}  // namespace

UnitSystem::UnitSystem(double hbar_, double mass_) : hbar(hbar_), mass(mass_) {
  if (!positive_finite(hbar) || !positive_finite(mass))
    throw ConfigError("UnitSystem: hbar and mass must be positive");
}

Region::Region(double x1, double x2) : x1_(x1), x2_(x2) {
  if (!std::isfinite(x1) || !std::isfinite(x2) || !(x2 > x1))
    throw ConfigError("Region: require finite x1 < x2");
}

MomentumAmplitude::MomentumAmplitude(Rule rule, double k_min, double k_max, double x_center)
    : rule_(std::make_shared<const Rule>(std::move(rule))),
      k_min_(std::max(0.0, k_min)),
      k_max_(k_max),
      x_center_(x_center) {
  if (!(k_max_ > k_min_)) throw ConfigError("MomentumAmplitude: empty support window");
}

MomentumAmplitude MomentumAmplitude::combined(cplx a, const MomentumAmplitude& other, cplx b) const {
  if (empty()) return other.scaled(b);
  if (other.empty()) return scaled(a);
  auto lhs = rule_;
  auto rhs = other.rule_;
  return MomentumAmplitude([lhs, rhs, a, b](double k) { return a * (*lhs)(k) + b * (*rhs)(k); },
                           std::min(k_min_, other.k_min_), std::max(k_max_, other.k_max_),
                           x_center_);
}

MomentumAmplitude MomentumAmplitude::times_power(int power) const {
  auto base = rule_;
  return MomentumAmplitude([base, power](double k) { return std::pow(k, power) * (*base)(k); },
                           k_min_, k_max_, x_center_);
}

MomentumAmplitude MomentumAmplitude::scaled(cplx a) const {
  auto base = rule_;
  return MomentumAmplitude([base, a](double k) { return a * (*base)(k); }, k_min_, k_max_,
                           x_center_);
}

MomentumAmplitude GaussCutPacket::amplitude() const {
  const GaussCutPacket p = *this;
  return MomentumAmplitude(
      [p](double k) -> cplx {
        if (k <= 0.0) return {};
        const double cut = -std::expm1(-p.alpha * k * k);
        const double d = k - p.k0;
        const double env = std::exp(-d * d / (4.0 * p.dk * p.dk));
        return p.norm * cut * env * std::polar(1.0, -k * p.x0);
      },
      0.0, k_support_max(), x0);
}

GaussCutPacket make_gauss_cut_packet_params(double alpha, double k0, double dk, double x0,
                                            const UnitSystem& units) {
  (void)units;
  if (!positive_finite(alpha) || !positive_finite(k0) || !positive_finite(dk))
    throw ConfigError("gauss-cut packet: alpha, k0 and dk must be positive");
  if (!std::isfinite(x0)) throw ConfigError("gauss-cut packet: x0 must be finite");
  GaussCutPacket p{alpha, k0, dk, x0, 1.0};
  auto density = [&](double k) {
    const double cut = -std::expm1(-alpha * k * k);
    const double d = k - k0;
    return cut * cut * std::exp(-d * d / (2.0 * dk * dk));
  };
  QuadratureSpec spec = tight_spec();
  // The Gaussian core is narrow compared with the support when dk << k0.
  spec.singular_points = {};
  std::vector<double> breaks = {std::max(1e-300, k0 - 6 * dk), k0, k0 + 6 * dk};
  double total = 0.0;
  double lo = 0.0;
  for (double b : breaks) {
    if (b <= lo) continue;
    total += integrate(density, lo, b, spec).value;
    lo = b;
  }
  total += integrate(density, lo, p.k_support_max(), spec).value;
  if (!(total > 0.0) || !std::isfinite(total))
    throw ConvergenceError("gauss-cut packet: normalisation integral failed", total, total);
  p.norm = 1.0 / std::sqrt(total);
  return p;
}

MomentumAmplitude make_gauss_cut_packet(double alpha, double k0, double dk, double x0,
                                        const UnitSystem& units) {
  return make_gauss_cut_packet_params(alpha, k0, dk, x0, units).amplitude();
}

cplx inner_product(const MomentumAmplitude& a, const MomentumAmplitude& b) {
  const double lo = std::max(a.k_min(), b.k_min());
  const double hi = std::min(a.k_max(), b.k_max());
  if (!(hi > lo)) return {};
  auto f = [&](double k) { return std::conj(a(k)) * b(k); };
  const double span = hi - lo;
  return integrate_oscillatory<cplx>(f, lo, hi, span / 64.0, tight_spec()).value;
}

double norm_squared(const MomentumAmplitude& psi) { return inner_product(psi, psi).real(); }

double momentum_average(const MomentumAmplitude& psi, const std::function<double(double)>& g,
                        double rel_tol) {
  QuadratureSpec spec = tight_spec();
  spec.rel_tol = rel_tol;
  auto f = [&](double k) { return std::norm(psi(k)) * g(k); };
  const double span = psi.k_max() - psi.k_min();
  return integrate_oscillatory(f, psi.k_min(), psi.k_max(), span / 64.0, spec).value;
}

double lower_support_edge(const MomentumAmplitude& psi, double mass) {
  QuadratureSpec spec = tight_spec();
  spec.abs_tol = mass * 1e-3;
  auto cumulative = [&](double k) {
    if (k <= psi.k_min()) return -mass;
    auto f = [&](double q) { return std::norm(psi(q)); };
    return integrate(f, psi.k_min(), k, spec).value - mass;
  };
  double lo = psi.k_min();
  double hi = psi.k_max();
  if (cumulative(hi) < 0.0) return hi;
  return bisect(cumulative, lo, hi, -mass, 1e-6);
}

namespace {

// Upper bound on |d phase/dk| of exp(ikx - iħk²t/2m) times the packet's own
// exp(-ik x_center), used to seed panel subdivision.
double phase_rate(const MomentumAmplitude& psi, double x, double t, const UnitSystem& u) {
  const double d = x - psi.x_center();
  const double r1 = std::abs(d - u.hbar * psi.k_min() * t / u.mass);
  const double r2 = std::abs(d - u.hbar * psi.k_max() * t / u.mass);
  return std::max(r1, r2);
}

double panel_width(const MomentumAmplitude& psi, double x, double t, const UnitSystem& u) {
  const double span = psi.k_max() - psi.k_min();
  const double rate = phase_rate(psi, x, t, u);
  const double by_phase = rate > 0.0 ? 2.0 * std::numbers::pi / rate : span;
  return std::min(span / 32.0, by_phase);
}

QuadratureSpec wavefunction_spec() {
  QuadratureSpec spec;
  spec.abs_tol = 1e-14;
  spec.rel_tol = 1e-11;
  spec.max_subdivisions = 200000;
  return spec;
}

}  // namespace

cplx position_wavefunction(const MomentumAmplitude& psi, double x, double t,
                           const UnitSystem& units) {
  const double w = units.hbar / (2.0 * units.mass);
  auto f = [&](double k) { return psi(k) * std::polar(1.0, k * x - w * k * k * t); };
  const auto r = integrate_oscillatory<cplx>(f, psi.k_min(), psi.k_max(),
                                             panel_width(psi, x, t, units), wavefunction_spec());
  return r.value * kInvSqrt2Pi;
}

PositionValue position_wavefunction_with_gradient(const MomentumAmplitude& psi, double x, double t,
                                                  const UnitSystem& units) {
  const double w = units.hbar / (2.0 * units.mass);
  auto f = [&](double k) {
    CVec<2> out;
    out[0] = psi(k) * std::polar(1.0, k * x - w * k * k * t);
    out[1] = cplx(0.0, k) * out[0];
    return out;
  };
  const auto r = integrate_oscillatory<CVec<2>>(f, psi.k_min(), psi.k_max(),
                                                panel_width(psi, x, t, units), wavefunction_spec());
  return {r.value[0] * kInvSqrt2Pi, r.value[1] * kInvSqrt2Pi};
}

double initial_overlap(const MomentumAmplitude& psi, const Region& region,
                       const UnitSystem& units) {
  QuadratureSpec spec;
  spec.abs_tol = 1e-14;
  spec.rel_tol = 1e-8;
  auto density = [&](double x) { return std::norm(position_wavefunction(psi, x, 0.0, units)); };
  return integrate(density, region.x1(), region.x2(), spec).value;
}

}  // namespace dwell
