#include "dwellflux/approximation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "dwellflux/freemotion.hpp"

namespace dwell {

namespace {

using std::numbers::pi;

constexpr double kInvSqrt2Pi = 0.39894228040143267794;

// Σ_i Σ_j (s_i - t_j)^+ a_i b_j: the first moment of ∫dt A(t+τ)B(t) over τ > 0
// for point masses a at s and b at t.
cplx lag_moment(const std::vector<double>& s, const std::vector<cplx>& a, const std::vector<double>& t,
                const std::vector<cplx>& b) {
  std::vector<std::size_t> ia(s.size()), ib(t.size());
  std::iota(ia.begin(), ia.end(), 0);
  std::iota(ib.begin(), ib.end(), 0);
  std::sort(ia.begin(), ia.end(), [&](auto x, auto y) { return s[x] < s[y]; });
  std::sort(ib.begin(), ib.end(), [&](auto x, auto y) { return t[x] < t[y]; });
  cplx sum_b{}, sum_tb{}, total{};
  std::size_t j = 0;
  for (std::size_t i : ia) {
    while (j < ib.size() && t[ib[j]] < s[i]) {
      sum_b += b[ib[j]];
      sum_tb += t[ib[j]] * b[ib[j]];
      ++j;
    }
    total += a[i] * (s[i] * sum_b - sum_tb);
  }
  return total;
}

}  // namespace

double flux_expectation(const MomentumAmplitude& psi, double x, double t, const UnitSystem& units) {
  const auto f = position_wavefunction_with_gradient(psi, x, t, units);
  return units.hbar / units.mass * std::imag(std::conj(f.psi) * f.dpsi_dx);
}

cplx cross_flux_polarization(const MomentumAmplitude& psi, const MomentumAmplitude& phi, double x,
                             double t, const UnitSystem& units) {
  const cplx i(0.0, 1.0);
  const double j1 = flux_expectation(psi.combined(1.0, phi, 1.0), x, t, units);
  const double j2 = flux_expectation(psi.combined(1.0, phi, i), x, t, units);
  const double j3 = flux_expectation(psi.combined(1.0, phi, -i), x, t, units);
  return 0.5 * j1 - 0.25 * j2 - 0.25 * j3 + i * 0.25 * j3 - i * 0.25 * j2;
}

cplx cross_flux_direct(const MomentumAmplitude& psi, const MomentumAmplitude& phi, double x, double t,
                       const UnitSystem& units) {
  const auto a = position_wavefunction_with_gradient(psi, x, t, units);
  const auto b = position_wavefunction_with_gradient(phi, x, t, units);
  const cplx pre = units.hbar / (2.0 * units.mass) / cplx(0.0, 1.0);
  return pre * (std::conj(a.psi) * b.dpsi_dx - std::conj(a.dpsi_dx) * b.psi);
}

OrthogonalBasis gram_schmidt_basis(const MomentumAmplitude& psi, int order) {
  if (order < 1 || order > kMaxBasisOrder)
    throw std::invalid_argument("gram_schmidt_basis: order must be in [1, " +
                                std::to_string(kMaxBasisOrder) + "]");
  OrthogonalBasis basis;
  const double mass = momentum_average(psi, [](double) { return 1.0; });
  basis.shift = momentum_average(psi, [](double k) { return k; }) / mass;
  const double shift = basis.shift;
  basis.scale =
      std::sqrt(momentum_average(psi, [&](double k) { return (k - shift) * (k - shift); }) / mass);
  const double scale = basis.scale;

  // <s^i psi|s^j psi> = mu[i + j]
  std::vector<double> mu(2 * order + 1);
  for (int n = 0; n <= 2 * order; ++n)
    mu[n] = momentum_average(psi, [&](double k) { return std::pow((k - shift) / scale, n); });
  auto dot = [&](const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = 0; j < b.size(); ++j) s += a[i] * b[j] * mu[i + j];
    return s;
  };

  std::vector<std::vector<double>> done;
  std::vector<double> e0(order + 1, 0.0);
  e0[0] = 1.0 / std::sqrt(mu[0]);
  done.push_back(e0);
  for (int j = 1; j <= order; ++j) {
    std::vector<double> v(order + 1, 0.0);
    v[j] = 1.0;
    const double start = dot(v, v);
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& e : done) {
        const double c = dot(e, v);
        for (int i = 0; i <= order; ++i) v[i] -= c * e[i];
      }
    }
    const double n2 = dot(v, v);
    if (!(n2 > 1e-10 * start)) throw std::runtime_error("gram_schmidt_basis: numerically dependent family");
    for (double& c : v) c /= std::sqrt(n2);
    done.push_back(v);
  }

  for (int j = 1; j <= order; ++j) {
    const auto c = done[j];
    basis.coefficients.push_back(c);
    basis.states.push_back(MomentumAmplitude(
        [psi, c, shift, scale](double k) {
          const double s = (k - shift) / scale;
          double p = 0.0;
          for (auto it = c.rbegin(); it != c.rend(); ++it) p = p * s + *it;
          return p * psi(k);
        },
        psi.k_min(), psi.k_max(), psi.x_center()));
  }

  const cplx self = inner_product(psi, psi);
  for (int a = 0; a < order; ++a) {
    basis.max_overlap =
        std::max(basis.max_overlap, std::abs(inner_product(psi, basis.states[a])) / std::sqrt(std::abs(self)));
    for (int b = a; b < order; ++b) {
      const cplx g = inner_product(basis.states[a], basis.states[b]);
      basis.gram_deviation = std::max(basis.gram_deviation, std::abs(g - (a == b ? 1.0 : 0.0)));
    }
  }
  if (basis.gram_deviation > 1e-10 || basis.max_overlap > 1e-10)
    throw std::runtime_error("gram_schmidt_basis: orthonormality check failed");
  return basis;
}

TransitModel::TransitModel(MomentumAmplitude psi, const Region& region, const UnitSystem& units,
                           OrthogonalBasis basis, TransitOptions options)
    : psi_(std::move(psi)), region_(region), units_(units), basis_(std::move(basis)), options_(options) {
  if (psi_.empty()) throw ConfigError("TransitModel: empty amplitude");
  if (!(region_.x1() > psi_.x_center()))
    throw ConfigError("TransitModel: packet must start to the left of the region");
  if (options_.t_points < 0 || !(options_.lower_mass > 0.0) || !(options_.edge_tol > 0.0))
    throw ConfigError("TransitModel: invalid options");
  k_lo_ = psi_.k_min();
  k_hi_ = psi_.k_max();
  const double mass = momentum_average(psi_, [](double) { return 1.0; });
  const double mean = momentum_average(psi_, [](double k) { return k; }) / mass;
  k_spread_ = std::sqrt(momentum_average(psi_, [&](double k) { return (k - mean) * (k - mean); }) / mass);
  pad_ = 40.0 / k_spread_;
  powers_ = 1;
  if (basis_.order() > 0) {
    powers_ = static_cast<int>(basis_.coefficients.front().size());
    for (const auto& c : basis_.coefficients)
      if (static_cast<int>(c.size()) != powers_) throw ConfigError("TransitModel: ragged basis");
  }
  s1_ = sample(region_.x1());
  s2_ = sample(region_.x2());
  edge_flux_ = std::max(s1_.edge, s2_.edge);
}

TransitModel::Fields TransitModel::fields(double x, double t) const {
  const double span = k_hi_ - k_lo_;
  // Trapezoid in k; the step keeps the periodic images of the packet away
  // from x.
  const double period = 2.0 * (units_.hbar * span * std::abs(t) / units_.mass +
                               std::abs(x - psi_.x_center()) + pad_);
  const int m = static_cast<int>(std::ceil(span * period / (2.0 * pi)));
  const double dk = span / m;
  const double a = units_.hbar * t / (2.0 * units_.mass);
  const cplx q = std::polar(1.0, -2.0 * a * dk * dk);
  const double shift = basis_.shift, scale = basis_.scale;

  Fields f;
  f.value.assign(powers_, {});
  f.gradient.assign(powers_, {});
  cplx z, r;
  for (int n = 0; n <= m; ++n) {
    const double k = k_lo_ + n * dk;
    if (n % 64 == 0) {
      z = std::polar(1.0, k * x - a * k * k);
      r = std::polar(1.0, dk * x - a * (2.0 * k * dk + dk * dk));
    } else {
      z *= r;
      r *= q;
    }
    const double w = (n == 0 || n == m) ? 0.5 * dk : dk;
    const cplx amp = psi_(k) * z * w;
    if (amp != 0.0) {
      const double s = (k - shift) / scale;
      double p = 1.0;
      for (int i = 0; i < powers_; ++i) {
        f.value[i] += p * amp;
        f.gradient[i] += cplx(0.0, k) * (p * amp);
        p *= s;
      }
    }
  }
  for (int i = 0; i < powers_; ++i) {
    f.value[i] *= kInvSqrt2Pi;
    f.gradient[i] *= kInvSqrt2Pi;
  }
  return f;
}

double TransitModel::flux_from(const Fields& f) const {
  return units_.hbar / units_.mass * std::imag(std::conj(f.value[0]) * f.gradient[0]);
}

std::vector<cplx> TransitModel::cross_from(const Fields& f) const {
  const cplx pre = units_.hbar / (2.0 * units_.mass) / cplx(0.0, 1.0);
  std::vector<cplx> out;
  for (const auto& c : basis_.coefficients) {
    cplx phi{}, dphi{};
    for (int i = 0; i < powers_; ++i) {
      phi += c[i] * f.value[i];
      dphi += c[i] * f.gradient[i];
    }
    out.push_back(pre * (std::conj(f.value[0]) * dphi - std::conj(f.gradient[0]) * phi));
  }
  return out;
}

TransitModel::Samples TransitModel::sample(double x) const {
  // Log-uniform nodes between the earliest arrival of the fastest part of the
  // packet and the latest arrival of the slowest.
  const double m = units_.mass, hb = units_.hbar;
  const double d = x - psi_.x_center();
  const double width = 8.0 / k_spread_;
  const double ka = std::max(lower_support_edge(psi_, options_.lower_mass), 1e-6 * k_hi_);
  const double t_lo = m * std::max(d - width, 0.05 * d) / (hb * k_hi_);
  const double t_hi = m * (d + width) / (hb * ka);
  const double mean = momentum_average(psi_, [](double k) { return k; });
  const double resolution = std::max(k_spread_ / mean, 1.0 / (2.0 * k_spread_ * d));
  const double span = std::log(t_hi / t_lo);
  const int n = options_.t_points > 0
                    ? options_.t_points
                    : std::max(2000, static_cast<int>(std::ceil(20.0 * span / resolution)));
  const double h = span / (n - 1);
  Samples s;
  s.x = x;
  s.t.resize(n);
  s.w.resize(n);
  s.flux.resize(n);
  s.cross.assign(basis_.order(), std::vector<cplx>(n));
  for (int i = 0; i < n; ++i) {
    s.t[i] = t_lo * std::exp(i * h);
    s.w[i] = s.t[i] * h * ((i == 0 || i == n - 1) ? 0.5 : 1.0);
    const auto f = fields(x, s.t[i]);
    s.flux[i] = flux_from(f);
    const auto c = cross_from(f);
    for (int j = 0; j < basis_.order(); ++j) s.cross[j][i] = c[j];
  }
  auto edge = [&](int i) { return std::abs(s.flux[i]) * s.t[i]; };
  const double e = std::max(edge(0), edge(n - 1));
  if (e > options_.edge_tol)
    throw ConvergenceError("TransitModel: t-window too small (edge flux " + std::to_string(e) + ")", e, e);
  s.edge = e;
  return s;
}

double TransitModel::t_min() const {
  return std::min(*std::min_element(s1_.t.begin(), s1_.t.end()),
                  *std::min_element(s2_.t.begin(), s2_.t.end()));
}

double TransitModel::t_max() const {
  return std::max(*std::max_element(s1_.t.begin(), s1_.t.end()),
                  *std::max_element(s2_.t.begin(), s2_.t.end()));
}

double TransitModel::flux_mass(int boundary) const {
  const auto& s = boundary == 0 ? s1_ : s2_;
  double m = 0.0;
  for (std::size_t i = 0; i < s.t.size(); ++i) m += s.w[i] * s.flux[i];
  return m;
}

double TransitModel::product_integral(int later, const Samples& earlier, double tau, bool cross) const {
  const double x = later == 0 ? region_.x1() : region_.x2();
  double total = 0.0;
  for (std::size_t i = 0; i < earlier.t.size(); ++i) {
    const auto f = fields(x, earlier.t[i] + tau);
    if (!cross) {
      total += earlier.w[i] * flux_from(f) * earlier.flux[i];
    } else {
      const auto c = cross_from(f);
      for (int j = 0; j < basis_.order(); ++j)
        total += earlier.w[i] * std::real(c[j] * std::conj(earlier.cross[j][i]));
    }
  }
  return total;
}

double TransitModel::c0(double tau) const {
  if (!(tau >= 0.0)) throw std::domain_error("c0: tau must be nonnegative");
  return product_integral(1, s1_, tau, false) + product_integral(0, s2_, tau, false) -
         product_integral(0, s1_, tau, false) - product_integral(1, s2_, tau, false);
}

double TransitModel::c1(double tau) const {
  if (!(tau >= 0.0)) throw std::domain_error("c1: tau must be nonnegative");
  if (basis_.order() == 0) return 0.0;
  return product_integral(1, s1_, tau, true) + product_integral(0, s2_, tau, true) -
         product_integral(0, s1_, tau, true) - product_integral(1, s2_, tau, true);
}

double TransitModel::c0_first_moment() const {
  auto weighted = [](const Samples& s) {
    std::vector<cplx> out(s.t.size());
    for (std::size_t i = 0; i < s.t.size(); ++i) out[i] = s.w[i] * s.flux[i];
    return out;
  };
  const auto a = weighted(s1_), b = weighted(s2_);
  const cplx m = lag_moment(s2_.t, b, s1_.t, a) + lag_moment(s1_.t, a, s2_.t, b) -
                 lag_moment(s1_.t, a, s1_.t, a) - lag_moment(s2_.t, b, s2_.t, b);
  return m.real();
}

double TransitModel::c1_first_moment() const {
  double total = 0.0;
  for (int j = 0; j < basis_.order(); ++j) {
    std::vector<cplx> a1(s1_.t.size()), c1(s1_.t.size()), a2(s2_.t.size()), c2(s2_.t.size());
    for (std::size_t i = 0; i < s1_.t.size(); ++i) {
      a1[i] = s1_.w[i] * s1_.cross[j][i];
      c1[i] = std::conj(a1[i]);
    }
    for (std::size_t i = 0; i < s2_.t.size(); ++i) {
      a2[i] = s2_.w[i] * s2_.cross[j][i];
      c2[i] = std::conj(a2[i]);
    }
    const cplx m = lag_moment(s2_.t, a2, s1_.t, c1) + lag_moment(s1_.t, a1, s2_.t, c2) -
                   lag_moment(s1_.t, a1, s1_.t, c1) - lag_moment(s2_.t, a2, s2_.t, c2);
    total += m.real();
  }
  return total;
}

double c0_approximation(const MomentumAmplitude& psi, const Region& region, const UnitSystem& units,
                        double tau) {
  return TransitModel(psi, region, units).c0(tau);
}

double c1_correction(const MomentumAmplitude& psi, const OrthogonalBasis& basis, const Region& region,
                     const UnitSystem& units, double tau) {
  if (basis.order() == 0) return 0.0;
  if (basis.max_overlap > 1e-10) throw std::invalid_argument("c1_correction: basis not orthogonal to psi");
  return TransitModel(psi, region, units, basis).c1(tau);
}

ApproximationError approximation_error(const MomentumAmplitude& psi, const Region& region,
                                       const UnitSystem& units, int basis_order,
                                       TransitOptions options) {
  if (basis_order < 0) throw std::invalid_argument("approximation_error: negative basis order");
  OrthogonalBasis basis;
  if (basis_order > 0) basis = gram_schmidt_basis(psi, basis_order);
  const TransitModel model(psi, region, units, basis, options);
  ApproximationError e;
  e.tau_d = wavepacket_dwell_moments(psi, region, units, 1);
  e.moment_c0 = model.c0_first_moment();
  e.moment_c01 = e.moment_c0 + model.c1_first_moment();
  e.rel_error_c0 = std::abs(e.moment_c0 - e.tau_d) / e.tau_d;
  e.rel_error_c01 = std::abs(e.moment_c01 - e.tau_d) / e.tau_d;
  e.flux_mass_x1 = model.flux_mass(0);
  e.flux_mass_x2 = model.flux_mass(1);
  return e;
}

}  // namespace dwell
