#include "dwellflux/ffcf.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "dwellflux/freemotion.hpp"
#include "dwellflux/specfun.hpp"

namespace dwell {

namespace {

using std::numbers::pi;

const cplx kI{0.0, 1.0};
const cplx kPhase34 = std::polar(1.0, 0.75 * pi);  // e^{3iπ/4}

void require_positive_k(double k, const char* who) {
  if (!(k > 0.0) || !std::isfinite(k)) throw std::domain_error(std::string(who) + ": k must be positive");
}

void require_order(int order, int lo, int hi, const char* who) {
  if (order < lo || order > hi)
    throw std::invalid_argument(std::string(who) + ": order must be in [" + std::to_string(lo) +
                                ", " + std::to_string(hi) + "]");
}

// Kernel split into the same-boundary term and the two turn-around terms.
// The turn-around terms share the fast phase e^{i m L²/(2ħτ)}; `cross` is
// returned without it.
struct KernelParts {
  cplx self;
  cplx cross;
  double fast_phase;
};

KernelParts kernel_parts(double k, double tau, double L, const UnitSystem& u) {
  const double m = u.mass, hb = u.hbar;
  const double v = u.velocity(k);
  const double a = m / (2.0 * hb * tau);
  const cplx pref = (m / (2.0 * pi * hb * k)) * 2.0 * std::sqrt(pi * a) * kPhase34;
  const cplx diffusion = -kI * (hb / (4.0 * m * tau));
  KernelParts p;
  p.self = pref * 2.0 * std::polar(1.0, 0.5 * hb * k * k * tau / m) * (0.25 * v * v + diffusion);
  p.cross = {};
  for (double d : {-L, L}) {
    const double slow = 0.5 * m / hb * (v * v * tau + 2.0 * v * d);
    const double b = 0.5 * v - 0.5 * d / tau;
    p.cross -= pref * std::polar(1.0, slow) * (b * b + diffusion);
  }
  p.fast_phase = 0.5 * m * L * L / (hb * tau);
  return p;
}

// Scaled to the inverse transit time ħk/mL so that ετ stays small over the
// support of the kernel for every kL.
std::vector<double> epsilon_ladder(double k, const Region& region, const UnitSystem& u) {
  const double s = u.hbar * k / (u.mass * region.width());
  return {0.06 * s, 0.03 * s, 0.015 * s};
}

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

MomentReport extrapolate(const std::vector<double>& eps, const std::vector<double>& vals, int order,
                         MomentRoute route) {
  const auto ex = richardson({eps, vals});
  return {order, ex.limit, ex.est_error, route};
}

}  // namespace

std::string to_string(MomentRoute r) {
  switch (r) {
    case MomentRoute::kClosedForm: return "closed_form";
    case MomentRoute::kKernelIntegral: return "kernel_integral";
    case MomentRoute::kOracle: return "oracle";
  }
  return "unknown";
}

double kernel_tau_floor(const Region& region, const UnitSystem& units) {
  const double L = region.width();
  return 0.5 * units.mass * L * L / (units.hbar * 1e10);
}

cplx kernel_diag(double k, double tau, const Region& region, const UnitSystem& units) {
  require_positive_k(k, "kernel_diag");
  if (!(tau >= kernel_tau_floor(region, units)) || !std::isfinite(tau))
    throw std::domain_error("kernel_diag: tau below the representable floor");
  const auto p = kernel_parts(k, tau, region.width(), units);
  return p.self + std::polar(1.0, p.fast_phase) * p.cross;
}

cplx kernel_diag_fd(double k, double tau, const Region& region, const UnitSystem& units) {
  require_positive_k(k, "kernel_diag_fd");
  if (!(tau > 0.0)) throw std::domain_error("kernel_diag_fd: tau must be positive");
  const double L = region.width();
  const double v = units.velocity(k);
  auto F = [&](double t) {
    return 2.0 * f_kernel(v * t, t, units) - f_kernel(v * t - L, t, units) -
           f_kernel(v * t + L, t, units);
  };
  // Step small against the fastest local oscillation and against τ itself.
  const double rate = 0.5 * units.hbar * k * k / units.mass +
                      0.5 * units.mass * L * L / (units.hbar * tau * tau);
  const double h = std::min(0.02 / rate, 0.05 * tau);
  const double re = second_derivative_fd([&](double t) { return F(t).real(); }, tau, h);
  const double im = second_derivative_fd([&](double t) { return F(t).imag(); }, tau, h);
  return units.mass / (2.0 * pi * units.hbar * k) * cplx(re, im);
}

double kernel_moment_at(double k, const Region& region, const UnitSystem& units, int order,
                        double eps) {
  require_positive_k(k, "kernel_moment");
  require_order(order, 0, 3, "kernel_moment");
  if (!(eps > 0.0)) throw std::invalid_argument("kernel_moment: eps must be positive");
  const double m = units.mass, hb = units.hbar, L = region.width();
  const double n = order;
  const double tau0 = 0.05 * m * L / (hb * k);
  const double v = units.velocity(k);
  const double omega = 0.5 * m * L * L / hb;

  // (0, τ0), same-boundary term: termwise finite part of its power series,
  //   P e^{ibτ} [(v²/4) τ^{-1/2} - i(ħ/4m) τ^{-3/2}],  b = ħk²/2m + iε.
  const cplx P = (2.0 * m / (pi * hb * k)) * std::sqrt(0.5 * pi * m / hb) * kPhase34;
  const cplx b(0.5 * hb * k * k / m, eps);
  cplx series{};
  cplx term = 1.0;  // (ibτ0)^j / j!
  for (int j = 0; j < 200; ++j) {
    if (j > 0) term *= kI * b * tau0 / double(j);
    const cplx add = term * (0.25 * v * v * std::pow(tau0, n + 0.5) / (n + j + 0.5) -
                             kI * (hb / (4.0 * m)) * std::pow(tau0, n - 0.5) / (n + j - 0.5));
    series += add;
    if (j > 4 && std::abs(add) < 1e-17 * std::abs(series)) break;
  }
  const double small_self = (P * series).real();

  // (0, τ0), turn-around terms: u = 1/τ turns the fast phase into e^{iωu}.
  auto g = [&](double uu) {
    const double t = 1.0 / uu;
    const auto p = kernel_parts(k, t, L, units);
    return p.cross * std::exp(-eps * t) * std::pow(uu, -n - 2.0);
  };
  const double u0 = 1.0 / tau0;
  const double U = std::max(4.0 * u0, 2000.0 / omega);
  QuadratureSpec spec;
  spec.abs_tol = 1e-13;
  spec.rel_tol = 1e-11;
  spec.max_subdivisions = 400000;
  const auto mid = integrate_oscillatory<cplx>(
      [&](double uu) { return g(uu) * std::polar(1.0, omega * uu); }, u0, U, 2.0 * pi / omega, spec);
  // ∫_U^∞ g e^{iωu} du by repeated integration by parts.
  const double h = 1e-3 * U;
  const cplx g0 = g(U);
  const cplx g1 = (g(U + h) - g(U - h)) / (2.0 * h);
  const cplx g2 = (g(U + h) - 2.0 * g0 + g(U - h)) / (h * h);
  const cplx iw = kI * omega;
  const cplx tail = -std::polar(1.0, omega * U) * (g0 / iw - g1 / (iw * iw) + g2 / (iw * iw * iw));
  const double small_cross = (mid.value + tail).real();

  // (τ0, ∞) on the full kernel, panels no wider than the local period.
  const double beta = 0.5 * hb * k * k / m;
  const double tau_end = tau0 + 45.0 / eps;
  std::vector<double> breaks;
  for (double t = tau0; t < tau_end;) {
    const double rate = beta + omega / (t * t);
    t += 2.0 * pi / rate;
    if (t < tau_end) breaks.push_back(t);
  }
  auto f = [&](double t) {
    return std::pow(t, n) * std::exp(-eps * t) * kernel_diag(k, t, region, units).real();
  };
  const auto main = integrate_piecewise(f, tau0, tau_end, breaks, spec);
  return small_self + small_cross + main.value;
}

MomentReport kernel_moment(double k, const Region& region, const UnitSystem& units, int order) {
  const auto eps = epsilon_ladder(k, region, units);
  std::vector<double> vals;
  for (double e : eps) vals.push_back(kernel_moment_at(k, region, units, order, e));
  return extrapolate(eps, vals, order, MomentRoute::kKernelIntegral);
}

double pm_moment_oracle_at(double k, const Region& region, const UnitSystem& units, int order,
                           double eps) {
  require_positive_k(k, "pm_moment_oracle");
  require_order(order, 1, 3, "pm_moment_oracle");
  if (!(eps > 0.0)) throw std::invalid_argument("pm_moment_oracle: eps must be positive");
  const double m = units.mass, hb = units.hbar, L = region.width();
  const double nf = factorial(order);
  auto laplace = [&](double q) {
    const double w = 0.5 * hb * (k * k - q * q) / m;
    return (w * w * nf / std::pow(cplx(eps, -w), order + 1)).real();
  };
  // |<q|P_D|k>|² for the plane-wave normalisation <x|k> = e^{ikx}/sqrt(2π).
  auto chi2 = [&](double q) {
    const double p = q - k;
    if (std::abs(p * L) < 1e-4) return L * L / (4.0 * pi * pi) * (1.0 - p * p * L * L / 12.0);
    return (1.0 - std::cos(p * L)) / (2.0 * pi * pi * p * p);
  };
  auto f = [&](double q) { return chi2(q) * laplace(q); };

  // Width of the resonance at q = ±k in q.
  const double width = eps * m / (hb * k);
  const double Q = 60.0 * k + 60.0 / L;
  std::vector<double> breaks = {0.0};
  for (double s : {-1.0, 1.0})
    for (double c : {0.0, 0.5, 2.0, 8.0, 32.0, 128.0})
      for (double sg : {-1.0, 1.0}) breaks.push_back(s * k + sg * c * width);
  for (double x = -Q; x < Q; x += 2.0 * pi / L) breaks.push_back(x);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  QuadratureSpec spec;
  spec.abs_tol = 1e-14;
  spec.rel_tol = 1e-11;
  spec.max_subdivisions = 400000;
  double total = integrate_piecewise(f, -Q, Q, breaks, spec).value;
  // |q| > Q: the cos(pL) part averages out at O(1/(L Q²)); keep the rest.
  auto tail = [&](double q) {
    const double up = q - k, dn = -q - k;
    return (1.0 / (2.0 * pi * pi)) * (1.0 / (up * up) + 1.0 / (dn * dn)) * laplace(q);
  };
  total += integrate(tail, Q, kInf, spec).value;
  return -(2.0 * pi * m / (hb * k)) * total;
}

MomentReport pm_moment_oracle(double k, const Region& region, const UnitSystem& units, int order) {
  const auto eps = epsilon_ladder(k, region, units);
  std::vector<double> vals;
  for (double e : eps) vals.push_back(pm_moment_oracle_at(k, region, units, order, e));
  return extrapolate(eps, vals, order, MomentRoute::kOracle);
}

CorrelationFunction::CorrelationFunction(MomentumAmplitude psi, const Region& region,
                                         const UnitSystem& units, CorrelationOptions options)
    : psi_(std::move(psi)), region_(region), units_(units), options_(options) {
  if (psi_.empty()) throw ConfigError("CorrelationFunction: empty amplitude");
  if (options_.tau_min_cutoff < 0.0 || options_.tau_max < 0.0)
    throw ConfigError("CorrelationFunction: cutoffs must be nonnegative");
  if (!(options_.k_rel_tol > 0.0) || !(options_.tau_rel_tol > 0.0))
    throw ConfigError("CorrelationFunction: tolerances must be positive");
  k_lo_ = std::max(psi_.k_min(), lower_support_edge(psi_, 1e-15));
  k_hi_ = psi_.k_max();
  const double mass = momentum_average(psi_, [](double) { return 1.0; });
  k_mean_ = momentum_average(psi_, [](double k) { return k; }) / mass;
  const double scale = units_.mass * region_.width() / units_.hbar;
  tau_cut_ = options_.tau_min_cutoff > 0.0 ? options_.tau_min_cutoff : 0.05 * scale / k_mean_;
  const double k_edge = std::max(lower_support_edge(psi_, 1e-9), 1e-6 * k_hi_);
  tau_max_ = options_.tau_max > 0.0 ? options_.tau_max : 5.0 * scale / k_edge;
  if (!(tau_max_ > 4.0 * tau_cut_)) throw ConfigError("CorrelationFunction: tau_max too close to cutoff");
}

double CorrelationFunction::k_integral(double tau, bool self_only) const {
  const double L = region_.width();
  auto f = [&](double k) {
    const auto p = kernel_parts(k, tau, L, units_);
    cplx c = p.self;
    if (!self_only) c += std::polar(1.0, p.fast_phase) * p.cross;
    return std::norm(psi_(k)) * c.real();
  };
  const double rate = units_.hbar * k_hi_ * tau / units_.mass + (self_only ? 0.0 : L);
  const double period = std::min((k_hi_ - k_lo_) / 32.0, 2.0 * pi / rate);
  QuadratureSpec spec;
  spec.abs_tol = 1e-15;
  spec.rel_tol = options_.k_rel_tol;
  spec.max_subdivisions = 400000;
  return integrate_oscillatory(f, k_lo_, k_hi_, period, spec).value;
}

double CorrelationFunction::operator()(double tau) const {
  if (!(tau >= kernel_tau_floor(region_, units_)) || !std::isfinite(tau))
    throw std::domain_error("CorrelationFunction: tau below the representable floor");
  return k_integral(tau, false);
}

double CorrelationFunction::self_part(double tau) const {
  if (!(tau > 0.0)) throw std::domain_error("CorrelationFunction: tau must be positive");
  return k_integral(tau, true);
}

CorrelationCurve CorrelationFunction::sample(const std::vector<double>& tau_grid) const {
  CorrelationCurve c;
  c.tau_grid = tau_grid;
  c.tau_min_cutoff = tau_cut_;
  c.abs_tol = 1e-15;
  c.rel_tol = options_.k_rel_tol;
  c.values.reserve(tau_grid.size());
  for (double t : tau_grid) {
    if (t < tau_cut_) throw std::domain_error("CorrelationFunction::sample: tau below cutoff");
    c.values.push_back((*this)(t));
  }
  return c;
}

std::array<double, 3> CorrelationFunction::self_series_moments(double cut, double& err) const {
  // S(τ) = τ^{-3/2} A(τ) + τ^{-1/2} B(τ) with A, B smooth; the n = 0 moment
  // needs the finite part of ∫ τ^{-3/2} A, taken by subtracting A(0).
  const double m = units_.mass, hb = units_.hbar;
  auto AB = [&](double tau) {
    auto f = [&](double k) {
      const cplx P = (2.0 * m / (pi * hb * k)) * std::sqrt(0.5 * pi * m / hb) * kPhase34;
      const cplx e = std::polar(1.0, 0.5 * hb * k * k * tau / m);
      const double v = units_.velocity(k);
      CVec<2> out;
      out[0] = P * e * (-kI * hb / (4.0 * m));
      out[1] = P * e * (0.25 * v * v);
      return out * std::norm(psi_(k));
    };
    QuadratureSpec spec;
    spec.abs_tol = 1e-15;
    spec.rel_tol = 1e-12;
    spec.max_subdivisions = 100000;
    const double period = std::min((k_hi_ - k_lo_) / 32.0, 2.0 * pi / (hb * k_hi_ * tau / m + 1e-300));
    const auto r = integrate_oscillatory<CVec<2>>(f, k_lo_, k_hi_, period, spec).value;
    return std::array<double, 2>{r[0].real(), r[1].real()};
  };
  const double A0 = AB(0.0)[0];
  QuadratureSpec spec;
  spec.abs_tol = 1e-13;
  spec.rel_tol = 1e-10;
  spec.max_subdivisions = 20000;
  spec.singular_points = {0.0};
  auto fv = [&](double tau) {
    CVec<3> out;
    if (tau <= 0.0) return out;
    const auto ab = AB(tau);
    const double s = ab[0] * std::pow(tau, -1.5) + ab[1] * std::pow(tau, -0.5);
    out[0] = (ab[0] - A0) * std::pow(tau, -1.5) + ab[1] * std::pow(tau, -0.5);
    out[1] = tau * s;
    out[2] = tau * tau * s;
    return out;
  };
  const double period = 2.0 * pi * m / (0.5 * hb * k_hi_ * k_hi_);
  std::vector<double> breaks;
  for (double t = period; t < cut; t += period) breaks.push_back(t);
  const auto r = integrate_piecewise<CVec<3>>(fv, 0.0, cut, breaks, spec);
  err = r.est_error;
  return {r.value[0].real() - 2.0 * A0 / std::sqrt(cut), r.value[1].real(), r.value[2].real()};
}

std::array<MomentReport, 3> CorrelationFunction::moments() const {
  const double m = units_.mass, hb = units_.hbar;
  const double lo = 0.5 * tau_cut_;
  // Panels: a fraction of the fastest self-term period near the cutoff,
  // geometric further out.
  const double fast = 2.0 * pi * m / (0.5 * hb * k_hi_ * k_hi_);
  std::vector<double> breaks;
  for (double t = lo; t < tau_max_;) {
    t += std::max(fast, 0.04 * t);
    if (t < tau_max_) breaks.push_back(t);
  }
  breaks.push_back(tau_cut_);
  breaks.push_back(2.0 * tau_cut_);
  std::sort(breaks.begin(), breaks.end());

  auto f = [&](double t) {
    const double c = (*this)(t);
    CVec<3> out;
    out[0] = c;
    out[1] = t * c;
    out[2] = t * t * c;
    return out;
  };
  QuadratureSpec spec;
  spec.abs_tol = 1e-12;
  spec.rel_tol = options_.tau_rel_tol;
  spec.max_subdivisions = 200000;
  auto piece = [&](double a, double b) {
    std::vector<double> inner;
    for (double x : breaks)
      if (x > a && x < b) inner.push_back(x);
    return integrate_piecewise<CVec<3>>(f, a, b, inner, spec);
  };
  const auto r1 = piece(lo, tau_cut_);
  const auto r2 = piece(tau_cut_, 2.0 * tau_cut_);
  const auto r3 = piece(2.0 * tau_cut_, tau_max_);

  double e_lo = 0.0, e_mid = 0.0, e_hi = 0.0;
  const auto s_lo = self_series_moments(lo, e_lo);
  const auto s_mid = self_series_moments(tau_cut_, e_mid);
  const auto s_hi = self_series_moments(2.0 * tau_cut_, e_hi);

  // Turn-around terms dropped below the cutoff oscillate as e^{iω/τ},
  // ω = mL²/2ħ; integrating by parts, ∫_0^cut τ^n X dτ ~ |X| cut^{n+2}/ω.
  const double omega = 0.5 * m * region_.width() * region_.width() / hb;
  const double cross = std::max(std::abs((*this)(tau_cut_) - self_part(tau_cut_)),
                                std::abs((*this)(lo) - self_part(lo)));
  const double c_end = std::abs((*this)(tau_max_));

  std::array<MomentReport, 3> out;
  for (int n = 0; n < 3; ++n) {
    const double upper = r3.value[n].real();
    const double v_lo = s_lo[n] + r1.value[n].real() + r2.value[n].real() + upper;
    const double v_mid = s_mid[n] + r2.value[n].real() + upper;
    const double v_hi = s_hi[n] + upper;
    const double spread = std::max(std::abs(v_lo - v_mid), std::abs(v_hi - v_mid));
    const double quad = r1.est_error + r2.est_error + r3.est_error + e_lo + e_mid + e_hi;
    const double tail = c_end * std::pow(tau_max_, n + 1);
    const double dropped = 2.0 * cross * std::pow(tau_cut_, n + 2) / omega;
    out[n] = {n, v_mid, spread + quad + tail + dropped, MomentRoute::kKernelIntegral};
  }
  return out;
}

MomentReport CorrelationFunction::moment(int order) const {
  require_order(order, 0, 2, "CorrelationFunction::moment");
  return moments()[order];
}

HumpReport CorrelationFunction::hump() const {
  const double T = units_.mass * region_.width() / (units_.hbar * k_mean_);
  const double a = std::max(tau_cut_, 0.25 * T);
  const double b = std::min(tau_max_, 4.0 * T);
  const int n = 400;
  double best_t = a, best_c = -kInf;
  const double step = (b - a) / n;
  for (int i = 0; i <= n; ++i) {
    const double t = a + step * i;
    const double c = (*this)(t);
    if (c > best_c) {
      best_c = c;
      best_t = t;
    }
  }
  // Golden-section polish of the maximum.
  double x0 = std::max(a, best_t - step), x1 = std::min(b, best_t + step);
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double c1 = x1 - gr * (x1 - x0), c2 = x0 + gr * (x1 - x0);
  double f1 = (*this)(c1), f2 = (*this)(c2);
  for (int it = 0; it < 60 && (x1 - x0) > 1e-10 * best_t; ++it) {
    if (f1 > f2) {
      x1 = c2;
      c2 = c1;
      f2 = f1;
      c1 = x1 - gr * (x1 - x0);
      f1 = (*this)(c1);
    } else {
      x0 = c1;
      c1 = c2;
      f1 = f2;
      c2 = x0 + gr * (x1 - x0);
      f2 = (*this)(c2);
    }
  }
  HumpReport h;
  h.tau_peak = 0.5 * (x0 + x1);
  h.peak_value = (*this)(h.tau_peak);
  if (!(h.peak_value > 0.0)) throw ConvergenceError("hump: no positive maximum", h.peak_value, 0.0);

  auto C = [&](double t) { return (*this)(t); };
  auto edge = [&](double dir) {
    double inside = h.tau_peak;
    while (true) {
      // Steps grow away from the peak, where C only decays.
      const double next = inside + dir * (T / 200.0 + 0.02 * std::abs(inside - h.tau_peak));
      if (next <= tau_cut_) return tau_cut_;
      if (next >= tau_max_) return tau_max_;
      const double c = C(next);
      if (!(c > 0.0)) return bisect(C, std::min(inside, next), std::max(inside, next),
                                    dir > 0 ? h.peak_value : c, 1e-12);
      inside = next;
    }
  };
  h.tau_left = edge(-1.0);
  h.tau_right = edge(1.0);

  std::vector<double> breaks;
  for (double t = h.tau_left; t < h.tau_right;) {
    t += std::max(T / 50.0, 0.04 * t);
    if (t < h.tau_right) breaks.push_back(t);
  }
  QuadratureSpec spec;
  spec.abs_tol = 1e-13;
  spec.rel_tol = 1e-9;
  spec.max_subdivisions = 100000;
  const auto r = integrate_piecewise(C, h.tau_left, h.tau_right, breaks, spec);
  h.area = r.value;
  h.est_error = r.est_error;
  return h;
}

double correlation_function(const MomentumAmplitude& psi, const Region& region,
                            const UnitSystem& units, double tau) {
  CorrelationFunction c(psi, region, units);
  if (tau < c.tau_min_cutoff()) throw std::domain_error("correlation_function: tau below cutoff");
  return c(tau);
}

MomentReport correlation_moment(const MomentumAmplitude& psi, const Region& region,
                                const UnitSystem& units, int order) {
  return CorrelationFunction(psi, region, units).moment(order);
}

}  // namespace dwell
