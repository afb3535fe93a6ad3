#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>

#include "dwellflux/numerics.hpp"

namespace dwell {

using cplx = std::complex<double>;

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct UnitSystem {
  double hbar = 1.0;
  double mass = 1.0;

  UnitSystem() = default;
  UnitSystem(double hbar_, double mass_);

  // ħk/m
  double velocity(double k) const { return hbar * k / mass; }
};

class Region {
 public:
  Region(double x1, double x2);

  double x1() const { return x1_; }
  double x2() const { return x2_; }
  double width() const { return x2_ - x1_; }

 private:
  double x1_;
  double x2_;
};

// Momentum-space state on k > 0. The evaluation rule is shared and immutable,
// so copies are cheap and safe to use from several threads.
class MomentumAmplitude {
 public:
  using Rule = std::function<cplx(double)>;

  MomentumAmplitude() = default;
  // `k_min`, `k_max`: outside this window |psi(k)| is below the tail tolerance.
  // `x_center`: position the state is localised around at t = 0, used only
  // as an oscillation hint for position-space quadratures.
  MomentumAmplitude(Rule rule, double k_min, double k_max, double x_center = 0.0);

  cplx operator()(double k) const { return k > 0.0 && rule_ ? (*rule_)(k) : cplx{}; }

  double k_min() const { return k_min_; }
  double k_max() const { return k_max_; }
  double x_center() const { return x_center_; }
  bool empty() const { return !rule_; }

  // a*this + b*other, on the union of the two supports.
  MomentumAmplitude combined(cplx a, const MomentumAmplitude& other, cplx b) const;
  // k^power * psi(k)
  MomentumAmplitude times_power(int power) const;
  MomentumAmplitude scaled(cplx a) const;

 private:
  std::shared_ptr<const Rule> rule_;
  double k_min_ = 0.0;
  double k_max_ = 0.0;
  double x_center_ = 0.0;
};

// Truncated Gaussian with a low-momentum cut:
//   psi(k) = N (1 - exp(-alpha k^2)) exp(-(k-k0)^2 / (4 dk^2)) exp(-i k x0),  k > 0.
struct GaussCutPacket {
  double alpha = 0.5;
  double k0 = 2.0;
  double dk = 0.4;
  double x0 = -400.0;
  double norm = 0.0;  // filled by make_gauss_cut_packet

  // Upper edge of the support; |psi| < 1e-12 beyond it.
  double k_support_max() const { return k0 + 12.0 * dk; }
  MomentumAmplitude amplitude() const;
};

// Builds the normalised packet; N is found by quadrature of |psi|^2 over
// (0, k0 + 12 dk). Throws ConfigError on non-positive parameters and
// ConvergenceError when the normalisation integral does not converge.
GaussCutPacket make_gauss_cut_packet_params(double alpha, double k0, double dk, double x0,
                                            const UnitSystem& units = {});
MomentumAmplitude make_gauss_cut_packet(double alpha, double k0, double dk, double x0,
                                        const UnitSystem& units = {});

// <a|b> over k > 0.
cplx inner_product(const MomentumAmplitude& a, const MomentumAmplitude& b);
double norm_squared(const MomentumAmplitude& psi);
// ∫ |psi|^2 g(k) dk
double momentum_average(const MomentumAmplitude& psi, const std::function<double(double)>& g,
                        double rel_tol = 1e-12);
// Lowest k below which the probability ∫_0^k |psi|^2 is under `mass`.
double lower_support_edge(const MomentumAmplitude& psi, double mass = 1e-12);

struct PositionValue {
  cplx psi;
  cplx dpsi_dx;
};

// psi(x, t) = (2π)^{-1/2} ∫_0^∞ psi(k) exp(ikx - iħk²t/2m) dk.
cplx position_wavefunction(const MomentumAmplitude& psi, double x, double t,
                           const UnitSystem& units = {});
// psi(x, t) and ∂x psi(x, t) from a single quadrature.
PositionValue position_wavefunction_with_gradient(const MomentumAmplitude& psi, double x, double t,
                                                  const UnitSystem& units = {});

// ∫_{x1}^{x2} |psi(x, 0)|^2 dx; a packet is "outside" the region when this is
// below 1e-8.
double initial_overlap(const MomentumAmplitude& psi, const Region& region,
                       const UnitSystem& units = {});

}  // namespace dwell
