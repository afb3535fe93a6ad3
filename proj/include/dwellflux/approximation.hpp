#pragma once

#include <vector>

#include "dwellflux/core.hpp"

namespace dwell {

// <psi|J(x, t)|psi> = (ħ/m) Im[psi* ∂x psi] at (x, t).
double flux_expectation(const MomentumAmplitude& psi, double x, double t, const UnitSystem& units = {});

// <psi|J(x, t)|phi> from the diagonal fluxes of psi + phi, psi + i phi and
// psi - i phi only:
//   J1/2 - J2/4 - J3/4 + i (J3 - J2)/4.
cplx cross_flux_polarization(const MomentumAmplitude& psi, const MomentumAmplitude& phi, double x,
                             double t, const UnitSystem& units = {});
// Direct bilinear form (ħ/2mi)[psi* phi' - psi'* phi].
cplx cross_flux_direct(const MomentumAmplitude& psi, const MomentumAmplitude& phi, double x, double t,
                       const UnitSystem& units = {});

inline constexpr int kMaxBasisOrder = 7;

// Orthonormal states spanning {k^j psi}, j = 1..order, with psi projected
// out. State j is p_j(s) psi(k) with s = (k - shift)/scale and
// coefficients[j][i] the coefficient of s^i.
struct OrthogonalBasis {
  std::vector<MomentumAmplitude> states;
  std::vector<std::vector<double>> coefficients;
  double shift = 0.0;
  double scale = 1.0;
  double gram_deviation = 0.0;  // max |<a|b> - δ_ab|
  double max_overlap = 0.0;     // max |<psi|a>|

  int order() const { return static_cast<int>(states.size()); }
};

// Throws std::invalid_argument for order outside [1, kMaxBasisOrder] and
// std::runtime_error when the family is numerically dependent or the
// orthonormality check fails at 1e-10.
OrthogonalBasis gram_schmidt_basis(const MomentumAmplitude& psi, int order);

struct TransitOptions {
  int t_points = 0;           // per boundary; 0 picks from the momentum spread
  double lower_mass = 1e-12;  // probability left out below the slowest momentum
  double edge_tol = 1e-7;     // allowed flux at the ends of the t-window
};

// Boundary fluxes of psi (and its cross fluxes with a basis) sampled over the
// transit window, with the product approximations to C(τ) built from them.
// The packet must start to the left of the region and move right.
class TransitModel {
 public:
  TransitModel(MomentumAmplitude psi, const Region& region, const UnitSystem& units = {},
               OrthogonalBasis basis = {}, TransitOptions options = {});

  // ∫dt [J2(t+τ)J1(t) + J1(t+τ)J2(t) - J1(t+τ)J1(t) - J2(t+τ)J2(t)]
  double c0(double tau) const;
  // Same with each product J_a J_b replaced by Re Σ_j <J_a|j><j|J_b>.
  double c1(double tau) const;
  // ∫_0^∞ τ C0(τ) dτ and ∫_0^∞ τ C1(τ) dτ.
  double c0_first_moment() const;
  double c1_first_moment() const;
  // ∫ J(x_b, t) dt for b = 0 (x1), 1 (x2).
  double flux_mass(int boundary) const;
  double edge_flux() const { return edge_flux_; }
  double t_min() const;
  double t_max() const;

 private:
  struct Fields {
    std::vector<cplx> value;     // P_i = ∫ s^i psi e^{...}
    std::vector<cplx> gradient;  // ∂x P_i
  };
  struct Samples {
    double x = 0.0;
    std::vector<double> t;
    std::vector<double> w;
    std::vector<double> flux;
    std::vector<std::vector<cplx>> cross;  // cross[j][i] = <psi|J|state_j> at t_i
    double edge = 0.0;
  };

  Fields fields(double x, double t) const;
  double flux_from(const Fields& f) const;
  std::vector<cplx> cross_from(const Fields& f) const;
  Samples sample(double x) const;
  double product_integral(int later, const Samples& earlier, double tau, bool cross) const;

  MomentumAmplitude psi_;
  Region region_;
  UnitSystem units_;
  OrthogonalBasis basis_;
  TransitOptions options_;
  double k_lo_;
  double k_hi_;
  double k_spread_;
  double pad_;
  int powers_;
  Samples s1_;
  Samples s2_;
  double edge_flux_ = 0.0;
};

double c0_approximation(const MomentumAmplitude& psi, const Region& region, const UnitSystem& units,
                        double tau);
// Empty basis gives 0.
double c1_correction(const MomentumAmplitude& psi, const OrthogonalBasis& basis, const Region& region,
                     const UnitSystem& units, double tau);

struct ApproximationError {
  double tau_d = 0.0;         // exact first moment, ∫|psi|² mL/ħk
  double moment_c0 = 0.0;
  double moment_c01 = 0.0;    // C0 + C1; equals moment_c0 when no basis is used
  double rel_error_c0 = 0.0;
  double rel_error_c01 = 0.0;
  double flux_mass_x1 = 0.0;
  double flux_mass_x2 = 0.0;
};

// First-moment errors of the product approximations; basis_order 0 skips C1.
ApproximationError approximation_error(const MomentumAmplitude& psi, const Region& region,
                                       const UnitSystem& units, int basis_order = 0,
                                       TransitOptions options = {});

}  // namespace dwell
