#pragma once

#include <array>
#include <complex>
#include <string>
#include <vector>

#include "dwellflux/core.hpp"

namespace dwell {

enum class MomentRoute { kClosedForm, kKernelIntegral, kOracle };
std::string to_string(MomentRoute r);

struct MomentReport {
  int order = 0;
  double value = 0.0;
  double est_error = 0.0;
  MomentRoute route = MomentRoute::kKernelIntegral;
};

struct CorrelationCurve {
  std::vector<double> tau_grid;
  std::vector<double> values;
  double tau_min_cutoff = 0.0;
  double abs_tol = 0.0;
  double rel_tol = 0.0;
};

// Smallest τ at which kernel_diag is evaluated: below it the phase mL²/2ħτ
// exceeds 1e10 rad and cannot be represented.
double kernel_tau_floor(const Region& region, const UnitSystem& units);

// Diagonal free-motion kernel C_kk(τ) (coefficient of δ(k - k')):
//   (m/2πħk) d²/dτ² [2f(ħkτ/m) - f(ħkτ/m - L) - f(ħkτ/m + L)],
// with the total τ-derivative taken analytically. Complex; the correlation
// function uses its real part.
std::complex<double> kernel_diag(double k, double tau, const Region& region,
                                 const UnitSystem& units = {});
// The same second derivative taken by finite differences of f (via erfi).
// Test oracle only.
std::complex<double> kernel_diag_fd(double k, double tau, const Region& region,
                                    const UnitSystem& units = {});

// Regularised τ-moment of the fixed-k kernel, ∫τ^n e^{-ετ} Re C_kk(τ) dτ,
// extrapolated ε -> 0 over ε = {0.06, 0.03, 0.015} ħk/mL. n in {1, 2, 3}.
MomentReport kernel_moment(double k, const Region& region, const UnitSystem& units, int order);
double kernel_moment_at(double k, const Region& region, const UnitSystem& units, int order,
                        double eps);

// Independent brute-force route to the microcanonical moments: plane-wave
// matrix elements of the region projector, numerical intermediate-momentum
// integral with the regularised τ-Laplace factor n!/(ε - iω)^{n+1}, then
// Richardson in ε.
MomentReport pm_moment_oracle(double k, const Region& region, const UnitSystem& units, int order);
double pm_moment_oracle_at(double k, const Region& region, const UnitSystem& units, int order,
                           double eps);

struct CorrelationOptions {
  // 0 selects the defaults: cutoff 0.05 mL/ħk0, τ_max 5 mL/ħk_lo.
  double tau_min_cutoff = 0.0;
  double tau_max = 0.0;
  double k_rel_tol = 1e-10;
  double tau_rel_tol = 1e-7;
};

struct HumpReport {
  double tau_peak = 0.0;
  double peak_value = 0.0;
  double tau_left = 0.0;
  double tau_right = 0.0;
  double area = 0.0;
  double est_error = 0.0;
};

// Time-dependent flux-flux correlation function of a free positive-momentum
// packet, C(τ) = Re ∫ dk |psi(k)|^2 C_kk(τ).
class CorrelationFunction {
 public:
  CorrelationFunction(MomentumAmplitude psi, const Region& region, const UnitSystem& units = {},
                      CorrelationOptions options = {});

  double operator()(double tau) const;
  // Contribution of the x = ħkτ/m (same-boundary, no turn-around) terms only.
  double self_part(double tau) const;

  CorrelationCurve sample(const std::vector<double>& tau_grid) const;
  // ∫ τ^n C(τ) dτ for n = 0, 1, 2 from a single τ pass. Below the cutoff the
  // self term is integrated from its small-τ series (Hadamard finite part
  // for n = 0); est_error includes the spread over cutoff/2 and 2*cutoff.
  std::array<MomentReport, 3> moments() const;
  MomentReport moment(int order) const;
  // The positive lobe of C(τ) around its global maximum beyond the cutoff.
  HumpReport hump() const;

  double tau_min_cutoff() const { return tau_cut_; }
  double tau_max() const { return tau_max_; }
  double mean_momentum() const { return k_mean_; }
  const MomentumAmplitude& amplitude() const { return psi_; }

 private:
  double k_integral(double tau, bool self_only) const;
  // Finite-part ∫_0^{cut} τ^n S(τ) dτ of the self term, n = 0, 1, 2, and the
  // roundoff bound of the series.
  std::array<double, 3> self_series_moments(double cut, double& err) const;

  MomentumAmplitude psi_;
  Region region_;
  UnitSystem units_;
  CorrelationOptions options_;
  double k_lo_;
  double k_hi_;
  double k_mean_;
  double tau_cut_;
  double tau_max_;
};

double correlation_function(const MomentumAmplitude& psi, const Region& region,
                            const UnitSystem& units, double tau);
MomentReport correlation_moment(const MomentumAmplitude& psi, const Region& region,
                                const UnitSystem& units, int order);

}  // namespace dwell
