#pragma once

#include <vector>

#include "dwellflux/core.hpp"

namespace dwell {

struct DwellEigenvalues {
  double t_minus = 0.0;
  double t_plus = 0.0;
  bool degenerate = false;  // sin(kL) == 0 to rounding
};

// On-shell eigenvalues t±(k) = mL[1 ± sin(kL)/kL]/ħk.
DwellEigenvalues dwell_eigenvalues(double k, const Region& region, const UnitSystem& units = {});

// On-shell dwell matrix data at fixed k: eigenvalues and the diagonal
// elements T_kk, (T^2)_kk, (T^3)_kk.
struct OnShellDwell {
  double k = 0.0;
  double t_plus = 0.0;
  double t_minus = 0.0;
  double m1 = 0.0;
  double m2 = 0.0;
  double m3 = 0.0;
};

OnShellDwell onshell_moments(double k, const Region& region, const UnitSystem& units = {});

// Third τ-moment of the microcanonical flux-flux correlation function,
// (mL/ħk)^3 [1 - 3(1 + cos^2 kL)/(kL)^2 + 3 sin(2kL)/(kL)^3].
double pm_third_moment(double k, const Region& region, const UnitSystem& units = {});

enum class Branch { kPlus, kMinus };

double branch_time(Branch b, double k, const Region& region, const UnitSystem& units);
double branch_slope(Branch b, double k, const Region& region, const UnitSystem& units);

struct BranchRoot {
  Branch branch = Branch::kPlus;
  double k_root = 0.0;
  double slope = 0.0;  // dt_branch/dk at the root
};

// Roots of t±(k) = τ on a k window. The stationary points of t± are found
// once (from a scan of step < π/(8L), at least 4096 points); between them
// t± is monotone, so each piece holds at most one root, which is bisected
// and Newton-polished to |t(k) - τ| < 1e-13 τ.
class BranchRootFinder {
 public:
  BranchRootFinder(const Region& region, const UnitSystem& units, double k_lo, double k_hi,
                   int scan_points = 4096);

  std::vector<BranchRoot> roots(double tau) const;
  // Values of τ at which Π(τ) has integrable inverse-square-root peaks
  // (stationary points of t±) and at which roots enter or leave the window.
  std::vector<double> singular_taus() const;
  std::vector<double> window_edge_taus() const;

  double k_lo() const { return k_lo_; }
  double k_hi() const { return k_hi_; }
  int scan_points() const { return static_cast<int>(grid_.size()); }

 private:
  double refine(Branch b, double lo, double hi, double tau) const;

  Region region_;
  UnitSystem units_;
  double k_lo_;
  double k_hi_;
  std::vector<double> grid_;
  std::vector<double> t_plus_;
  std::vector<double> t_minus_;
  // Per branch: window ends and stationary points of t(k), so t is monotone
  // between consecutive knots and has at most one root there.
  std::vector<double> knots_[2];
  std::vector<double> knot_t_[2];
};

std::vector<BranchRoot> find_branch_roots(double tau, const Region& region, const UnitSystem& units,
                                          double k_lo, double k_hi);

// Default k window for a packet: (lower probability edge, support maximum).
std::pair<double, double> default_k_window(const MomentumAmplitude& psi);

struct DistributionPoint {
  double value = 0.0;
  bool capped = false;  // a root with |slope| below the floor was capped
  int root_count = 0;
};

struct MomentEstimate {
  double value = 0.0;
  double est_error = 0.0;
};

// Ideal dwell-time distribution Π(τ) for a positive-momentum packet,
//   Π(τ) = ½ Σ_j Σ_± |psi(k_j^±)|^2 / |t±'(k_j^±)|.
class DwellDistribution {
 public:
  DwellDistribution(MomentumAmplitude psi, const Region& region, const UnitSystem& units = {});

  DistributionPoint evaluate(double tau) const;
  double operator()(double tau) const { return evaluate(tau).value; }
  // ∫ τ^n Π(τ) dτ with subdivision at every inverse-square-root peak.
  MomentEstimate moment(int n, double rel_tol = 1e-6) const;
  double slope_floor() const { return slope_floor_; }
  double tau_max() const;
  const BranchRootFinder& finder() const { return finder_; }

 private:
  MomentumAmplitude psi_;
  Region region_;
  UnitSystem units_;
  BranchRootFinder finder_;
  double slope_floor_;
};

double dwell_distribution(const MomentumAmplitude& psi, const Region& region,
                          const UnitSystem& units, double tau);

// π(τ) = (mL/ħτ^2) |psi(mL/ħτ)|^2
double heuristic_distribution(const MomentumAmplitude& psi, const Region& region,
                              const UnitSystem& units, double tau);
MomentEstimate heuristic_moment(const MomentumAmplitude& psi, const Region& region,
                                const UnitSystem& units, int n);

// ∫ |psi(k)|^2 (T^n)_kk dk for n in {1, 2, 3}.
double wavepacket_dwell_moments(const MomentumAmplitude& psi, const Region& region,
                                const UnitSystem& units, int n);

}  // namespace dwell
