#pragma once

#include <complex>

#include "dwellflux/core.hpp"

namespace dwell {

struct ComplexValue {
  double re = 0.0;
  double im = 0.0;

  ComplexValue() = default;
  ComplexValue(double r, double i);
  explicit ComplexValue(std::complex<double> z);
  std::complex<double> value() const { return {re, im}; }
};

// erfi evaluation is refused once Re(z^2) exceeds this (the result would
// overflow a double).
inline constexpr double kErfiOverflowGuard = 700.0;

// Imaginary error function erfi(z) = -i erf(iz).
// Small arguments use the Taylor series; elsewhere erfi(z) = i(1 - e^{z^2} w(z))
// with the Faddeeva function w from its Laplace continued fraction. The
// regime is chosen from the cancellation the series would suffer.
// Throws std::range_error when Re(z^2) > kErfiOverflowGuard.
std::complex<double> erfi(std::complex<double> z);

namespace specfun_detail {
std::complex<double> erfi_series(std::complex<double> z);
// Continued-fraction route; only valid for Im z > 0 after quadrant reduction.
std::complex<double> erfi_continued_fraction(std::complex<double> z);
std::complex<double> faddeeva_cf(std::complex<double> z);
bool use_series(std::complex<double> z);
}  // namespace specfun_detail

// f(x) = -2 e^{i m x^2/(2ħτ)} (iπħτ/2m)^{1/2} + iπ x erfi(sqrt(im/2ħτ) x),
// both roots taken on the principal branch (argument in (-π/2, π/2]).
std::complex<double> f_kernel(double x, double tau, const UnitSystem& units = {});

}  // namespace dwell
