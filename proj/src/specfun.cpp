#include "dwellflux/specfun.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dwell {

using std::complex;

ComplexValue::ComplexValue(double r, double i) : re(r), im(i) {
  if (!std::isfinite(r) || !std::isfinite(i)) throw std::domain_error("ComplexValue: non-finite component");
}

ComplexValue::ComplexValue(complex<double> z) : ComplexValue(z.real(), z.imag()) {}

namespace specfun_detail {

namespace {
constexpr double kTwoOverSqrtPi = 1.12837916709551257390;
constexpr double kInvSqrtPi = 0.56418958354775628695;
}  // namespace

complex<double> erfi_series(complex<double> z) {
  const complex<double> z2 = z * z;
  complex<double> term = z;  // z^{2n+1} / n!
  complex<double> sum = z;
  const double r2 = std::norm(z);
  for (int n = 1; n < 2000; ++n) {
    term *= z2 / double(n);
    const complex<double> add = term / double(2 * n + 1);
    sum += add;
    if (n > r2 && std::abs(add) <= 1e-17 * std::abs(sum)) break;
  }
  return kTwoOverSqrtPi * sum;
}

complex<double> faddeeva_cf(complex<double> z) {
  // w(z) = (i/sqrt(π)) / (z - (1/2)/(z - 1/(z - (3/2)/(z - ...)))), Im z > 0.
  constexpr double kTiny = 1e-300;
  complex<double> f = z;
  if (std::abs(f) == 0.0) f = kTiny;
  complex<double> c = f;
  complex<double> d = 0.0;
  for (int j = 1; j < 20000; ++j) {
    const double a = -0.5 * j;
    d = z + a * d;
    if (std::abs(d) == 0.0) d = kTiny;
    c = z + a / c;
    if (std::abs(c) == 0.0) c = kTiny;
    d = 1.0 / d;
    const complex<double> delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return complex<double>(0.0, kInvSqrtPi) / f;
}

complex<double> erfi_continued_fraction(complex<double> z) {
  const complex<double> i(0.0, 1.0);
  return i * (1.0 - std::exp(z * z) * faddeeva_cf(z));
}

bool use_series(complex<double> z) {
  // log of the series' worst cancellation: sum of |terms| ~ e^{|z|^2}
  // against |erfi| ~ max(1, e^{x^2 - y^2}).
  const double x = std::abs(z.real()), y = std::abs(z.imag());
  const double loss = x >= y ? 2.0 * y * y : x * x + y * y;
  return loss <= 7.0 || std::abs(z) < 1.0;
}

}  // namespace specfun_detail

complex<double> erfi(complex<double> z) {
  using namespace specfun_detail;
  const double x = z.real(), y = z.imag();
  if (!std::isfinite(x) || !std::isfinite(y)) throw std::domain_error("erfi: non-finite argument");
  if (x * x - y * y > kErfiOverflowGuard)
    throw std::range_error("erfi: Re(z^2) above overflow guard");
  if (x == 0.0 && y == 0.0) return {0.0, 0.0};

  const complex<double> q(std::abs(x), std::abs(y));
  const complex<double> e = use_series(q) ? erfi_series(q) : erfi_continued_fraction(q);
  // erfi is odd and commutes with conjugation.
  if (x >= 0.0) return y >= 0.0 ? e : std::conj(e);
  return y >= 0.0 ? -std::conj(e) : -e;
}

complex<double> f_kernel(double x, double tau, const UnitSystem& units) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw std::domain_error("f_kernel: tau must be positive");
  const double a = units.mass / (2.0 * units.hbar * tau);
  const complex<double> i(0.0, 1.0);
  const complex<double> c = std::sqrt(complex<double>(0.0, std::numbers::pi * units.hbar * tau / (2.0 * units.mass)));
  const complex<double> s = std::sqrt(complex<double>(0.0, a));
  return -2.0 * std::polar(1.0, a * x * x) * c + i * std::numbers::pi * x * erfi(s * x);
}

}  // namespace dwell
