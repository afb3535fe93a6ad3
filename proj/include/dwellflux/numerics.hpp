#pragma once

// Shared numerical machinery: globally adaptive Gauss-Kronrod quadrature with
// breakpoints, endpoint-singularity maps and a semi-infinite transform;
// scan-and-bisect root bracketing; polynomial (Richardson) extrapolation.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

namespace dwell {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct QuadratureSpec {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  int max_subdivisions = 4000;
  // Forced subdivision boundaries. An integrable endpoint singularity at one
  // of these points is removed by a quadratic substitution.
  std::vector<double> singular_points;

  void validate() const;
};

template <class T>
struct QuadResult {
  T value{};
  double est_error = 0.0;
  int evaluations = 0;
};

class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, std::complex<double> partial, double est_error)
      : std::runtime_error(what), partial_(partial), est_error_(est_error) {}

  std::complex<double> partial_value() const { return partial_; }
  double est_error() const { return est_error_; }

 private:
  std::complex<double> partial_;
  double est_error_;
};

// Fixed-size complex vector, for integrating several related integrands in a
// single adaptive pass.
template <std::size_t N>
struct CVec {
  std::array<std::complex<double>, N> v{};

  std::complex<double>& operator[](std::size_t i) { return v[i]; }
  const std::complex<double>& operator[](std::size_t i) const { return v[i]; }
  friend CVec operator+(CVec a, const CVec& b) {
    for (std::size_t i = 0; i < N; ++i) a.v[i] += b.v[i];
    return a;
  }
  friend CVec operator-(CVec a, const CVec& b) {
    for (std::size_t i = 0; i < N; ++i) a.v[i] -= b.v[i];
    return a;
  }
  friend CVec operator*(CVec a, double s) {
    for (auto& e : a.v) e *= s;
    return a;
  }
  friend double magnitude(const CVec& a) {
    double m = 0.0;
    for (const auto& e : a.v) m = std::max(m, std::abs(e));
    return m;
  }
  friend std::complex<double> as_complex(const CVec& a) { return N ? a.v[0] : std::complex<double>{}; }
};

namespace detail {

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const std::complex<double>& v) { return std::abs(v); }
inline std::complex<double> as_complex(double v) { return {v, 0.0}; }
inline std::complex<double> as_complex(const std::complex<double>& v) { return v; }
// Other value types (vector-valued integrands) provide magnitude() and
// as_complex() overloads found by argument-dependent lookup.

// Kronrod 21 / Gauss 10 abscissae and weights.
inline constexpr double kXgk[11] = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};
inline constexpr double kWgk[11] = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077600525535209, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
inline constexpr double kWg[5] = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651146};

// How an interval of the unit computational variable u maps onto x.
enum class MapKind { kIdentity, kSqrtLeft, kSqrtRight, kSemiInfinite };

struct Segment {
  double lo = 0.0;   // x-space origin of the map
  double hi = 0.0;   // x-space end (unused for semi-infinite)
  MapKind kind = MapKind::kIdentity;

  // Returns x(u) and dx/du for u in [0, 1].
  void map(double u, double& x, double& jac) const {
    x = lo;
    jac = 0.0;
    switch (kind) {
      case MapKind::kIdentity:
        x = lo + (hi - lo) * u;
        jac = hi - lo;
        return;
      case MapKind::kSqrtLeft:
        x = lo + (hi - lo) * u * u;
        jac = 2.0 * (hi - lo) * u;
        return;
      case MapKind::kSqrtRight:
        x = hi - (hi - lo) * u * u;
        jac = 2.0 * (hi - lo) * u;
        return;
      case MapKind::kSemiInfinite: {
        const double d = 1.0 - u;
        x = lo + u / d;
        jac = 1.0 / (d * d);
        return;
      }
    }
  }
};

template <class T>
struct Piece {
  std::size_t segment;
  double u0, u1;
  T value;
  double error;
  double floor;  // roundoff-limited part of `error`
};

template <class T, class F>
Piece<T> gk21(const F& f, const Segment& seg, std::size_t id, double u0, double u1, int& evals) {
  const double center = 0.5 * (u0 + u1);
  const double half = 0.5 * (u1 - u0);
  auto eval = [&](double u) -> T {
    double x = 0.0, jac = 0.0;
    seg.map(u, x, jac);
    ++evals;
    if (jac == 0.0) return T{};
    return f(x) * jac;
  };
  T fc = eval(center);
  T resk = fc * kWgk[10];
  T resg{};
  double resabs = kWgk[10] * magnitude(fc);
  T fv1[10], fv2[10];
  for (int j = 0; j < 10; ++j) {
    const double dx = half * kXgk[j];
    fv1[j] = eval(center - dx);
    fv2[j] = eval(center + dx);
    resk = resk + (fv1[j] + fv2[j]) * kWgk[j];
    resabs += kWgk[j] * (magnitude(fv1[j]) + magnitude(fv2[j]));
    if (j % 2 == 1) resg = resg + (fv1[j] + fv2[j]) * kWg[j / 2];
  }
  const T mean = resk * 0.5;
  double resasc = kWgk[10] * magnitude(fc - mean);
  for (int j = 0; j < 10; ++j)
    resasc += kWgk[j] * (magnitude(fv1[j] - mean) + magnitude(fv2[j] - mean));
  resasc *= std::abs(half);
  resabs *= std::abs(half);
  const T value = resk * half;
  double err = magnitude((resk - resg) * half);
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  constexpr double kEps = std::numeric_limits<double>::epsilon();
  const double floor = 50.0 * kEps * resabs;
  err = std::max(floor, err);
  return {id, u0, u1, value, err, floor};
}

template <class T, class F>
QuadResult<T> adaptive(const F& f, const std::vector<Segment>& segments, int initial_pieces,
                       const QuadratureSpec& spec) {
  auto worse = [](const Piece<T>& a, const Piece<T>& b) { return a.error < b.error; };
  std::priority_queue<Piece<T>, std::vector<Piece<T>>, decltype(worse)> heap(worse);
  int evals = 0;
  for (std::size_t s = 0; s < segments.size(); ++s) {
    const int n = std::max(1, initial_pieces);
    for (int i = 0; i < n; ++i)
      heap.push(gk21<T>(f, segments[s], s, double(i) / n, double(i + 1) / n, evals));
  }

  auto totals = [&](T& value, double& error) {
    // Sum in a fixed order so results do not depend on heap layout.
    std::vector<Piece<T>> all;
    auto copy = heap;
    while (!copy.empty()) {
      all.push_back(copy.top());
      copy.pop();
    }
    std::sort(all.begin(), all.end(), [](const Piece<T>& a, const Piece<T>& b) {
      return a.segment != b.segment ? a.segment < b.segment : a.u0 < b.u0;
    });
    value = T{};
    error = 0.0;
    for (const auto& p : all) {
      value = value + p.value;
      error += p.error;
    }
  };

  T value{};
  double error = 0.0;
  int pieces = static_cast<int>(heap.size());
  // Running sums are only used to decide termination; the reported value is
  // re-summed in fixed order.
  T running{};
  double running_err = 0.0;
  {
    auto copy = heap;
    while (!copy.empty()) {
      running = running + copy.top().value;
      running_err += copy.top().error;
      copy.pop();
    }
  }
  while (true) {
    const double target = std::max(spec.abs_tol, spec.rel_tol * magnitude(running));
    if (running_err <= target) break;
    // The worst piece is already at its roundoff floor: further splitting
    // cannot reduce the estimate.
    if (heap.top().error <= 1.0001 * heap.top().floor) break;
    if (pieces >= spec.max_subdivisions) {
      totals(value, error);
      throw ConvergenceError("integrate: subdivision limit reached (est. error " +
                                 std::to_string(error) + ")",
                             as_complex(value), error);
    }
    Piece<T> top = heap.top();
    heap.pop();
    const double mid = 0.5 * (top.u0 + top.u1);
    if (!(mid > top.u0 && mid < top.u1)) {
      // Interval cannot be split further in double precision.
      heap.push(top);
      totals(value, error);
      throw ConvergenceError("integrate: roundoff limit reached", as_complex(value), error);
    }
    const auto& seg = segments[top.segment];
    Piece<T> left = gk21<T>(f, seg, top.segment, top.u0, mid, evals);
    Piece<T> right = gk21<T>(f, seg, top.segment, mid, top.u1, evals);
    running = running - top.value + left.value + right.value;
    running_err += left.error + right.error - top.error;
    heap.push(left);
    heap.push(right);
    ++pieces;
  }
  totals(value, error);
  return {value, error, evals};
}

std::vector<Segment> build_segments(double a, double b, const std::vector<double>& breaks,
                                    const std::vector<double>& singular);

}  // namespace detail

// Integrates f over [a, b]; b may be +kInf (mapped through x = a + u/(1-u)).
// Throws ConvergenceError with the partial value when the subdivision budget
// is exhausted before the tolerance is met.
template <class T = double, class F>
QuadResult<T> integrate(F&& f, double a, double b, const QuadratureSpec& spec = {}) {
  spec.validate();
  if (!(a < b)) throw std::invalid_argument("integrate: require a < b");
  auto segs = detail::build_segments(a, b, {}, spec.singular_points);
  return detail::adaptive<T>(f, segs, 1, spec);
}

// Integrates over [a, b] with extra (regular) subdivision boundaries.
template <class T = double, class F>
QuadResult<T> integrate_piecewise(F&& f, double a, double b, const std::vector<double>& breaks,
                                  const QuadratureSpec& spec = {}) {
  spec.validate();
  if (!(a < b)) throw std::invalid_argument("integrate_piecewise: require a < b");
  auto segs = detail::build_segments(a, b, breaks, spec.singular_points);
  QuadratureSpec local = spec;
  local.max_subdivisions = std::max<int>(spec.max_subdivisions, static_cast<int>(segs.size()) * 4);
  return detail::adaptive<T>(f, segs, 1, local);
}

// Same as integrate(), but seeds the subdivision with panels no longer than
// `period` so every oscillation is sampled by at least 21 Kronrod nodes.
template <class T = double, class F>
QuadResult<T> integrate_oscillatory(F&& f, double a, double b, double period,
                                    const QuadratureSpec& spec = {}) {
  spec.validate();
  if (!(a < b) || !std::isfinite(b)) throw std::invalid_argument("integrate_oscillatory: require finite a < b");
  if (!(period > 0.0)) throw std::invalid_argument("integrate_oscillatory: period must be positive");
  const double panels = std::ceil((b - a) / period);
  if (panels > 4.0e6) throw std::invalid_argument("integrate_oscillatory: too many panels");
  std::vector<double> breaks;
  const auto n = static_cast<std::size_t>(panels);
  breaks.reserve(n);
  for (std::size_t i = 1; i < n; ++i) breaks.push_back(a + (b - a) * double(i) / double(n));
  auto segs = detail::build_segments(a, b, breaks, spec.singular_points);
  QuadratureSpec local = spec;
  local.max_subdivisions = std::max<int>(spec.max_subdivisions, static_cast<int>(segs.size()) * 4);
  return detail::adaptive<T>(f, segs, 1, local);
}

// Scans [lo, hi] on `scan_points` equispaced nodes and refines every sign
// change by bisection to 1e-12 relative. Roots of even multiplicity that do
// not produce a sign change on the grid are not reported.
std::vector<double> bracket_and_refine(const std::function<double(double)>& f, double lo, double hi,
                                       int scan_points);

// Bisection on a bracket with f(lo), f(hi) of opposite sign.
double bisect(const std::function<double(double)>& f, double lo, double hi, double flo,
              double rel_tol = 1e-12);

struct ExtrapolationLadder {
  std::vector<double> parameters;  // strictly decreasing, positive
  std::vector<double> values;
};

struct Extrapolation {
  double limit = 0.0;
  double est_error = 0.0;
  bool monotone = true;
};

// Polynomial extrapolation of the ladder to parameter 0 (Neville).
// est_error is the difference between the full-order and next-lower-order
// extrapolants; non-monotone ladders are flagged and the error inflated.
Extrapolation richardson(const ExtrapolationLadder& ladder);

// Five-point central second derivative, Richardson-improved over h and h/2.
double second_derivative_fd(const std::function<double(double)>& f, double x, double h);

}  // namespace dwell
