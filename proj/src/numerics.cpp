#include "dwellflux/numerics.hpp"

#include <cmath>
#include <stdexcept>

namespace dwell {

void QuadratureSpec::validate() const {
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0))
    throw std::invalid_argument("QuadratureSpec: tolerances must be positive");
  if (max_subdivisions < 64)
    throw std::invalid_argument("QuadratureSpec: max_subdivisions must be at least 64");
}

namespace detail {

std::vector<Segment> build_segments(double a, double b, const std::vector<double>& breaks,
                                    const std::vector<double>& singular) {
  std::vector<double> cuts;
  cuts.push_back(a);
  for (double s : singular)
    if (s > a && s < b) cuts.push_back(s);
  for (double s : breaks)
    if (s > a && s < b) cuts.push_back(s);
  const bool infinite = std::isinf(b);
  if (!infinite) cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  auto is_singular = [&](double x) {
    for (double s : singular)
      if (s == x) return true;
    return false;
  };

  std::vector<Segment> segs;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i], hi = cuts[i + 1];
    const bool sl = is_singular(lo), sr = is_singular(hi);
    if (sl && sr) {
      const double mid = 0.5 * (lo + hi);
      segs.push_back({lo, mid, MapKind::kSqrtLeft});
      segs.push_back({mid, hi, MapKind::kSqrtRight});
    } else if (sl) {
      segs.push_back({lo, hi, MapKind::kSqrtLeft});
    } else if (sr) {
      segs.push_back({lo, hi, MapKind::kSqrtRight});
    } else {
      segs.push_back({lo, hi, MapKind::kIdentity});
    }
  }
  if (infinite) {
    // A singular last cut gets its own sqrt-mapped unit panel first.
    double start = cuts.back();
    if (is_singular(start)) {
      segs.push_back({start, start + 1.0, MapKind::kSqrtLeft});
      start += 1.0;
    }
    segs.push_back({start, kInf, MapKind::kSemiInfinite});
  }
  return segs;
}

}  // namespace detail

double bisect(const std::function<double(double)>& f, double lo, double hi, double flo,
              double rel_tol) {
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= rel_tol * std::max(std::abs(mid), 1e-300) || mid == lo || mid == hi) return mid;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::vector<double> bracket_and_refine(const std::function<double(double)>& f, double lo, double hi,
                                       int scan_points) {
  if (!(lo < hi) || scan_points < 2)
    throw std::invalid_argument("bracket_and_refine: need lo < hi and at least 2 scan points");
  std::vector<double> roots;
  double x_prev = lo;
  double f_prev = f(lo);
  if (f_prev == 0.0) roots.push_back(lo);
  for (int i = 1; i < scan_points; ++i) {
    const double x = lo + (hi - lo) * double(i) / double(scan_points - 1);
    const double fx = f(x);
    if (fx == 0.0) {
      roots.push_back(x);
    } else if (f_prev != 0.0 && (fx < 0.0) != (f_prev < 0.0)) {
      roots.push_back(bisect(f, x_prev, x, f_prev));
    }
    x_prev = x;
    f_prev = fx;
  }
  return roots;
}

Extrapolation richardson(const ExtrapolationLadder& ladder) {
  const auto& h = ladder.parameters;
  const auto& v = ladder.values;
  const std::size_t n = h.size();
  if (n < 3 || v.size() != n)
    throw std::invalid_argument("richardson: need at least 3 rungs with matching values");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(h[i] > 0.0)) throw std::invalid_argument("richardson: parameters must be positive");
    if (i > 0 && !(h[i] < h[i - 1]))
      throw std::invalid_argument("richardson: parameters must be strictly decreasing");
  }

  // Neville tableau evaluated at 0. p[j] after round m interpolates rungs j..j+m.
  std::vector<double> p(v);
  double lower_order = p[n - 1];
  for (std::size_t m = 1; m < n; ++m) {
    for (std::size_t j = 0; j + m < n; ++j) {
      p[j] = (h[j + m] * p[j] - h[j] * p[j + 1]) / (h[j + m] - h[j]);
    }
    if (m == n - 2) lower_order = p[1];
  }
  Extrapolation out;
  out.limit = p[0];
  out.est_error = std::abs(p[0] - lower_order);

  // Monotone ladder: successive differences share a sign and shrink.
  for (std::size_t i = 2; i < n; ++i) {
    const double d1 = v[i - 1] - v[i - 2];
    const double d2 = v[i] - v[i - 1];
    if (d1 * d2 < 0.0 || std::abs(d2) > std::abs(d1)) out.monotone = false;
  }
  if (!out.monotone) out.est_error = std::max(out.est_error * 10.0, std::abs(v[n - 1] - v[n - 2]));
  return out;
}

double second_derivative_fd(const std::function<double(double)>& f, double x, double h) {
  auto d2 = [&](double s) {
    return (-f(x + 2 * s) + 16 * f(x + s) - 30 * f(x) + 16 * f(x - s) - f(x - 2 * s)) / (12 * s * s);
  };
  const double coarse = d2(h);
  const double fine = d2(0.5 * h);
  return fine + (fine - coarse) / 15.0;
}

}  // namespace dwell
