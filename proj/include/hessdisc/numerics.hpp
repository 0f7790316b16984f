#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "hessdisc/core.hpp"

namespace hessdisc {

// ---------------------------------------------------------------------------
// Quadrature

namespace detail {

template <class F>
double simpson_rec(const F& f, double a, double fa, double b, double fb, double m, double fm,
                   double whole, double tol, int depth) {
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_rec(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

/// Adaptive Simpson on [a,b] with absolute tolerance.
template <class F>
double integrate_adaptive(const F& f, double a, double b, double tol = 1e-12, int max_depth = 40) {
  double fa = f(a), fb = f(b), m = 0.5 * (a + b), fm = f(m);
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  double r = detail::simpson_rec(f, a, fa, b, fb, m, fm, whole, tol, max_depth);
  require(std::isfinite(r), Errc::integral_nonfinite, "adaptive quadrature produced a non-finite value");
  return r;
}

// ---------------------------------------------------------------------------
// Piecewise-cubic interpolation on a shared knot layout.
//
// Segment i on [x_i, x_{i+1}] is the Hermite cubic matching values y and
// slopes d at both ends. Natural splines and PCHIP differ only in how the
// slopes are produced.

struct CubicCurve {
  std::vector<double> x;  // strictly increasing knots
  std::vector<double> y;
  std::vector<double> d;  // dy/dx at knots

  size_t segment(double t) const {
    size_t n = x.size();
    if (t <= x.front()) return 0;
    if (t >= x[n - 2]) return n - 2;
    return static_cast<size_t>(std::upper_bound(x.begin(), x.end(), t) - x.begin()) - 1;
  }

  double eval(double t) const {
    size_t i = segment(t);
    double h = x[i + 1] - x[i], s = (t - x[i]) / h;
    double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
    double h10 = s * (1 - s) * (1 - s);
    double h01 = s * s * (3 - 2 * s);
    double h11 = s * s * (s - 1);
    return h00 * y[i] + h10 * h * d[i] + h01 * y[i + 1] + h11 * h * d[i + 1];
  }

  double deriv(double t) const {
    size_t i = segment(t);
    double h = x[i + 1] - x[i], s = (t - x[i]) / h;
    double g00 = 6 * s * (s - 1) / h;
    double g10 = (3 * s - 1) * (s - 1);
    double g11 = s * (3 * s - 2);
    return g00 * (y[i] - y[i + 1]) + g10 * d[i] + g11 * d[i + 1];
  }

  double deriv2(double t) const {
    size_t i = segment(t);
    double h = x[i + 1] - x[i], s = (t - x[i]) / h;
    return (6 - 12 * s) / (h * h) * (y[i + 1] - y[i]) + ((6 * s - 4) * d[i] + (6 * s - 2) * d[i + 1]) / h;
  }

  /// Exact integral of the piecewise cubic from x.front() to t.
  double integral(double t) const {
    double acc = 0.0;
    size_t n = x.size();
    for (size_t i = 0; i + 1 < n; ++i) {
      double hi = x[i + 1] - x[i];
      double end = std::min(t, x[i + 1]);
      if (end <= x[i]) break;
      double s = (end - x[i]) / hi;
      // integrals of the Hermite basis over [0,s], scaled by hi
      double s2 = s * s, s3 = s2 * s, s4 = s3 * s;
      double i00 = s - s3 + 0.5 * s4;
      double i10 = 0.5 * s2 - (2.0 / 3.0) * s3 + 0.25 * s4;
      double i01 = s3 - 0.5 * s4;
      double i11 = 0.25 * s4 - s3 / 3.0;
      acc += hi * (i00 * y[i] + i10 * hi * d[i] + i01 * y[i + 1] + i11 * hi * d[i + 1]);
      if (t <= x[i + 1]) break;
    }
    return acc;
  }
};

/// Natural cubic spline slopes (C^2, second derivative zero at the ends).
inline CubicCurve natural_spline(std::vector<double> xs, std::vector<double> ys) {
  size_t n = xs.size();
  require(n >= 2 && ys.size() == n, Errc::bad_input, "natural_spline needs >= 2 knots");
  // Solve the standard tridiagonal system for second derivatives m_i.
  std::vector<double> m(n, 0.0);
  if (n > 2) {
    std::vector<double> a(n, 0.0), b(n, 0.0), c(n, 0.0), r(n, 0.0);
    for (size_t i = 1; i + 1 < n; ++i) {
      double h0 = xs[i] - xs[i - 1], h1 = xs[i + 1] - xs[i];
      a[i] = h0;
      b[i] = 2.0 * (h0 + h1);
      c[i] = h1;
      r[i] = 6.0 * ((ys[i + 1] - ys[i]) / h1 - (ys[i] - ys[i - 1]) / h0);
    }
    for (size_t i = 2; i + 1 < n; ++i) {
      double w = a[i] / b[i - 1];
      b[i] -= w * c[i - 1];
      r[i] -= w * r[i - 1];
    }
    for (size_t i = n - 2; i >= 1; --i) {
      m[i] = (r[i] - c[i] * (i + 2 < n ? m[i + 1] : 0.0)) / b[i];
      if (i == 1) break;
    }
  }
  CubicCurve cc;
  cc.x = std::move(xs);
  cc.y = std::move(ys);
  cc.d.resize(n);
  for (size_t i = 0; i < n; ++i) {
    if (i + 1 < n) {
      double h = cc.x[i + 1] - cc.x[i];
      cc.d[i] = (cc.y[i + 1] - cc.y[i]) / h - h / 6.0 * (2.0 * m[i] + m[i + 1]);
    } else {
      double h = cc.x[i] - cc.x[i - 1];
      cc.d[i] = (cc.y[i] - cc.y[i - 1]) / h + h / 6.0 * (2.0 * m[i] + m[i - 1]);
    }
  }
  return cc;
}

/// Fritsch-Carlson monotone (PCHIP) slopes: the interpolant stays within the
/// local data range, which is what lets callers carry pointwise bounds on the
/// interpolated function across knots.
inline CubicCurve pchip(std::vector<double> xs, std::vector<double> ys) {
  size_t n = xs.size();
  require(n >= 2 && ys.size() == n, Errc::bad_input, "pchip needs >= 2 knots");
  CubicCurve cc;
  cc.x = std::move(xs);
  cc.y = std::move(ys);
  cc.d.assign(n, 0.0);
  std::vector<double> h(n - 1), delta(n - 1);
  for (size_t i = 0; i + 1 < n; ++i) {
    h[i] = cc.x[i + 1] - cc.x[i];
    delta[i] = (cc.y[i + 1] - cc.y[i]) / h[i];
  }
  if (n == 2) {
    cc.d[0] = cc.d[1] = delta[0];
    return cc;
  }
  for (size_t i = 1; i + 1 < n; ++i) {
    if (delta[i - 1] * delta[i] <= 0.0) {
      cc.d[i] = 0.0;
    } else {
      double w1 = 2.0 * h[i] + h[i - 1];
      double w2 = h[i] + 2.0 * h[i - 1];
      cc.d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
    }
  }
  auto end_slope = [](double h0, double h1, double d0, double d1) {
    double s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (s * d0 <= 0.0) return 0.0;
    if (d0 * d1 < 0.0 && std::abs(s) > 3.0 * std::abs(d0)) return 3.0 * d0;
    return s;
  };
  cc.d[0] = end_slope(h[0], h[1], delta[0], delta[1]);
  cc.d[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
  return cc;
}

/// Hermite curve from exact values and exact slopes (already C^1 data).
inline CubicCurve hermite_from_slopes(std::vector<double> xs, std::vector<double> ys,
                                      std::vector<double> ds) {
  require(xs.size() == ys.size() && xs.size() == ds.size() && xs.size() >= 2, Errc::bad_input,
          "hermite_from_slopes: inconsistent knot data");
  return CubicCurve{std::move(xs), std::move(ys), std::move(ds)};
}

// ---------------------------------------------------------------------------
// Root finding

/// Bisection on a bracketing interval; f(a) and f(b) must differ in sign.
template <class F>
double bisect(const F& f, double a, double b, double xtol = 1e-14, int max_iter = 200) {
  double fa = f(a), fb = f(b);
  require(fa == 0.0 || fb == 0.0 || (fa < 0) != (fb < 0), Errc::bad_input,
          "bisect: interval does not bracket a root");
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  for (int i = 0; i < max_iter && (b - a) > xtol; ++i) {
    double m = 0.5 * (a + b), fm = f(m);
    if (fm == 0.0) return m;
    if ((fm < 0) == (fa < 0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

/// Chebyshev points of the first kind mapped to (lo, hi), ascending.
inline std::vector<double> chebyshev_points(size_t n, double lo, double hi) {
  std::vector<double> pts(n);
  for (size_t k = 0; k < n; ++k) {
    double theta = kPi * (2.0 * (n - 1 - k) + 1.0) / (2.0 * n);
    pts[k] = 0.5 * (lo + hi) + 0.5 * (hi - lo) * std::cos(theta);
  }
  return pts;
}

// ---------------------------------------------------------------------------
// RNG

/// Seeded generator for the randomized suites. Draws map engine words to
/// doubles directly (std::uniform_real_distribution is not pinned by the
/// standard), so a fixed seed reproduces the same stream everywhere.
class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}
  double unit() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }
  size_t index(size_t n) { return static_cast<size_t>(unit() * static_cast<double>(n)) % n; }

 private:
  std::mt19937_64 eng_;
};

}  // namespace hessdisc
