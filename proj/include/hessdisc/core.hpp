#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace hessdisc {

/// Error categories surfaced by the toolkit. Every throwing path tags one of
/// these so callers (and the CLI) can map failures onto exit codes.
enum class Errc {
  point_outside_domain,
  step_underflow,
  point_too_close_to_boundary,
  nan_encountered,
  constraint_violated,
  integral_nonfinite,
  nonnegative_h_prime,
  t_out_of_range,
  level_out_of_range,
  open_curve_at_boundary,
  degenerate_segment,
  near_critical_vertex,
  curve_too_short,
  start_critical,
  start_outside_domain,
  trace_too_short,
  alpha_out_of_range,
  zero_h0,
  chain_order_violated,
  bad_input,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::point_outside_domain: return "point-outside-domain";
    case Errc::step_underflow: return "step-underflow";
    case Errc::point_too_close_to_boundary: return "point-too-close-to-boundary";
    case Errc::nan_encountered: return "nan-encountered";
    case Errc::constraint_violated: return "constraint-violated";
    case Errc::integral_nonfinite: return "integral-nonfinite";
    case Errc::nonnegative_h_prime: return "nonnegative-h-prime";
    case Errc::t_out_of_range: return "t-out-of-range";
    case Errc::level_out_of_range: return "level-out-of-range";
    case Errc::open_curve_at_boundary: return "open-curve-at-boundary";
    case Errc::degenerate_segment: return "degenerate-segment";
    case Errc::near_critical_vertex: return "near-critical-vertex";
    case Errc::curve_too_short: return "curve-too-short";
    case Errc::start_critical: return "start-critical";
    case Errc::start_outside_domain: return "start-outside-domain";
    case Errc::trace_too_short: return "trace-too-short";
    case Errc::alpha_out_of_range: return "alpha-out-of-range";
    case Errc::zero_h0: return "zero-h0";
    case Errc::chain_order_violated: return "chain-order-violated";
    case Errc::bad_input: return "bad-input";
  }
  return "unknown";
}

class ToolkitError : public std::runtime_error {
 public:
  ToolkitError(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) {
  throw ToolkitError(code, what);
}

inline void require(bool cond, Errc code, const std::string& what) {
  if (!cond) fail(code, what);
}

/// A point (or vector) in the plane.
struct Point2 {
  double x = 0.0;
  double y = 0.0;

  Point2() = default;
  Point2(double xx, double yy) : x(xx), y(yy) {}

  Point2 operator+(const Point2& o) const { return {x + o.x, y + o.y}; }
  Point2 operator-(const Point2& o) const { return {x - o.x, y - o.y}; }
  Point2 operator*(double s) const { return {x * s, y * s}; }
  Point2 operator/(double s) const { return {x / s, y / s}; }
  Point2& operator+=(const Point2& o) { x += o.x; y += o.y; return *this; }

  double dot(const Point2& o) const { return x * o.x + y * o.y; }
  double norm() const { return std::hypot(x, y); }
  double norm2() const { return x * x + y * y; }
  /// Right-hand perpendicular; for a CCW tangent this points outward.
  Point2 perp_right() const { return {y, -x}; }
  Point2 normalized() const {
    double n = norm();
    return {x / n, y / n};
  }
  bool finite() const { return std::isfinite(x) && std::isfinite(y); }
};

inline Point2 operator*(double s, const Point2& p) { return p * s; }

/// Symmetric 2x2 matrix [a b; b c]; used for Hessians (a=f_xx, b=f_xy, c=f_yy).
struct SymMat2 {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;

  SymMat2() = default;
  SymMat2(double aa, double bb, double cc) : a(aa), b(bb), c(cc) {}

  bool finite() const { return std::isfinite(a) && std::isfinite(b) && std::isfinite(c); }

  Point2 apply(const Point2& v) const { return {a * v.x + b * v.y, b * v.x + c * v.y}; }

  /// <M w, w> for a vector w.
  double quadratic_form(const Point2& w) const {
    return a * w.x * w.x + 2.0 * b * w.x * w.y + c * w.y * w.y;
  }

  /// Eigenvalues, ascending. Exact closed form for the symmetric 2x2 case.
  void eigenvalues(double& lo, double& hi) const {
    double mean = 0.5 * (a + c);
    double disc = std::hypot(0.5 * (a - c), b);
    lo = mean - disc;
    hi = mean + disc;
  }

  SymMat2 operator*(double s) const { return {a * s, b * s, c * s}; }
  SymMat2 operator+(const SymMat2& o) const { return {a + o.a, b + o.b, c + o.c}; }
};

/// Operator (spectral) norm: largest absolute eigenvalue.
inline double operator_norm(const SymMat2& m) {
  double lo, hi;
  m.eigenvalues(lo, hi);
  return std::max(std::abs(lo), std::abs(hi));
}

/// Tolerances and knobs shared across the toolkit. Defaults are the pinned
/// values used by the verification suites; the CLI can override any of them.
struct Tolerances {
  double bc_closed_form = 1e-9;   // boundary-zero tolerance, closed-form fields
  double bc_sampled = 1e-6;       // boundary-zero tolerance, sampled fields
  double norm = 1e-8;             // |int e^g - 1| after normalization
  double rt = 1e-6;               // recover_g round-trip sup-norm
  double ineq = 1e-9;             // pointwise inequality slack (profile-level checks)
  double eq = 0.02;               // |max|f| - hessian_term| / max|f| for equality verdict
  double chain = 0.02;            // per-link relative slack in the inequality chain
  double env = 1e-6;              // additive slack in the differential decay bound
  double val = 1e-6;              // value-parametrized flow postcondition
  double grad_eps_rel = 1e-6;     // eps_grad = grad_eps_rel * field scale
  double crit_cell_frac = 0.01;   // max fraction of near-critical interior cells
  double noise_quantile = 0.01;   // curvature-sign violations allowed by convexity_test
  double cert_cv = 0.01;          // certificate: max coeff. of variation along curves
  double cert_straight = 1e-3;    // certificate: max flow straightness residual
  double cert_prop5 = 0.01;       // certificate: relative slack in property (5)
  double cert_sign = 1e-6;        // certificate: sign-constancy slack (relative)
};

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

}  // namespace hessdisc
