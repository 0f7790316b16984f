#pragma once

#include <cmath>
#include <functional>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <vector>

#include "hessdisc/core.hpp"
#include "hessdisc/numerics.hpp"
#include "hessdisc/profile.hpp"

namespace hessdisc {

/// Radial equality solution on the unit disc: f(x,y) = h(x^2+y^2) with
/// h(t) = 1 - int_0^t e^g. The antiderivative is tabulated (e^g has no closed
/// antiderivative in general) and interpolated with cubics whose node slopes
/// are the exact h'(t) = -e^{g(t)}; h'' = -g'(t) e^{g(t)} stays analytic.
class RadialSolution {
 public:
  RadialSolution() = default;

  const GProfile& profile() const { return g_; }
  size_t resolution() const { return table_.x.empty() ? 0 : table_.x.size() - 1; }

  double h(double t) const { return table_.eval(t); }
  double hprime(double t) const { return -g_.exp_g(t); }
  double hsecond(double t) const { return -g_.gprime(t) * g_.exp_g(t); }

  /// h'(t) reconstructed from tabulated h values alone (second-order
  /// differences, one-sided at the ends); recover_g uses this so the round
  /// trip is a real inversion rather than a read-back of stored slopes.
  double hprime_from_table(double t) const {
    const double d = 1e-5;
    if (t < d) return (-3.0 * h(t) + 4.0 * h(t + d) - h(t + 2.0 * d)) / (2.0 * d);
    if (t > 1.0 - d) return (3.0 * h(t) - 4.0 * h(t - d) + h(t - 2.0 * d)) / (2.0 * d);
    return (h(t + d) - h(t - d)) / (2.0 * d);
  }

  double value_at_t(double t) const { return h(t); }

  /// Solve h(t) = c for t in [0,1]; h is strictly decreasing.
  double t_for_value(double c) const {
    require(c >= h(1.0) - 1e-12 && c <= h(0.0) + 1e-12, Errc::t_out_of_range,
            "value outside [h(1), h(0)]");
    double lo = 0.0, hi = 1.0;
    return bisect([&](double t) { return h(t) - c; }, lo, hi, 1e-15);
  }

  friend RadialSolution build_radial_solution(const GProfile&, size_t, double);

 private:
  GProfile g_;
  CubicCurve table_;
};

/// Tabulate h on a uniform grid. Per-cell integrals of e^g use 5-point
/// Gauss-Legendre, which is exact to machine precision at default resolution.
inline RadialSolution build_radial_solution(const GProfile& g, size_t resolution = 4096,
                                            double norm_tol = 1e-8) {
  GValidation v = validate_g(g);
  if (!v.ok(norm_tol)) {
    std::ostringstream os;
    os << "profile fails validation (upper " << v.max_upper_violation << ", lower "
       << v.max_lower_violation << ", norm residual " << v.norm_residual << ")";
    fail(Errc::constraint_violated, os.str());
  }
  require(resolution >= 16, Errc::bad_input, "table resolution too small");

  static const double gl_x[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                 0.5384693101056831, 0.9061798459386640};
  static const double gl_w[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                 0.4786286704993665, 0.2369268850561891};

  size_t n = resolution + 1;
  std::vector<double> ts(n), hs(n), ds(n);
  double acc = 1.0;
  for (size_t i = 0; i < n; ++i) {
    ts[i] = static_cast<double>(i) / static_cast<double>(resolution);
    ds[i] = -g.exp_g(ts[i]);
  }
  hs[0] = acc;
  for (size_t i = 1; i < n; ++i) {
    double a = ts[i - 1], b = ts[i];
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double cell = 0.0;
    for (int k = 0; k < 5; ++k) cell += gl_w[k] * g.exp_g(mid + half * gl_x[k]);
    acc -= cell * half;
    hs[i] = acc;
  }
  RadialSolution sol;
  sol.g_ = g;
  sol.table_ = hermite_from_slopes(std::move(ts), std::move(hs), std::move(ds));
  require(std::abs(sol.h(0.0) - 1.0) <= norm_tol, Errc::constraint_violated, "h(0) != 1");
  require(std::abs(sol.h(1.0)) <= norm_tol, Errc::constraint_violated,
          "h(1) != 0: profile not normalized");
  return sol;
}

/// |grad f| at radius^2 = t, i.e. 2 sqrt(t) e^{g(t)}.
inline double radial_gradient_norm(const RadialSolution& sol, double t) {
  require(t >= 0.0 && t < 1.0, Errc::t_out_of_range, "t must lie in [0,1)");
  return 2.0 * std::sqrt(t) * sol.profile().exp_g(t);
}

/// |L_nu |grad f|| at radius^2 = t: 2|h'(t) + 2t h''(t)|.
inline double radial_lie_derivative(const RadialSolution& sol, double t) {
  require(t > 0.0 && t < 1.0, Errc::t_out_of_range, "t must lie in (0,1)");
  return 2.0 * std::abs(sol.hprime(t) + 2.0 * t * sol.hsecond(t));
}

struct Property5Result {
  bool holds = false;
  double margin = 0.0;  // distance from h'+2th'' to the nearest of its two bounds
};

/// Two-sided bound h' <= h' + 2t h'' <= -h' (property (5) reduced to h).
inline Property5Result check_property5_radial(const RadialSolution& sol, double t,
                                              double tol = 1e-9) {
  require(t > 0.0 && t < 1.0, Errc::t_out_of_range, "t must lie in (0,1)");
  double lower = sol.hprime(t);
  double mid = sol.hprime(t) + 2.0 * t * sol.hsecond(t);
  double upper = -sol.hprime(t);
  Property5Result r;
  r.margin = std::min(mid - lower, upper - mid);
  r.holds = (mid >= lower - tol) && (mid <= upper + tol);
  return r;
}

/// Worst-case margin of the extremal bound h(t) <= 1 - t over a sample grid;
/// the paraboloid profile is the pointwise maximum of the normalized family,
/// so valid solutions keep this nonnegative (up to tolerance).
inline double paraboloid_envelope_margin(const RadialSolution& sol, size_t samples = 1024) {
  require(samples >= 2, Errc::bad_input, "need >= 2 samples");
  double worst = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < samples; ++i) {
    double t = static_cast<double>(i) / static_cast<double>(samples - 1);
    worst = std::min(worst, (1.0 - t) - sol.h(t));
  }
  return worst;
}

/// Invert the construction: g(t) = ln(-h'(t)). The derivative callback is the
/// caller's route to h' (closed-form fields supply their analytic derivative,
/// table-backed solutions differentiate the tabulated h), and the result is
/// fitted as a natural spline profile.
inline GProfile recover_g_from_derivative(const std::function<double(double)>& hprime,
                                          size_t knots = 129) {
  std::vector<double> ts(knots), gs(knots);
  for (size_t i = 0; i < knots; ++i) {
    double t = static_cast<double>(i) / static_cast<double>(knots - 1);
    double hp = hprime(t);
    require(std::isfinite(hp), Errc::nan_encountered, "h' evaluated non-finite");
    require(hp < 0.0, Errc::nonnegative_h_prime, "h' must be strictly negative on (0,1)");
    ts[i] = t;
    gs[i] = std::log(-hp);
  }
  return GProfile::spline(std::move(ts), std::move(gs));
}

inline GProfile recover_g(const RadialSolution& sol, size_t knots = 129) {
  return recover_g_from_derivative([&](double t) { return sol.hprime_from_table(t); }, knots);
}

/// CSV export: rows (t, g, h, h').
inline void write_solution_csv(std::ostream& os, const RadialSolution& sol, size_t rows = 257) {
  os << "t,g,h,h_prime\n";
  os << std::setprecision(17);
  for (size_t i = 0; i < rows; ++i) {
    double t = static_cast<double>(i) / static_cast<double>(rows - 1);
    os << t << ',' << sol.profile().g(t) << ',' << sol.h(t) << ',' << sol.hprime(t) << '\n';
  }
}

}  // namespace hessdisc
