#pragma once

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "hessdisc/core.hpp"
#include "hessdisc/numerics.hpp"

namespace hessdisc {

/// Profile g on [0,1] parametrizing radial equality solutions. Admissible
/// profiles are C^2 with -1/t <= g'(t) <= 0 and int_0^1 e^g = 1; the additive
/// shift is the normalization degree of freedom (it never changes g').
class GProfile {
 public:
  enum class Family { constant, linear, log_family, spline, slope_hermite };

  static GProfile constant() {
    GProfile p;
    p.family_ = Family::constant;
    return p;
  }

  /// g(t) = -a*t + shift. Slopes in [0,1] satisfy the box constraint outright.
  static GProfile linear(double a) {
    GProfile p;
    p.family_ = Family::linear;
    p.a_ = a;
    return p;
  }

  /// g(t) = -ln(1 + b*t) + shift; g' = -b/(1+bt) >= -1/t for every b >= 0.
  static GProfile log_family(double b) {
    require(b >= 0.0, Errc::bad_input, "log-family parameter b must be >= 0");
    GProfile p;
    p.family_ = Family::log_family;
    p.b_ = b;
    return p;
  }

  /// Natural C^2 spline through (t_i, g_i); knots must cover [0,1].
  static GProfile spline(std::vector<double> knots, std::vector<double> values) {
    require(knots.size() >= 3, Errc::bad_input, "spline profile needs >= 3 knots");
    require(knots.front() == 0.0 && knots.back() == 1.0, Errc::bad_input,
            "spline knots must cover [0,1]");
    GProfile p;
    p.family_ = Family::spline;
    p.curve_ = natural_spline(std::move(knots), std::move(values));
    return p;
  }

  /// Profile defined through its derivative: g' is the PCHIP interpolant of
  /// knot slopes, g its exact piecewise integral. Used by the random-profile
  /// generator, where bounding g' between knots is what guarantees class
  /// membership.
  static GProfile from_slopes(std::vector<double> knots, std::vector<double> slopes) {
    GProfile p;
    p.family_ = Family::slope_hermite;
    p.slope_curve_ = pchip(std::move(knots), std::move(slopes));
    return p;
  }

  Family family() const { return family_; }
  double shift() const { return shift_; }
  double param_a() const { return a_; }
  double param_b() const { return b_; }
  GProfile with_shift(double s) const {
    GProfile p = *this;
    p.shift_ = s;
    return p;
  }

  double g(double t) const {
    switch (family_) {
      case Family::constant: return shift_;
      case Family::linear: return -a_ * t + shift_;
      case Family::log_family: return -std::log1p(b_ * t) + shift_;
      case Family::spline: return curve_.eval(t) + shift_;
      case Family::slope_hermite: return slope_curve_.integral(t) + shift_;
    }
    return shift_;
  }

  double gprime(double t) const {
    switch (family_) {
      case Family::constant: return 0.0;
      case Family::linear: return -a_;
      case Family::log_family: return -b_ / (1.0 + b_ * t);
      case Family::spline: return curve_.deriv(t);
      case Family::slope_hermite: return slope_curve_.eval(t);
    }
    return 0.0;
  }

  double exp_g(double t) const { return std::exp(g(t)); }

 private:
  Family family_ = Family::constant;
  double shift_ = 0.0;
  double a_ = 0.0;
  double b_ = 0.0;
  CubicCurve curve_;        // spline family
  CubicCurve slope_curve_;  // slope_hermite family (stores g')
};

/// Validation report for the class constraints. Violations are positive
/// overshoot amounts; sub-1e-12 overshoot is floating-point slack near the
/// singular bound -1/t and is ignored by ok().
struct GValidation {
  double max_upper_violation = 0.0;  // amount by which g' exceeds 0
  double max_lower_violation = 0.0;  // amount by which g' undershoots -1/t
  double norm_residual = 0.0;        // |int_0^1 e^g - 1|
  double viol_t_lo = 0.0, viol_t_hi = 0.0;  // extent of the violating t range
  size_t samples = 0;

  bool derivative_ok() const {
    return max_upper_violation <= 1e-12 && max_lower_violation <= 1e-12;
  }
  bool ok(double norm_tol) const { return derivative_ok() && norm_residual <= norm_tol; }
};

/// Check -1/t <= g' <= 0 on a Chebyshev grid over (0,1) plus the
/// normalization residual. The bound -1/t is vacuous as t -> 0 for bounded
/// g', so checking starts at t = 1e-6; the profile's behavior at t = 1 is
/// unconstrained by the class definition, so checking stops at 1 - 1e-6.
inline GValidation validate_g(const GProfile& p, size_t samples = 512) {
  require(samples >= 100, Errc::bad_input, "validate_g needs >= 100 samples");
  GValidation v;
  v.samples = samples;
  double lo = 1e-6, hi = 1.0 - 1e-6;
  bool any_viol = false;
  for (double t : chebyshev_points(samples, lo, hi)) {
    double gp = p.gprime(t);
    double upper = gp;                  // must be <= 0
    double lower = (-1.0 / t) - gp;     // must be <= 0
    double viol = std::max(upper, lower);
    v.max_upper_violation = std::max(v.max_upper_violation, upper);
    v.max_lower_violation = std::max(v.max_lower_violation, lower);
    if (viol > 1e-12) {
      if (!any_viol) v.viol_t_lo = t;
      v.viol_t_hi = t;
      any_viol = true;
    }
  }
  double integral = integrate_adaptive([&](double t) { return p.exp_g(t); }, 0.0, 1.0, 1e-13);
  v.norm_residual = std::abs(integral - 1.0);
  return v;
}

/// Apply the normalization shift = -ln int_0^1 e^raw so that int e^g = 1.
inline GProfile normalize_profile(const GProfile& raw, size_t validation_samples = 512) {
  GValidation v = validate_g(raw, validation_samples);
  if (!v.derivative_ok()) {
    std::ostringstream os;
    os << "g' leaves [-1/t, 0] on t in (" << v.viol_t_lo << ", " << v.viol_t_hi << ")";
    fail(Errc::constraint_violated, os.str());
  }
  double integral = integrate_adaptive([&](double t) { return raw.exp_g(t); }, 0.0, 1.0, 1e-13);
  require(std::isfinite(integral) && integral > 0.0, Errc::integral_nonfinite,
          "int e^g is not finite and positive");
  return raw.with_shift(raw.shift() - std::log(integral));
}

/// Random class member. Knot slopes are drawn from [max(-1/t_right, -3), 0],
/// with the -1/t bound taken at the right neighbor knot: the PCHIP
/// interpolant between two knots stays within their slope range, and -1/t is
/// increasing, so the constraint then holds on the whole segment.
inline GProfile random_gprofile(uint64_t seed, size_t n_knots = 9) {
  require(n_knots >= 3, Errc::bad_input, "random profile needs >= 3 knots");
  Rng rng(seed);
  std::vector<double> knots(n_knots), slopes(n_knots);
  for (size_t i = 0; i < n_knots; ++i)
    knots[i] = static_cast<double>(i) / static_cast<double>(n_knots - 1);
  for (size_t i = 0; i < n_knots; ++i) {
    double t_right = (i + 1 < n_knots) ? knots[i + 1] : 1.0;
    double lo = std::max(-1.0 / t_right, -3.0);
    slopes[i] = rng.uniform(lo, 0.0);
  }
  return normalize_profile(GProfile::from_slopes(std::move(knots), std::move(slopes)));
}

// ---------------------------------------------------------------------------
// g-spec exchange formats

/// CSV rows "t,g" (optional header). Returns knot/value arrays.
inline void load_profile_knots_csv(std::istream& in, std::vector<double>& knots,
                                   std::vector<double>& values) {
  knots.clear();
  values.clear();
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string a, b;
    if (!std::getline(ls, a, ',') || !std::getline(ls, b)) continue;
    try {
      knots.push_back(std::stod(a));
      values.push_back(std::stod(b));
    } catch (const std::exception&) {
      continue;  // header or junk line
    }
  }
  require(knots.size() >= 3, Errc::bad_input, "profile CSV needs >= 3 numeric (t,g) rows");
}

/// {"family": "constant"|"linear"|"log"|"spline", "params": {...}}.
/// Spline knots either inline ("knots": [[t,g],...]) or from "knots_csv".
inline GProfile parse_gprofile_json(const nlohmann::json& j) {
  require(j.contains("family"), Errc::bad_input, "g-spec missing \"family\"");
  std::string fam = j.at("family").get<std::string>();
  nlohmann::json params = j.value("params", nlohmann::json::object());
  GProfile raw;
  if (fam == "constant") {
    raw = GProfile::constant();
  } else if (fam == "linear") {
    raw = GProfile::linear(params.value("a", 1.0));
  } else if (fam == "log") {
    raw = GProfile::log_family(params.value("b", 1.0));
  } else if (fam == "spline") {
    std::vector<double> knots, values;
    if (params.contains("knots")) {
      for (const auto& kv : params.at("knots")) {
        knots.push_back(kv.at(0).get<double>());
        values.push_back(kv.at(1).get<double>());
      }
    } else if (params.contains("knots_csv")) {
      std::ifstream f(params.at("knots_csv").get<std::string>());
      require(f.good(), Errc::bad_input, "cannot open knots_csv");
      load_profile_knots_csv(f, knots, values);
    } else {
      fail(Errc::bad_input, "spline g-spec needs \"knots\" or \"knots_csv\"");
    }
    raw = GProfile::spline(std::move(knots), std::move(values));
  } else {
    fail(Errc::bad_input, "unknown g-spec family: " + fam);
  }
  return normalize_profile(raw);
}

inline nlohmann::json gprofile_to_json(const GProfile& p, size_t spline_knots = 65) {
  nlohmann::json j;
  switch (p.family()) {
    case GProfile::Family::constant:
      j["family"] = "constant";
      j["params"] = nlohmann::json::object();
      break;
    case GProfile::Family::linear:
      j["family"] = "linear";
      j["params"] = {{"a", p.param_a()}};
      break;
    case GProfile::Family::log_family:
      j["family"] = "log";
      j["params"] = {{"b", p.param_b()}};
      break;
    default: {
      // spline and slope-built profiles round-trip as sampled spline knots
      j["family"] = "spline";
      nlohmann::json knots = nlohmann::json::array();
      for (size_t i = 0; i < spline_knots; ++i) {
        double t = static_cast<double>(i) / static_cast<double>(spline_knots - 1);
        knots.push_back({t, p.g(t)});
      }
      j["params"] = {{"knots", knots}};
      break;
    }
  }
  return j;
}

}  // namespace hessdisc
