#pragma once

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hessdisc/field.hpp"

namespace hessdisc {

// ---------------------------------------------------------------------------
// Built-in fields
//
// The verification corpus pairs equality-family members against witnesses
// that each break a different certificate property:
//   quartic   - radial, inequality strict by a factor 2 (property 5)
//   r4-dome   - radial, strict by a factor 3 (property 5)
//   bump      - radial and normalized, but ln(-h') increases near 0 (property 5)
//   two-bump  - disconnected level sets (property 1)
//   tilted    - connected convex levels but |grad f| varies on them (property 4)

inline ScalarField make_paraboloid() {
  return ScalarField::closed_form_radial(
      "paraboloid", DomainSpec::disc({0, 0}, 1.0), [](double t) { return 1.0 - t; },
      [](double) { return -1.0; }, [](double) { return 0.0; });
}

inline ScalarField make_exp_radial() {
  const double den = 1.0 - std::exp(-1.0);
  return ScalarField::closed_form_radial(
      "exp-radial", DomainSpec::disc({0, 0}, 1.0),
      [den](double t) { return (std::exp(-t) - std::exp(-1.0)) / den; },
      [den](double t) { return -std::exp(-t) / den; },
      [den](double t) { return std::exp(-t) / den; });
}

inline ScalarField make_quartic() {
  return ScalarField::closed_form_radial(
      "quartic", DomainSpec::disc({0, 0}, 1.0), [](double t) { return (1.0 - t) * (1.0 - t); },
      [](double t) { return -2.0 * (1.0 - t); }, [](double) { return 2.0; });
}

inline ScalarField make_r4_dome() {
  return ScalarField::closed_form_radial(
      "r4-dome", DomainSpec::disc({0, 0}, 1.0), [](double t) { return 1.0 - t * t; },
      [](double t) { return -2.0 * t; }, [](double) { return -2.0; });
}

inline ScalarField make_bump() {
  auto safe = [](double t, int order) {
    double w = 1.0 - t;
    if (w <= 1e-6) return 0.0;  // exp(1 - 1/w) underflows long before this
    double h = std::exp(1.0 - 1.0 / w);
    if (order == 0) return h;
    if (order == 1) return -h / (w * w);
    return h / (w * w * w * w) - 2.0 * h / (w * w * w);
  };
  return ScalarField::closed_form_radial(
      "bump", DomainSpec::disc({0, 0}, 1.0), [safe](double t) { return safe(t, 0); },
      [safe](double t) { return safe(t, 1); }, [safe](double t) { return safe(t, 2); });
}

inline ScalarField make_constant_field() {
  return ScalarField::closed_form_radial(
      "constant", DomainSpec::disc({0, 0}, 1.0), [](double) { return 1.0; },
      [](double) { return 0.0; }, [](double) { return 0.0; });
}

/// Two Gaussians at (+-0.4, 0), width 0.05, on the disc of radius 1.5 (the
/// radius keeps the boundary values below the closed-form zero tolerance).
inline ScalarField make_two_bump() {
  const double s = 0.05;
  const double cx[2] = {0.4, -0.4};
  auto each = [=](const Point2& p, int k) {
    double dx = p.x - cx[k], dy = p.y;
    return std::exp(-(dx * dx + dy * dy) / s);
  };
  auto value = [=](const Point2& p) { return each(p, 0) + each(p, 1); };
  auto grad = [=](const Point2& p) {
    Point2 g{0, 0};
    for (int k = 0; k < 2; ++k) {
      double e = each(p, k), u = -2.0 / s;
      g += Point2{e * u * (p.x - cx[k]), e * u * p.y};
    }
    return g;
  };
  auto hess = [=](const Point2& p) {
    SymMat2 m;
    for (int k = 0; k < 2; ++k) {
      double e = each(p, k), u = -2.0 / s;
      double dx = p.x - cx[k], dy = p.y;
      m = m + SymMat2{e * (u * u * dx * dx + u), e * u * u * dx * dy, e * (u * u * dy * dy + u)};
    }
    return m;
  };
  return ScalarField::closed_form("two-bump", DomainSpec::disc({0, 0}, 1.5), value, grad, hess);
}

/// (1 - r^2)(1 + 0.3 x): vanishes exactly on the unit circle but is not
/// radial; its single interior maximum sits near (0.141, 0).
inline ScalarField make_tilted() {
  const double e = 0.3;
  auto value = [=](const Point2& p) { return (1.0 - p.norm2()) * (1.0 + e * p.x); };
  auto grad = [=](const Point2& p) {
    return Point2{e - 2.0 * p.x - 3.0 * e * p.x * p.x - e * p.y * p.y,
                  -2.0 * p.y * (1.0 + e * p.x)};
  };
  auto hess = [=](const Point2& p) {
    return SymMat2{-2.0 - 6.0 * e * p.x, -2.0 * e * p.y, -2.0 * (1.0 + e * p.x)};
  };
  return ScalarField::closed_form("tilted", DomainSpec::disc({0, 0}, 1.0), value, grad, hess);
}

inline ScalarField make_log_family_field(double b) {
  std::ostringstream name;
  name << "log-family:" << b;
  RadialSolution sol = build_radial_solution(normalize_profile(GProfile::log_family(b)));
  return ScalarField::from_solution(name.str(), std::move(sol));
}

inline constexpr uint64_t kSplineSeeds[3] = {11, 22, 33};

inline ScalarField make_spline_field(char which) {
  require(which >= 'a' && which <= 'c', Errc::bad_input, "spline corpus fields are spline-a..c");
  GProfile g = random_gprofile(kSplineSeeds[which - 'a']);
  std::string name = std::string("spline-") + which;
  return ScalarField::from_solution(name, build_radial_solution(g));
}

/// sin(pi x) sin(pi y) sampled on [0,1]^2: a grid-mask field whose boundary
/// values vanish exactly on the mask edge (used to exercise the sampled path).
inline ScalarField make_sine_square_grid(size_t nodes = 257) {
  double spacing = 1.0 / static_cast<double>(nodes - 1);
  std::vector<double> v(nodes * nodes);
  for (size_t j = 0; j < nodes; ++j)
    for (size_t i = 0; i < nodes; ++i)
      v[j * nodes + i] = std::sin(kPi * static_cast<double>(i) * spacing) *
                         std::sin(kPi * static_cast<double>(j) * spacing);
  return ScalarField::sampled("sine-square", nodes, nodes, {0.0, 0.0}, spacing, std::move(v));
}

// ---------------------------------------------------------------------------
// Corpus

/// Equality members first (8), then the strict-inequality witnesses (5).
inline std::vector<std::string> corpus_field_names() {
  return {"paraboloid", "exp-radial",   "log-family:0.5", "log-family:1", "log-family:2",
          "spline-a",   "spline-b",     "spline-c",       "quartic",      "r4-dome",
          "bump",       "two-bump",     "tilted"};
}

inline bool is_solution_family_member(const std::string& name) {
  return name == "paraboloid" || name == "exp-radial" || name.rfind("log-family:", 0) == 0 ||
         name.rfind("spline-", 0) == 0;
}

// ---------------------------------------------------------------------------
// Grid CSV: header token line, a line with nx,ny,spacing, then ny rows of nx
// node values ("nan" marks out-of-domain nodes). Grids are centered on (0,0).

inline ScalarField load_grid_csv(std::istream& in, const std::string& name = "grid") {
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), Errc::bad_input, "empty grid CSV");
  auto parse3 = [](const std::string& s, size_t& nx, size_t& ny, double& h) {
    std::istringstream ls(s);
    std::string a, b, c;
    if (!std::getline(ls, a, ',') || !std::getline(ls, b, ',') || !std::getline(ls, c)) return false;
    try {
      nx = static_cast<size_t>(std::stoul(a));
      ny = static_cast<size_t>(std::stoul(b));
      h = std::stod(c);
    } catch (const std::exception&) {
      return false;
    }
    return true;
  };
  size_t nx = 0, ny = 0;
  double spacing = 0.0;
  if (!parse3(line, nx, ny, spacing)) {
    require(static_cast<bool>(std::getline(in, line)), Errc::bad_input, "grid CSV missing sizes");
    require(parse3(line, nx, ny, spacing), Errc::bad_input, "grid CSV header must be nx,ny,spacing");
  }
  require(nx >= 4 && ny >= 4 && spacing > 0.0, Errc::bad_input, "grid CSV sizes out of range");
  std::vector<double> values;
  values.reserve(nx * ny);
  while (std::getline(in, line) && values.size() < nx * ny) {
    std::istringstream ls(line);
    std::string tok;
    while (std::getline(ls, tok, ',')) {
      if (tok.empty()) continue;
      if (tok == "nan" || tok == "NaN") {
        values.push_back(std::numeric_limits<double>::quiet_NaN());
      } else {
        values.push_back(std::stod(tok));
      }
    }
  }
  require(values.size() == nx * ny, Errc::bad_input, "grid CSV value count mismatch");
  Point2 origin{-0.5 * spacing * static_cast<double>(nx - 1),
                -0.5 * spacing * static_cast<double>(ny - 1)};
  return ScalarField::sampled(name, nx, ny, origin, spacing, std::move(values));
}

inline void write_grid_csv(std::ostream& os, const ScalarField& field, size_t nodes) {
  Point2 lo, hi;
  field.domain().bounding_box(lo, hi);
  double spacing = std::max(hi.x - lo.x, hi.y - lo.y) / static_cast<double>(nodes - 1);
  os << "nx,ny,spacing\n" << nodes << ',' << nodes << ',' << std::setprecision(17) << spacing << "\n";
  for (size_t j = 0; j < nodes; ++j) {
    for (size_t i = 0; i < nodes; ++i) {
      Point2 p{lo.x + spacing * static_cast<double>(i), lo.y + spacing * static_cast<double>(j)};
      if (i) os << ',';
      if (field.domain().contains(p)) {
        os << field.value(p);
      } else {
        os << "nan";
      }
    }
    os << '\n';
  }
}

// ---------------------------------------------------------------------------
// Field specs: names ("paraboloid", "log-family:2", ...) or JSON documents
// {"kind": ..., "params": {...}, "domain": {...}?, "diff": {...}?}.

inline DomainSpec parse_domain_json(const nlohmann::json& j) {
  std::string kind = j.value("kind", "disc");
  require(kind == "disc", Errc::bad_input, "only disc domains are specifiable in JSON");
  Point2 c{0, 0};
  if (j.contains("center")) {
    c.x = j.at("center").at(0).get<double>();
    c.y = j.at("center").at(1).get<double>();
  }
  return DomainSpec::disc(c, j.value("radius", 1.0));
}

inline ScalarField make_named_field(const std::string& name) {
  if (name == "paraboloid") return make_paraboloid();
  if (name == "exp-radial") return make_exp_radial();
  if (name == "quartic") return make_quartic();
  if (name == "r4-dome") return make_r4_dome();
  if (name == "bump") return make_bump();
  if (name == "two-bump") return make_two_bump();
  if (name == "tilted") return make_tilted();
  if (name == "constant") return make_constant_field();
  if (name == "sine-square") return make_sine_square_grid();
  if (name.rfind("log-family:", 0) == 0) return make_log_family_field(std::stod(name.substr(11)));
  if (name.rfind("spline-", 0) == 0 && name.size() == 8) return make_spline_field(name[7]);
  fail(Errc::bad_input, "unknown field name: " + name);
}

inline ScalarField parse_field_json(const nlohmann::json& j) {
  require(j.contains("kind"), Errc::bad_input, "field spec missing \"kind\"");
  std::string kind = j.at("kind").get<std::string>();
  nlohmann::json params = j.value("params", nlohmann::json::object());
  ScalarField f;
  if (kind == "radial-g") {
    require(params.contains("g"), Errc::bad_input, "radial-g spec needs params.g");
    GProfile g = parse_gprofile_json(params.at("g"));
    size_t res = params.value("table_resolution", size_t{4096});
    f = ScalarField::from_solution("radial-g", build_radial_solution(g, res));
  } else if (kind == "grid") {
    if (params.contains("csv")) {
      std::ifstream in(params.at("csv").get<std::string>());
      require(in.good(), Errc::bad_input, "cannot open grid CSV");
      f = load_grid_csv(in);
    } else {
      size_t nx = params.at("nx").get<size_t>(), ny = params.at("ny").get<size_t>();
      double spacing = params.at("spacing").get<double>();
      std::vector<double> values = params.at("values").get<std::vector<double>>();
      Point2 origin{-0.5 * spacing * static_cast<double>(nx - 1),
                    -0.5 * spacing * static_cast<double>(ny - 1)};
      f = ScalarField::sampled("grid", nx, ny, origin, spacing, std::move(values));
    }
  } else if (kind == "log-family") {
    f = make_log_family_field(params.value("b", 1.0));
  } else {
    f = make_named_field(kind);
  }
  if (j.contains("diff")) {
    const auto& d = j.at("diff");
    std::string mode = d.value("mode", "analytic");
    if (mode == "fd" || mode == "central-finite-difference")
      f = f.with_diff_mode(DiffMode::finite_difference, d.value("step", 0.0));
  }
  return f;
}

/// Entry point used by the CLI: a built-in name, or a path to a JSON spec.
inline ScalarField make_field(const std::string& spec) {
  if (spec.size() > 5 && spec.substr(spec.size() - 5) == ".json") {
    std::ifstream in(spec);
    require(in.good(), Errc::bad_input, "cannot open field spec: " + spec);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const std::exception& e) {
      fail(Errc::bad_input, std::string("malformed field spec JSON: ") + e.what());
    }
    return parse_field_json(j);
  }
  return make_named_field(spec);
}

}  // namespace hessdisc
