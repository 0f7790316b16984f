#pragma once

#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "hessdisc/core.hpp"
#include "hessdisc/domain.hpp"
#include "hessdisc/numerics.hpp"
#include "hessdisc/radial.hpp"

namespace hessdisc {

enum class DiffMode { analytic, finite_difference };

namespace detail {

/// Node-sampled scalar data with precomputed centered-difference gradient and
/// Hessian grids. Queries interpolate bilinearly between node quantities;
/// nodes whose stencil leaves the valid set are marked unusable, which keeps
/// differentiation one cell away from the mask boundary.
struct GridData {
  size_t nx = 0, ny = 0;
  Point2 origin{0, 0};
  double spacing = 0.0;
  std::vector<double> v;                      // node values (NaN = outside)
  std::vector<double> gx, gy;                 // node gradient
  std::vector<double> hxx, hxy, hyy;          // node Hessian
  std::vector<uint8_t> deriv_ok;              // full stencil available

  size_t idx(size_t i, size_t j) const { return j * nx + i; }
  bool node_ok(long i, long j) const {
    return i >= 0 && j >= 0 && i < static_cast<long>(nx) && j < static_cast<long>(ny) &&
           std::isfinite(v[idx(static_cast<size_t>(i), static_cast<size_t>(j))]);
  }

  void build_derivatives() {
    size_t n = nx * ny;
    gx.assign(n, std::numeric_limits<double>::quiet_NaN());
    gy = gx;
    hxx = gx;
    hxy = gx;
    hyy = gx;
    deriv_ok.assign(n, 0);
    double h = spacing;
    for (long j = 0; j < static_cast<long>(ny); ++j) {
      for (long i = 0; i < static_cast<long>(nx); ++i) {
        bool ok = true;
        for (long dj = -1; dj <= 1 && ok; ++dj)
          for (long di = -1; di <= 1 && ok; ++di) ok = node_ok(i + di, j + dj);
        if (!ok) continue;
        size_t c = idx(static_cast<size_t>(i), static_cast<size_t>(j));
        auto V = [&](long di, long dj) {
          return v[idx(static_cast<size_t>(i + di), static_cast<size_t>(j + dj))];
        };
        gx[c] = (V(1, 0) - V(-1, 0)) / (2 * h);
        gy[c] = (V(0, 1) - V(0, -1)) / (2 * h);
        hxx[c] = (V(1, 0) - 2 * V(0, 0) + V(-1, 0)) / (h * h);
        hyy[c] = (V(0, 1) - 2 * V(0, 0) + V(0, -1)) / (h * h);
        hxy[c] = (V(1, 1) - V(1, -1) - V(-1, 1) + V(-1, -1)) / (4 * h * h);
        deriv_ok[c] = 1;
      }
    }
  }

  struct CellRef {
    size_t i, j;
    double fx, fy;
  };

  CellRef locate(const Point2& p) const {
    double fx = (p.x - origin.x) / spacing;
    double fy = (p.y - origin.y) / spacing;
    long i = static_cast<long>(std::floor(fx));
    long j = static_cast<long>(std::floor(fy));
    i = std::max(0L, std::min<long>(i, static_cast<long>(nx) - 2));
    j = std::max(0L, std::min<long>(j, static_cast<long>(ny) - 2));
    return {static_cast<size_t>(i), static_cast<size_t>(j), fx - static_cast<double>(i),
            fy - static_cast<double>(j)};
  }

  double bilinear(const std::vector<double>& q, const CellRef& c) const {
    double q00 = q[idx(c.i, c.j)], q10 = q[idx(c.i + 1, c.j)];
    double q01 = q[idx(c.i, c.j + 1)], q11 = q[idx(c.i + 1, c.j + 1)];
    return (1 - c.fx) * (1 - c.fy) * q00 + c.fx * (1 - c.fy) * q10 + (1 - c.fx) * c.fy * q01 +
           c.fx * c.fy * q11;
  }

  bool cell_deriv_ok(const CellRef& c) const {
    return deriv_ok[idx(c.i, c.j)] && deriv_ok[idx(c.i + 1, c.j)] && deriv_ok[idx(c.i, c.j + 1)] &&
           deriv_ok[idx(c.i + 1, c.j + 1)];
  }

  bool cell_value_ok(const CellRef& c) const {
    return std::isfinite(v[idx(c.i, c.j)]) && std::isfinite(v[idx(c.i + 1, c.j)]) &&
           std::isfinite(v[idx(c.i, c.j + 1)]) && std::isfinite(v[idx(c.i + 1, c.j + 1)]);
  }

  /// Grid-mask over cells with four finite corner nodes.
  DomainSpec derive_mask() const {
    std::vector<uint8_t> occ((nx - 1) * (ny - 1), 0);
    for (size_t j = 0; j + 1 < ny; ++j)
      for (size_t i = 0; i + 1 < nx; ++i)
        occ[j * (nx - 1) + i] = std::isfinite(v[idx(i, j)]) && std::isfinite(v[idx(i + 1, j)]) &&
                                std::isfinite(v[idx(i, j + 1)]) && std::isfinite(v[idx(i + 1, j + 1)]);
    return DomainSpec::grid_mask(nx - 1, ny - 1, origin, spacing, std::move(occ));
  }
};

}  // namespace detail

/// A scalar field on a bounded planar domain with value/gradient/Hessian
/// access. Evaluators are pure and immutable after construction.
class ScalarField {
 public:
  using ValueFn = std::function<double(const Point2&)>;
  using GradFn = std::function<Point2(const Point2&)>;
  using HessFn = std::function<SymMat2(const Point2&)>;
  using RadialFn = std::function<double(double)>;

  ScalarField() = default;

  // -- constructors ---------------------------------------------------------

  /// Closed-form radial field f(x,y) = h(x^2+y^2) from hand-coded h, h', h''.
  static ScalarField closed_form_radial(std::string name, DomainSpec dom, RadialFn h, RadialFn hp,
                                        RadialFn hpp) {
    ScalarField f;
    f.name_ = std::move(name);
    f.domain_ = std::move(dom);
    f.h_ = std::move(h);
    f.hp_ = std::move(hp);
    f.hpp_ = std::move(hpp);
    f.closed_form_ = true;
    f.init_radial_evaluators();
    f.finish_init();
    return f;
  }

  /// Radial field backed by a profile-built solution table on the unit disc.
  static ScalarField from_solution(std::string name, RadialSolution sol) {
    ScalarField f;
    f.name_ = std::move(name);
    f.domain_ = DomainSpec::disc({0, 0}, 1.0);
    f.solution_ = std::make_shared<RadialSolution>(std::move(sol));
    const RadialSolution* s = f.solution_.get();
    f.h_ = [s](double t) { return s->h(t); };
    f.hp_ = [s](double t) { return s->hprime(t); };
    f.hpp_ = [s](double t) { return s->hsecond(t); };
    f.closed_form_ = true;
    f.init_radial_evaluators();
    f.finish_init();
    return f;
  }

  /// General closed-form field from hand-coded value/gradient/Hessian.
  static ScalarField closed_form(std::string name, DomainSpec dom, ValueFn v, GradFn g, HessFn h) {
    ScalarField f;
    f.name_ = std::move(name);
    f.domain_ = std::move(dom);
    f.value_fn_ = std::move(v);
    f.grad_fn_ = std::move(g);
    f.hess_fn_ = std::move(h);
    f.closed_form_ = true;
    f.finish_init();
    return f;
  }

  /// Node-sampled field; the domain defaults to the mask of fully-finite
  /// cells but may be overridden (e.g. an analytic disc the samples cover).
  static ScalarField sampled(std::string name, size_t nx, size_t ny, Point2 origin, double spacing,
                             std::vector<double> values, std::optional<DomainSpec> dom = {}) {
    require(nx >= 4 && ny >= 4 && values.size() == nx * ny, Errc::bad_input,
            "sampled field needs nx*ny values, nx,ny >= 4");
    ScalarField f;
    f.name_ = std::move(name);
    f.grid_ = std::make_shared<detail::GridData>();
    f.grid_->nx = nx;
    f.grid_->ny = ny;
    f.grid_->origin = origin;
    f.grid_->spacing = spacing;
    f.grid_->v = std::move(values);
    f.grid_->build_derivatives();
    f.domain_ = dom ? *dom : f.grid_->derive_mask();
    f.fd_step_ = spacing;
    f.finish_init();
    return f;
  }

  // -- configuration --------------------------------------------------------

  ScalarField with_diff_mode(DiffMode m, double step = 0.0) const {
    ScalarField f = *this;
    f.mode_ = m;
    if (step > 0.0) f.fd_step_ = step;
    return f;
  }

  const std::string& name() const { return name_; }
  const DomainSpec& domain() const { return domain_; }
  DiffMode diff_mode() const { return mode_; }
  bool is_closed_form() const { return closed_form_; }
  bool is_sampled() const { return grid_ != nullptr; }
  bool is_radial() const { return static_cast<bool>(h_); }
  const std::shared_ptr<RadialSolution>& solution() const { return solution_; }

  /// The configured finite-difference step (defaults: grid spacing for
  /// sampled fields, 1e-4 * domain diameter for closed forms).
  double fd_step() const { return fd_step_ > 0.0 ? fd_step_ : 1e-4 * domain_.diameter(); }

  /// max |f| over the domain (probed once at construction).
  double scale() const { return scale_; }

  double radial_h(double t) const { return h_(t); }
  double radial_hprime(double t) const { return hp_(t); }
  double radial_hsecond(double t) const { return hpp_(t); }

  // -- evaluation -----------------------------------------------------------

  double value(const Point2& p) const {
    require(p.finite(), Errc::bad_input, "non-finite query point");
    require(domain_.contains(p), Errc::point_outside_domain, "value query outside closed domain");
    double r = raw_value(p);
    require(std::isfinite(r), Errc::nan_encountered, "field value is not finite");
    return r;
  }

  Point2 gradient(const Point2& p) const {
    require(p.finite(), Errc::bad_input, "non-finite query point");
    require(domain_.contains(p), Errc::point_outside_domain, "gradient query outside domain");
    Point2 g;
    if (grid_) {
      auto c = grid_->locate(p);
      require(grid_->cell_deriv_ok(c), Errc::point_too_close_to_boundary,
              "gradient stencil leaves the grid mask");
      g = {grid_->bilinear(grid_->gx, c), grid_->bilinear(grid_->gy, c)};
    } else if (mode_ == DiffMode::analytic && grad_fn_) {
      g = grad_fn_(p);
    } else {
      double s = checked_step();
      require(domain_.interior(p, s), Errc::point_too_close_to_boundary,
              "finite-difference gradient too close to the boundary");
      g = {(raw_value({p.x + s, p.y}) - raw_value({p.x - s, p.y})) / (2 * s),
           (raw_value({p.x, p.y + s}) - raw_value({p.x, p.y - s})) / (2 * s)};
    }
    require(g.finite(), Errc::nan_encountered, "gradient is not finite");
    return g;
  }

  SymMat2 hessian(const Point2& p) const {
    require(p.finite(), Errc::bad_input, "non-finite query point");
    require(domain_.contains(p), Errc::point_outside_domain, "hessian query outside domain");
    SymMat2 m;
    if (grid_) {
      auto c = grid_->locate(p);
      require(grid_->cell_deriv_ok(c), Errc::point_too_close_to_boundary,
              "hessian stencil leaves the grid mask");
      m = {grid_->bilinear(grid_->hxx, c), grid_->bilinear(grid_->hxy, c),
           grid_->bilinear(grid_->hyy, c)};
    } else if (mode_ == DiffMode::analytic && hess_fn_) {
      m = hess_fn_(p);
    } else {
      double s = checked_step();
      require(domain_.interior(p, 2 * s), Errc::point_too_close_to_boundary,
              "finite-difference hessian needs distance >= 2*step from the boundary");
      double f0 = raw_value(p);
      double fxx = (raw_value({p.x + s, p.y}) - 2 * f0 + raw_value({p.x - s, p.y})) / (s * s);
      double fyy = (raw_value({p.x, p.y + s}) - 2 * f0 + raw_value({p.x, p.y - s})) / (s * s);
      double fxy = (raw_value({p.x + s, p.y + s}) - raw_value({p.x + s, p.y - s}) -
                    raw_value({p.x - s, p.y + s}) + raw_value({p.x - s, p.y - s})) /
                   (4 * s * s);
      m = {fxx, fxy, fyy};
    }
    require(m.finite(), Errc::nan_encountered, "hessian is not finite");
    return m;
  }

  /// max |f| over boundary samples; the admissibility precondition for the
  /// chain and certificate pipelines.
  double boundary_zero_violation(size_t samples = 2048) const {
    double worst = 0.0;
    for (const Point2& p : domain_.boundary_samples(samples)) {
      if (grid_) {
        auto c = grid_->locate(p);
        if (!grid_->cell_value_ok(c)) continue;
        worst = std::max(worst, std::abs(grid_->bilinear(grid_->v, c)));
      } else {
        worst = std::max(worst, std::abs(raw_value(p)));
      }
    }
    return worst;
  }

  double boundary_zero_tolerance(const Tolerances& tol) const {
    return grid_ ? tol.bc_sampled : tol.bc_closed_form;
  }

 private:
  double raw_value(const Point2& p) const {
    if (grid_) {
      auto c = grid_->locate(p);
      require(grid_->cell_value_ok(c), Errc::point_outside_domain,
              "value interpolation cell has out-of-mask nodes");
      return grid_->bilinear(grid_->v, c);
    }
    return value_fn_(p);
  }

  double checked_step() const {
    double s = fd_step();
    require(s >= 8.0 * std::numeric_limits<double>::epsilon() * domain_.diameter(),
            Errc::step_underflow, "finite-difference step below 8*eps*scale");
    return s;
  }

  void init_radial_evaluators() {
    auto h = h_;
    auto hp = hp_;
    auto hpp = hpp_;
    Point2 c = domain_.center;
    value_fn_ = [h, c](const Point2& p) { return h((p - c).norm2()); };
    grad_fn_ = [hp, c](const Point2& p) {
      Point2 d = p - c;
      double s = 2.0 * hp(d.norm2());
      return Point2{s * d.x, s * d.y};
    };
    hess_fn_ = [hp, hpp, c](const Point2& p) {
      Point2 d = p - c;
      double t = d.norm2();
      double a = 2.0 * hp(t), b = 4.0 * hpp(t);
      return SymMat2{a + b * d.x * d.x, b * d.x * d.y, a + b * d.y * d.y};
    };
  }

  void finish_init() {
    // probe max |f| for the gradient guard band and report scales
    double worst = 0.0;
    Point2 lo, hi;
    domain_.bounding_box(lo, hi);
    const size_t n = 129;
    for (size_t j = 0; j < n; ++j) {
      for (size_t i = 0; i < n; ++i) {
        Point2 p{lo.x + (hi.x - lo.x) * static_cast<double>(i) / (n - 1),
                 lo.y + (hi.y - lo.y) * static_cast<double>(j) / (n - 1)};
        if (!domain_.contains(p)) continue;
        if (grid_) {
          auto c = grid_->locate(p);
          if (!grid_->cell_value_ok(c)) continue;
          worst = std::max(worst, std::abs(grid_->bilinear(grid_->v, c)));
        } else {
          double v = value_fn_(p);
          if (std::isfinite(v)) worst = std::max(worst, std::abs(v));
        }
      }
    }
    scale_ = worst > 0.0 ? worst : 1.0;
  }

  std::string name_;
  DomainSpec domain_;
  DiffMode mode_ = DiffMode::analytic;
  double fd_step_ = 0.0;
  bool closed_form_ = false;
  double scale_ = 1.0;

  ValueFn value_fn_;
  GradFn grad_fn_;
  HessFn hess_fn_;
  RadialFn h_, hp_, hpp_;
  std::shared_ptr<RadialSolution> solution_;
  std::shared_ptr<detail::GridData> grid_;
};

// -- spec-level operations ----------------------------------------------------

inline double eval_field(const ScalarField& f, const Point2& p) { return f.value(p); }
inline Point2 gradient(const ScalarField& f, const Point2& p) { return f.gradient(p); }
inline SymMat2 hessian(const ScalarField& f, const Point2& p) { return f.hessian(p); }

/// g(t) = ln(-h'(t)) from a radial field. Solution-backed fields invert their
/// tabulated antiderivative; closed forms use their hand-coded derivative.
inline GProfile recover_g(const ScalarField& f, size_t knots = 129) {
  require(f.is_radial(), Errc::bad_input, "recover_g needs a radial field");
  if (f.solution()) return recover_g(*f.solution(), knots);
  return recover_g_from_derivative([&](double t) { return f.radial_hprime(t); }, knots);
}

}  // namespace hessdisc
