#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "hessdisc/core.hpp"

namespace hessdisc {

/// Bounded planar domain: either an open disc or a grid mask (axis-aligned
/// cells over a bounding box, each cell marked in or out).
struct DomainSpec {
  enum class Kind { disc, grid_mask };

  Kind kind = Kind::disc;

  // disc
  Point2 center{0.0, 0.0};
  double radius = 1.0;

  // grid mask: nx*ny cells over [origin.x, origin.x+nx*h] x [origin.y, origin.y+ny*h]
  size_t nx = 0, ny = 0;
  Point2 origin{0.0, 0.0};
  double spacing = 0.0;
  std::vector<uint8_t> occupancy;  // row-major, cell (i,j) at j*nx+i

  static DomainSpec disc(Point2 c, double r) {
    require(r > 0.0 && c.finite(), Errc::bad_input, "disc radius must be positive and finite");
    DomainSpec d;
    d.kind = Kind::disc;
    d.center = c;
    d.radius = r;
    return d;
  }

  static DomainSpec grid_mask(size_t nx, size_t ny, Point2 origin, double spacing,
                              std::vector<uint8_t> occ) {
    require(nx > 0 && ny > 0 && spacing > 0.0 && occ.size() == nx * ny, Errc::bad_input,
            "grid mask dimensions inconsistent");
    require(std::any_of(occ.begin(), occ.end(), [](uint8_t v) { return v != 0; }), Errc::bad_input,
            "grid mask occupancy is empty");
    DomainSpec d;
    d.kind = Kind::grid_mask;
    d.nx = nx;
    d.ny = ny;
    d.origin = origin;
    d.spacing = spacing;
    d.occupancy = std::move(occ);
    return d;
  }

  bool cell_occupied(long i, long j) const {
    if (i < 0 || j < 0 || i >= static_cast<long>(nx) || j >= static_cast<long>(ny)) return false;
    return occupancy[static_cast<size_t>(j) * nx + static_cast<size_t>(i)] != 0;
  }

  /// Containment in the closed domain.
  bool contains(const Point2& p) const {
    if (kind == Kind::disc) return (p - center).norm() <= radius;
    double fx = (p.x - origin.x) / spacing;
    double fy = (p.y - origin.y) / spacing;
    long i = static_cast<long>(std::floor(fx));
    long j = static_cast<long>(std::floor(fy));
    if (cell_occupied(i, j)) return true;
    // points exactly on a shared edge belong to the closed cells on both sides
    bool on_vx = fx == std::floor(fx), on_vy = fy == std::floor(fy);
    if (on_vx && cell_occupied(i - 1, j)) return true;
    if (on_vy && cell_occupied(i, j - 1)) return true;
    if (on_vx && on_vy && cell_occupied(i - 1, j - 1)) return true;
    return false;
  }

  /// Strict interior with a safety margin (used by differentiation stencils).
  bool interior(const Point2& p, double margin = 0.0) const {
    if (kind == Kind::disc) return (p - center).norm() < radius - margin;
    if (margin <= 0.0) return contains(p);
    return contains(p) && contains({p.x + margin, p.y}) && contains({p.x - margin, p.y}) &&
           contains({p.x, p.y + margin}) && contains({p.x, p.y - margin});
  }

  void bounding_box(Point2& lo, Point2& hi) const {
    if (kind == Kind::disc) {
      lo = {center.x - radius, center.y - radius};
      hi = {center.x + radius, center.y + radius};
      return;
    }
    lo = origin;
    hi = {origin.x + spacing * static_cast<double>(nx), origin.y + spacing * static_cast<double>(ny)};
  }

  double diameter() const {
    if (kind == Kind::disc) return 2.0 * radius;
    Point2 lo, hi;
    bounding_box(lo, hi);
    return (hi - lo).norm();
  }

  /// Sample points on the topological boundary. For discs these lie on the
  /// circle; for grid masks they are midpoints of in/out cell edges.
  std::vector<Point2> boundary_samples(size_t target) const {
    std::vector<Point2> out;
    if (kind == Kind::disc) {
      out.reserve(target);
      for (size_t k = 0; k < target; ++k) {
        double th = kTwoPi * static_cast<double>(k) / static_cast<double>(target);
        out.push_back({center.x + radius * std::cos(th), center.y + radius * std::sin(th)});
      }
      return out;
    }
    for (long j = 0; j < static_cast<long>(ny); ++j) {
      for (long i = 0; i < static_cast<long>(nx); ++i) {
        if (!cell_occupied(i, j)) continue;
        double cx = origin.x + spacing * (static_cast<double>(i) + 0.5);
        double cy = origin.y + spacing * (static_cast<double>(j) + 0.5);
        double hs = 0.5 * spacing;
        if (!cell_occupied(i - 1, j)) out.push_back({cx - hs, cy});
        if (!cell_occupied(i + 1, j)) out.push_back({cx + hs, cy});
        if (!cell_occupied(i, j - 1)) out.push_back({cx, cy - hs});
        if (!cell_occupied(i, j + 1)) out.push_back({cx, cy + hs});
      }
    }
    return out;
  }
};

}  // namespace hessdisc
