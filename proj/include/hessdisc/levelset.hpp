#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <unordered_map>
#include <vector>

#include "hessdisc/core.hpp"
#include "hessdisc/field.hpp"
#include "hessdisc/parallel.hpp"

namespace hessdisc {

/// Node samples of a field over its domain bounding box, shared by every
/// level extraction at one resolution. Nodes outside the closed domain carry
/// NaN; marching squares only visits cells whose four corners are finite.
class FieldGrid {
 public:
  FieldGrid(const ScalarField& field, size_t resolution) {
    require(resolution >= 16, Errc::bad_input, "grid resolution too small");
    cells_ = resolution;
    nodes_ = resolution + 1;
    field.domain().bounding_box(lo_, hi_);
    hx_ = (hi_.x - lo_.x) / static_cast<double>(cells_);
    hy_ = (hi_.y - lo_.y) / static_cast<double>(cells_);
    v_.assign(nodes_ * nodes_, std::numeric_limits<double>::quiet_NaN());
    parallel_for(nodes_, [&](size_t j) {
      for (size_t i = 0; i < nodes_; ++i) {
        Point2 p = node(i, j);
        if (field.domain().contains(p)) v_[j * nodes_ + i] = field.value(p);
      }
    });
    vmin_ = std::numeric_limits<double>::infinity();
    vmax_ = -vmin_;
    for (double x : v_) {
      if (!std::isfinite(x)) continue;
      vmin_ = std::min(vmin_, x);
      vmax_ = std::max(vmax_, x);
    }
    require(vmin_ < vmax_, Errc::bad_input, "field is constant on the sampling grid");
  }

  size_t cells() const { return cells_; }
  double min_value() const { return vmin_; }
  double max_value() const { return vmax_; }
  double max_abs_value() const { return std::max(std::abs(vmin_), std::abs(vmax_)); }
  double cell_size() const { return std::max(hx_, hy_); }

  Point2 node(size_t i, size_t j) const {
    return {lo_.x + hx_ * static_cast<double>(i), lo_.y + hy_ * static_cast<double>(j)};
  }
  double value(size_t i, size_t j) const { return v_[j * nodes_ + i]; }
  bool finite(size_t i, size_t j) const { return std::isfinite(value(i, j)); }

 private:
  size_t cells_ = 0, nodes_ = 0;
  Point2 lo_, hi_;
  double hx_ = 0, hy_ = 0;
  std::vector<double> v_;
  double vmin_ = 0, vmax_ = 0;
};

/// One closed component of f^{-1}(c), resampled to uniform arclength and
/// oriented so the outward normal equals -grad f/|grad f|.
struct LevelCurve {
  double level = 0.0;
  std::vector<Point2> vertices;   // closed: vertices.front() == vertices.back()
  std::vector<double> arclength;  // cumulative, arclength.back() == length
  std::vector<Point2> tangents;   // unit, per vertex (last duplicates first)
  std::vector<Point2> normals;    // unit outward, per vertex
  std::vector<double> kappa_geom;
  std::vector<double> kappa_hess;
  std::vector<double> grad_norm;  // |grad f| per vertex
  size_t raw_vertex_count = 0;
  double raw_mean_segment = 0.0;
  double min_grad_norm = 0.0;
  int winding = 0;

  double length() const { return arclength.empty() ? 0.0 : arclength.back(); }
  size_t samples() const { return vertices.empty() ? 0 : vertices.size() - 1; }
  Point2 leftmost() const {
    Point2 best = vertices.front();
    for (const auto& p : vertices)
      if (p.x < best.x || (p.x == best.x && p.y < best.y)) best = p;
    return best;
  }
};

struct LevelSetDecomposition {
  double level = 0.0;
  std::vector<LevelCurve> curves;
  size_t beta() const { return curves.size(); }
};

namespace detail {

struct Segment {
  int64_t e0, e1;
};

inline int64_t hedge_key(size_t i, size_t j, size_t nodes) {
  return 2 * static_cast<int64_t>(j * nodes + i);
}
inline int64_t vedge_key(size_t i, size_t j, size_t nodes) {
  return 2 * static_cast<int64_t>(j * nodes + i) + 1;
}

inline Point2 edge_point(int64_t key, const FieldGrid& g, double c, size_t nodes) {
  bool vertical = key & 1;
  size_t flat = static_cast<size_t>(key >> 1);
  size_t i = flat % nodes, j = flat / nodes;
  double v0 = g.value(i, j);
  size_t i1 = vertical ? i : i + 1;
  size_t j1 = vertical ? j + 1 : j;
  double v1 = g.value(i1, j1);
  double t = (c - v0) / (v1 - v0);
  t = std::min(1.0, std::max(0.0, t));
  Point2 p0 = g.node(i, j), p1 = g.node(i1, j1);
  return p0 + (p1 - p0) * t;
}

/// Marching squares over the finite cells. Returns segment soup in edge-key
/// space plus a flag for chains that terminate on the mask boundary.
inline void march_cells(const FieldGrid& g, const ScalarField& field, double c,
                        std::vector<Segment>& segs) {
  size_t n = g.cells();
  size_t nodes = n + 1;
  segs.clear();
  for (size_t j = 0; j < n; ++j) {
    for (size_t i = 0; i < n; ++i) {
      if (!(g.finite(i, j) && g.finite(i + 1, j) && g.finite(i, j + 1) && g.finite(i + 1, j + 1)))
        continue;
      // corner order: 0=(i,j) 1=(i+1,j) 2=(i+1,j+1) 3=(i,j+1)
      bool b0 = g.value(i, j) > c, b1 = g.value(i + 1, j) > c;
      bool b2 = g.value(i + 1, j + 1) > c, b3 = g.value(i, j + 1) > c;
      int code = (b0 ? 1 : 0) | (b1 ? 2 : 0) | (b2 ? 4 : 0) | (b3 ? 8 : 0);
      if (code == 0 || code == 15) continue;
      int64_t S = hedge_key(i, j, nodes);
      int64_t E = vedge_key(i + 1, j, nodes);
      int64_t N = hedge_key(i, j + 1, nodes);
      int64_t W = vedge_key(i, j, nodes);
      auto emit = [&](int64_t a, int64_t b) { segs.push_back({a, b}); };
      switch (code) {
        case 1: case 14: emit(W, S); break;
        case 2: case 13: emit(S, E); break;
        case 3: case 12: emit(W, E); break;
        case 4: case 11: emit(E, N); break;
        case 6: case 9:  emit(S, N); break;
        case 7: case 8:  emit(N, W); break;
        case 5: case 10: {
          // ambiguous saddle: resolve with the field value at the cell center
          Point2 center = (g.node(i, j) + g.node(i + 1, j + 1)) * 0.5;
          double vc;
          try {
            vc = field.value(center);
          } catch (const ToolkitError&) {
            vc = 0.25 * (g.value(i, j) + g.value(i + 1, j) + g.value(i + 1, j + 1) +
                         g.value(i, j + 1));
          }
          bool center_hi = vc > c;
          bool diag_hi = (code == 5);  // corners 0 and 2 above the level
          if (center_hi == diag_hi) {
            emit(W, N);
            emit(E, S);
          } else {
            emit(W, S);
            emit(E, N);
          }
          break;
        }
        default: break;
      }
    }
  }
}

}  // namespace detail

struct ExtractionOptions {
  size_t resample = 512;    // uniform-arclength samples per curve
  double eps_grad = 1e-6;   // gradient guard band (absolute)
  bool compute_hessian_curvature = true;
};

namespace detail {

inline std::vector<std::vector<Point2>> stitch(const FieldGrid& g, const ScalarField& field,
                                               double c, size_t& open_chains) {
  std::vector<Segment> segs;
  march_cells(g, field, c, segs);
  size_t nodes = g.cells() + 1;

  std::unordered_map<int64_t, std::pair<int, int>> incident;  // edge -> up to two seg ids
  incident.reserve(segs.size() * 2);
  auto add_incident = [&](int64_t e, int sid) {
    auto it = incident.find(e);
    if (it == incident.end()) {
      incident[e] = {sid, -1};
    } else {
      it->second.second = sid;
    }
  };
  for (size_t s = 0; s < segs.size(); ++s) {
    add_incident(segs[s].e0, static_cast<int>(s));
    add_incident(segs[s].e1, static_cast<int>(s));
  }

  std::vector<char> used(segs.size(), 0);
  std::vector<std::vector<Point2>> loops;
  open_chains = 0;

  auto next_seg = [&](int64_t edge, int prev_sid) -> int {
    auto it = incident.find(edge);
    if (it == incident.end()) return -1;
    if (it->second.first != prev_sid && it->second.first >= 0 && !used[it->second.first])
      return it->second.first;
    if (it->second.second != prev_sid && it->second.second >= 0 && !used[it->second.second])
      return it->second.second;
    return -1;
  };

  for (size_t s0 = 0; s0 < segs.size(); ++s0) {
    if (used[s0]) continue;
    // walk forward from segs[s0].e1; if we hit a dead end, the chain is open
    std::vector<int64_t> chain{segs[s0].e0, segs[s0].e1};
    used[s0] = 1;
    int sid = static_cast<int>(s0);
    bool closed = false;
    for (;;) {
      int nxt = next_seg(chain.back(), sid);
      if (nxt < 0) break;
      const Segment& sg = segs[nxt];
      int64_t tail = (sg.e0 == chain.back()) ? sg.e1 : sg.e0;
      used[nxt] = 1;
      sid = nxt;
      if (tail == chain.front()) {
        closed = true;
        break;
      }
      chain.push_back(tail);
    }
    if (!closed) {
      // extend backwards to account the full open chain before rejecting it
      int bsid = static_cast<int>(s0);
      for (;;) {
        int nxt = next_seg(chain.front(), bsid);
        if (nxt < 0) break;
        const Segment& sg = segs[nxt];
        int64_t head = (sg.e0 == chain.front()) ? sg.e1 : sg.e0;
        used[nxt] = 1;
        bsid = nxt;
        chain.insert(chain.begin(), head);
      }
      ++open_chains;
      continue;
    }
    std::vector<Point2> pts;
    pts.reserve(chain.size());
    for (int64_t e : chain) pts.push_back(edge_point(e, g, c, nodes));
    // drop coincident consecutive points (level passing exactly through a node)
    std::vector<Point2> clean;
    double tol = 1e-12 * g.cell_size();
    for (const auto& p : pts)
      if (clean.empty() || (p - clean.back()).norm() > tol) clean.push_back(p);
    while (clean.size() > 1 && (clean.front() - clean.back()).norm() <= tol) clean.pop_back();
    if (clean.size() >= 3) loops.push_back(std::move(clean));
  }
  return loops;
}

inline double polyline_length(const std::vector<Point2>& pts, bool closed) {
  double L = 0;
  for (size_t i = 0; i + 1 < pts.size(); ++i) L += (pts[i + 1] - pts[i]).norm();
  if (closed) L += (pts.front() - pts.back()).norm();
  return L;
}

}  // namespace detail

/// Resample a closed loop to m uniform-arclength points and fill in frames
/// and curvature. `field` supplies gradients for orientation and the Hessian
/// route; pass nullptr for synthetic polylines.
inline LevelCurve build_level_curve(std::vector<Point2> loop, double c, const ScalarField* field,
                                    const ExtractionOptions& opt) {
  require(loop.size() >= 3, Errc::degenerate_segment, "loop has fewer than 3 distinct vertices");
  LevelCurve curve;
  curve.level = c;
  curve.raw_vertex_count = loop.size();
  double L = detail::polyline_length(loop, true);
  require(L > 0.0, Errc::degenerate_segment, "zero-length loop");
  curve.raw_mean_segment = L / static_cast<double>(loop.size());

  size_t m = opt.resample;
  std::vector<double> cum(loop.size() + 1, 0.0);
  for (size_t i = 0; i < loop.size(); ++i) {
    const Point2& a = loop[i];
    const Point2& b = loop[(i + 1) % loop.size()];
    cum[i + 1] = cum[i] + (b - a).norm();
  }
  curve.vertices.resize(m + 1);
  size_t seg = 0;
  for (size_t k = 0; k < m; ++k) {
    double target = L * static_cast<double>(k) / static_cast<double>(m);
    while (seg + 1 < cum.size() - 1 && cum[seg + 1] <= target) ++seg;
    const Point2& a = loop[seg];
    const Point2& b = loop[(seg + 1) % loop.size()];
    double span = cum[seg + 1] - cum[seg];
    double t = span > 0 ? (target - cum[seg]) / span : 0.0;
    curve.vertices[k] = a + (b - a) * t;
  }
  curve.vertices[m] = curve.vertices[0];

  double ds = L / static_cast<double>(m);
  curve.arclength.resize(m + 1);
  for (size_t k = 0; k <= m; ++k) curve.arclength[k] = ds * static_cast<double>(k);

  auto fill_frames = [&](bool flip) {
    curve.tangents.assign(m + 1, Point2{});
    curve.normals.assign(m + 1, Point2{});
    for (size_t k = 0; k < m; ++k) {
      const Point2& prev = curve.vertices[(k + m - 1) % m];
      const Point2& next = curve.vertices[(k + 1) % m];
      Point2 w = (next - prev).normalized();
      if (flip) w = w * -1.0;
      curve.tangents[k] = w;
      curve.normals[k] = w.perp_right();
    }
    curve.tangents[m] = curve.tangents[0];
    curve.normals[m] = curve.normals[0];
  };
  fill_frames(false);

  if (field) {
    curve.grad_norm.assign(m + 1, 0.0);
    double best = -1.0;
    size_t best_k = 0;
    curve.min_grad_norm = std::numeric_limits<double>::infinity();
    std::vector<Point2> grads(m + 1);
    for (size_t k = 0; k < m; ++k) {
      grads[k] = field->gradient(curve.vertices[k]);
      double gn = grads[k].norm();
      curve.grad_norm[k] = gn;
      curve.min_grad_norm = std::min(curve.min_grad_norm, gn);
      if (gn > best) {
        best = gn;
        best_k = k;
      }
    }
    grads[m] = grads[0];
    curve.grad_norm[m] = curve.grad_norm[0];
    // orientation convention: outward normal = -grad f / |grad f|
    Point2 outward = grads[best_k] * (-1.0 / std::max(best, 1e-300));
    if (curve.normals[best_k].dot(outward) < 0.0) {
      // the duplicated endpoint keeps reversed closed cycles anchored at
      // the same first vertex, so all per-vertex arrays stay aligned
      std::reverse(curve.vertices.begin(), curve.vertices.end());
      std::reverse(curve.grad_norm.begin(), curve.grad_norm.end());
      std::reverse(grads.begin(), grads.end());
      fill_frames(false);
    }
    if (opt.compute_hessian_curvature) {
      curve.kappa_hess.assign(m + 1, 0.0);
      for (size_t k = 0; k < m; ++k) {
        SymMat2 H = field->hessian(curve.vertices[k]);
        double gn = curve.grad_norm[k];
        curve.kappa_hess[k] =
            gn >= opt.eps_grad ? std::abs(H.quadratic_form(curve.tangents[k])) / gn
                               : std::numeric_limits<double>::quiet_NaN();
      }
      curve.kappa_hess[m] = curve.kappa_hess[0];
    }
  } else {
    curve.min_grad_norm = std::numeric_limits<double>::quiet_NaN();
  }

  // geometric curvature: turning rate of the unwrapped tangent angle over a
  // window matching the raw vertex spacing (a narrower window only samples
  // chord noise when the extraction polyline is coarse)
  std::vector<double> theta(m);
  for (size_t k = 0; k < m; ++k) theta[k] = std::atan2(curve.tangents[k].y, curve.tangents[k].x);
  std::vector<double> unwrapped(m);
  unwrapped[0] = theta[0];
  for (size_t k = 1; k < m; ++k) {
    double d = theta[k] - theta[k - 1];
    while (d > kPi) d -= kTwoPi;
    while (d < -kPi) d += kTwoPi;
    unwrapped[k] = unwrapped[k - 1] + d;
  }
  double wrap_close = theta[0] - theta[m - 1];
  while (wrap_close > kPi) wrap_close -= kTwoPi;
  while (wrap_close < -kPi) wrap_close += kTwoPi;
  double total_turn = unwrapped[m - 1] + wrap_close - unwrapped[0];
  curve.winding = static_cast<int>(std::lround(total_turn / kTwoPi));

  size_t w = static_cast<size_t>(std::lround(curve.raw_mean_segment / ds));
  w = std::max<size_t>(1, std::min(w, m / 8));
  auto theta_at = [&](long idx) {
    long wraps = 0;
    while (idx < 0) {
      idx += static_cast<long>(m);
      --wraps;
    }
    while (idx >= static_cast<long>(m)) {
      idx -= static_cast<long>(m);
      ++wraps;
    }
    return unwrapped[static_cast<size_t>(idx)] + static_cast<double>(wraps) * total_turn;
  };
  curve.kappa_geom.assign(m + 1, 0.0);
  for (size_t k = 0; k < m; ++k) {
    double dtheta = theta_at(static_cast<long>(k + w)) - theta_at(static_cast<long>(k) - static_cast<long>(w));
    curve.kappa_geom[k] = dtheta / (2.0 * static_cast<double>(w) * ds);
  }
  curve.kappa_geom[m] = curve.kappa_geom[0];
  return curve;
}

/// Signed turning integral; +-2pi for simple closed curves (Hopf), ~0 for a
/// figure eight.
inline double total_curvature(const LevelCurve& curve) {
  double acc = 0.0;
  size_t m = curve.samples();
  for (size_t k = 0; k < m; ++k)
    acc += curve.kappa_geom[k] * (curve.arclength[k + 1] - curve.arclength[k]);
  return acc;
}

/// Geometric curvature of a synthetic closed polyline (testing and external
/// inputs; extraction fills curves directly).
inline LevelCurve curve_from_polyline(std::vector<Point2> pts, size_t resample = 512) {
  // reject exact duplicates
  std::vector<Point2> clean;
  for (const auto& p : pts) {
    require(clean.empty() || (p - clean.back()).norm() > 0.0, Errc::degenerate_segment,
            "repeated vertex in polyline");
    clean.push_back(p);
  }
  if (clean.size() > 1 && (clean.front() - clean.back()).norm() == 0.0) clean.pop_back();
  require(clean.size() >= 16, Errc::curve_too_short, "closed curve needs >= 16 vertices");
  ExtractionOptions opt;
  opt.resample = resample;
  opt.compute_hessian_curvature = false;
  return build_level_curve(std::move(clean), 0.0, nullptr, opt);
}

inline std::vector<double> curvature_geometric(const LevelCurve& curve) {
  require(curve.raw_vertex_count >= 16, Errc::curve_too_short, "curve needs >= 16 vertices");
  return curve.kappa_geom;
}

inline std::vector<double> curvature_from_hessian(const ScalarField& field, const LevelCurve& curve,
                                                  double eps_grad) {
  std::vector<double> out(curve.samples() + 1, 0.0);
  for (size_t k = 0; k <= curve.samples(); ++k) {
    Point2 p = curve.vertices[k];
    Point2 g = field.gradient(p);
    double gn = g.norm();
    require(gn >= eps_grad, Errc::near_critical_vertex,
            "|grad f| below the guard band on the curve");
    out[k] = std::abs(field.hessian(p).quadratic_form(curve.tangents[k])) / gn;
  }
  return out;
}

/// O(n^2) segment intersection scan; extraction output cannot self-intersect,
/// so this guard exists for synthetic polylines.
inline bool has_self_intersection(const LevelCurve& curve) {
  size_t m = curve.samples();
  auto seg = [&](size_t k, Point2& a, Point2& b) {
    a = curve.vertices[k];
    b = curve.vertices[(k + 1) % m];
  };
  auto cross = [](const Point2& o, const Point2& a, const Point2& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
  };
  for (size_t i = 0; i < m; ++i) {
    Point2 a, b;
    seg(i, a, b);
    for (size_t j = i + 2; j < m; ++j) {
      if (i == 0 && j == m - 1) continue;  // adjacent around the seam
      Point2 c, d;
      seg(j, c, d);
      double d1 = cross(a, b, c), d2 = cross(a, b, d);
      double d3 = cross(c, d, a), d4 = cross(c, d, b);
      if (((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0))) return true;
    }
  }
  return false;
}

struct ConvexityResult {
  bool convex = false;
  double violating_fraction = 0.0;  // curvature samples with the minority sign
  double superlevel_inside_fraction = 0.0;
};

/// Convex iff the signed curvature keeps one sign up to the noise quantile;
/// also verifies by sampling that {f > c} lies on the inner side.
inline ConvexityResult convexity_test(const LevelCurve& curve, const ScalarField* field,
                                      double noise_quantile = 0.01) {
  ConvexityResult r;
  size_t m = curve.samples();
  size_t pos = 0, neg = 0;
  for (size_t k = 0; k < m; ++k) {
    if (curve.kappa_geom[k] > 0) ++pos;
    else if (curve.kappa_geom[k] < 0) ++neg;
  }
  r.violating_fraction = static_cast<double>(std::min(pos, neg)) / static_cast<double>(m);
  r.convex = r.violating_fraction <= noise_quantile;
  if (field) {
    size_t inside = 0, tested = 0;
    double eps = 2.0 * curve.raw_mean_segment;
    for (size_t k = 0; k < m; k += std::max<size_t>(1, m / 64)) {
      Point2 probe = curve.vertices[k] - curve.normals[k] * eps;  // against the outward normal
      if (!field->domain().contains(probe)) continue;
      ++tested;
      try {
        if (field->value(probe) > curve.level) ++inside;
      } catch (const ToolkitError&) {
      }
    }
    r.superlevel_inside_fraction =
        tested ? static_cast<double>(inside) / static_cast<double>(tested) : 0.0;
    if (tested && r.superlevel_inside_fraction < 0.95) r.convex = false;
  }
  return r;
}

/// Extract f^{-1}(c) from a prebuilt grid. Open chains (curves running into
/// the domain mask) reject the level; closed loops become oriented curves
/// sorted by leftmost vertex.
inline LevelSetDecomposition extract_level_set(const ScalarField& field, const FieldGrid& grid,
                                               double c, const ExtractionOptions& opt = {}) {
  require(c > grid.min_value() && c < grid.max_value(), Errc::level_out_of_range,
          "level outside the sampled value range");
  size_t open_chains = 0;
  auto loops = detail::stitch(grid, field, c, open_chains);
  if (open_chains > 0) {
    std::ostringstream os;
    os << open_chains << " open chain(s) at level " << c
       << " (level too close to the boundary value or to a critical value at this resolution)";
    fail(Errc::open_curve_at_boundary, os.str());
  }
  LevelSetDecomposition dec;
  dec.level = c;
  for (auto& loop : loops) dec.curves.push_back(build_level_curve(std::move(loop), c, &field, opt));
  std::sort(dec.curves.begin(), dec.curves.end(), [](const LevelCurve& a, const LevelCurve& b) {
    Point2 la = a.leftmost(), lb = b.leftmost();
    return la.x < lb.x || (la.x == lb.x && la.y < lb.y);
  });
  return dec;
}

/// Convenience overload sampling the grid on the fly.
inline LevelSetDecomposition extract_level_set(const ScalarField& field, double c,
                                               size_t resolution, const ExtractionOptions& opt = {}) {
  require(resolution >= 64, Errc::bad_input, "extraction resolution must be >= 64");
  FieldGrid grid(field, resolution);
  return extract_level_set(field, grid, c, opt);
}

/// CSV rows (s, x, y, kappa_geom, kappa_hess).
inline void write_curve_csv(std::ostream& os, const LevelCurve& curve) {
  os << "s,x,y,kappa_geom,kappa_hess\n" << std::setprecision(17);
  for (size_t k = 0; k <= curve.samples(); ++k) {
    os << curve.arclength[k] << ',' << curve.vertices[k].x << ',' << curve.vertices[k].y << ','
       << curve.kappa_geom[k] << ','
       << (curve.kappa_hess.empty() ? std::numeric_limits<double>::quiet_NaN()
                                    : curve.kappa_hess[k])
       << '\n';
  }
}

}  // namespace hessdisc
