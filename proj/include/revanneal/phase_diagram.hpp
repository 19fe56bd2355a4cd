#pragma once

// Equilibrium magnetization over the (s, lambda) plane, discontinuous
// transition detection by the pixel-jump rule |dm| > threshold, and path
// feasibility against the detected transition edges.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "landscape.hpp"
#include "model.hpp"
#include "optimize.hpp"
#include "parallel.hpp"

namespace revanneal {

inline constexpr double kDefaultTransitionThreshold = 0.05;

// Grid node (i_s, i_lambda) sits at (i_s, i_lambda) / (resolution - 1).
struct GridNode {
  std::size_t i_s = 0;
  std::size_t i_lambda = 0;
  bool operator==(const GridNode&) const = default;
};

// Edge between two 4-adjacent grid nodes.
struct GridEdge {
  GridNode a;
  GridNode b;
};

class PhaseDiagram {
 public:
  PhaseDiagram(std::size_t resolution, double threshold, std::vector<double> m_u, std::vector<double> m_d)
      : resolution_(resolution), threshold_(threshold), m_u_(std::move(m_u)), m_d_(std::move(m_d)) {
    if (resolution_ < 2) throw DomainError("phase diagram needs resolution >= 2");
    if (m_u_.size() != resolution_ * resolution_ || m_d_.size() != m_u_.size())
      throw DomainError("phase diagram grid size mismatch");
    m_.resize(m_u_.size());
    for (std::size_t k = 0; k < m_.size(); ++k) m_[k] = m_u_[k] + m_d_[k];
    recompute_mask();
  }

  // Uniform m field, mostly for tests.
  static PhaseDiagram uniform(std::size_t resolution, double m, double threshold = kDefaultTransitionThreshold) {
    return PhaseDiagram(resolution, threshold, std::vector<double>(resolution * resolution, m),
                        std::vector<double>(resolution * resolution, 0.0));
  }

  std::size_t resolution() const { return resolution_; }
  double threshold() const { return threshold_; }
  double coordinate(std::size_t i) const { return static_cast<double>(i) / static_cast<double>(resolution_ - 1); }

  std::size_t index(GridNode n) const { return n.i_lambda * resolution_ + n.i_s; }
  double m(GridNode n) const { return m_[index(n)]; }
  double m_u(GridNode n) const { return m_u_[index(n)]; }
  double m_d(GridNode n) const { return m_d_[index(n)]; }
  const std::vector<double>& m_grid() const { return m_; }

  // Edge (i_s, j) -- (i_s + 1, j).
  bool horizontal_transition(std::size_t i_s, std::size_t i_lambda) const {
    return h_mask_[i_lambda * (resolution_ - 1) + i_s];
  }
  // Edge (i, j) -- (i, j + 1).
  bool vertical_transition(std::size_t i_s, std::size_t i_lambda) const {
    return v_mask_[i_lambda * resolution_ + i_s];
  }

  bool is_transition(const GridEdge& e) const {
    if (e.a.i_lambda == e.b.i_lambda)
      return horizontal_transition(std::min(e.a.i_s, e.b.i_s), e.a.i_lambda);
    return vertical_transition(e.a.i_s, std::min(e.a.i_lambda, e.b.i_lambda));
  }

  std::vector<GridEdge> transition_edges() const {
    std::vector<GridEdge> out;
    const std::size_t n = resolution_;
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i + 1 < n; ++i)
        if (horizontal_transition(i, j)) out.push_back({{i, j}, {i + 1, j}});
    for (std::size_t j = 0; j + 1 < n; ++j)
      for (std::size_t i = 0; i < n; ++i)
        if (vertical_transition(i, j)) out.push_back({{i, j}, {i, j + 1}});
    return out;
  }

  bool has_transitions() const {
    return std::find(h_mask_.begin(), h_mask_.end(), true) != h_mask_.end() ||
           std::find(v_mask_.begin(), v_mask_.end(), true) != v_mask_.end();
  }

  void set_threshold(double threshold) {
    threshold_ = threshold;
    recompute_mask();
  }

 private:
  void recompute_mask() {
    const std::size_t n = resolution_;
    h_mask_.assign(n * (n - 1), false);
    v_mask_.assign(n * (n - 1), false);
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i + 1 < n; ++i)
        h_mask_[j * (n - 1) + i] = std::abs(m_[j * n + i + 1] - m_[j * n + i]) > threshold_;
    for (std::size_t j = 0; j + 1 < n; ++j)
      for (std::size_t i = 0; i < n; ++i)
        v_mask_[j * n + i] = std::abs(m_[(j + 1) * n + i] - m_[j * n + i]) > threshold_;
  }

  std::size_t resolution_;
  double threshold_;
  std::vector<double> m_u_, m_d_, m_;
  std::vector<bool> h_mask_, v_mask_;
};

struct ScanOptions {
  double threshold = kDefaultTransitionThreshold;
  // Per-cell global fallback: coarse grid whose discrete minima seed descent.
  std::size_t fallback_grid = 21;
};

namespace detail {

// Global minimum of one cell from a set of seeds: the previous cell's minimum,
// the three canonical minima (all-up, marked, paramagnet) and the discrete
// minima of a coarse grid.
inline LocalMinimum scan_cell(const ModelParams& params, const SchedulePoint& point, const LandscapeKind& kind,
                              const std::optional<OrderParams>& previous, std::size_t fallback_grid) {
  const LandscapeEval eval(params, point, kind);
  const auto box = domain_box(params);
  const std::size_t n = fallback_grid;
  const double step_u = (box.hi_u - box.lo_u) / double(n - 1);
  const double step_d = (box.hi_d - box.lo_d) / double(n - 1);

  std::vector<OrderParams> seeds;
  if (previous) seeds.push_back(*previous);
  seeds.push_back(all_up_state(params));
  seeds.push_back(marked_state(params));
  seeds.push_back({0.0, 0.0});

  std::vector<double> coarse(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      coarse[i * n + j] = eval(box.lo_u + step_u * double(i), box.lo_d + step_d * double(j));
  for (const auto& [i, j] : optimize::grid_local_minima(coarse, n, n))
    seeds.push_back({box.lo_u + step_u * double(i), box.lo_d + step_d * double(j)});

  optimize::DescentOptions opt;
  opt.width_u = step_u;
  opt.width_d = step_d;
  std::vector<LocalMinimum> found;
  found.reserve(seeds.size());
  for (const auto& seed : seeds) {
    const auto r = optimize::coordinate_descent(eval, seed.m_u, seed.m_d, box, opt);
    found.push_back({{r.u, r.d}, r.value});
  }
  return pick_global(found);
}

}  // namespace detail

// Equilibrium m = m_u + m_d on a resolution x resolution grid over [0, 1]^2.
// Rows of constant lambda are independent and hot-started along s.
inline PhaseDiagram scan_phase_diagram(const ModelParams& params, const LandscapeKind& kind, std::size_t resolution,
                                       const ScanOptions& options = {}) {
  if (resolution < 11) throw DomainError("phase diagram resolution must be >= 11");
  if (options.fallback_grid < 3) throw DomainError("fallback grid must be >= 3");
  const std::size_t n = resolution;
  std::vector<double> m_u(n * n), m_d(n * n);
  parallel_for(n, [&](std::size_t j) {
    const double lambda = double(j) / double(n - 1);
    std::optional<OrderParams> previous;
    for (std::size_t i = 0; i < n; ++i) {
      const SchedulePoint point{double(i) / double(n - 1), lambda};
      const auto best = detail::scan_cell(params, point, kind, previous, options.fallback_grid);
      m_u[j * n + i] = best.m.m_u;
      m_d[j * n + i] = best.m.m_d;
      previous = best.m;
    }
  });
  return PhaseDiagram(n, options.threshold, std::move(m_u), std::move(m_d));
}

namespace detail {

// Grid nodes visited by the straight segment a -> b, where a point maps to its
// nearest node. Consecutive nodes are 4-adjacent; a segment through a cell
// corner steps along s first.
inline void rasterize_segment(const PhaseDiagram& diagram, SchedulePoint a, SchedulePoint b,
                              std::vector<GridNode>& out) {
  const double scale = double(diagram.resolution() - 1);
  const long last = long(diagram.resolution()) - 1;
  const double ax = a.s * scale + 0.5, ay = a.lambda * scale + 0.5;
  const double bx = b.s * scale + 0.5, by = b.lambda * scale + 0.5;
  auto cell = [last](double v) { return std::clamp(long(std::floor(v)), 0L, last); };
  long cx = cell(ax), cy = cell(ay);
  const long ex = cell(bx), ey = cell(by);
  auto push = [&](long x, long y) {
    const GridNode node{std::size_t(x), std::size_t(y)};
    if (out.empty() || !(out.back() == node)) out.push_back(node);
  };
  push(cx, cy);

  const double dx = bx - ax, dy = by - ay;
  const long step_x = dx > 0 ? 1 : -1;
  const long step_y = dy > 0 ? 1 : -1;
  const double inf = std::numeric_limits<double>::infinity();
  // Parametric distance to the next vertical / horizontal cell boundary.
  double t_max_x = dx != 0 ? ((step_x > 0 ? double(cx + 1) : double(cx)) - ax) / dx : inf;
  double t_max_y = dy != 0 ? ((step_y > 0 ? double(cy + 1) : double(cy)) - ay) / dy : inf;
  const double t_delta_x = dx != 0 ? std::abs(1.0 / dx) : inf;
  const double t_delta_y = dy != 0 ? std::abs(1.0 / dy) : inf;
  while (cx != ex || cy != ey) {
    if (t_max_x <= t_max_y && cx != ex) {
      cx += step_x;
      t_max_x += t_delta_x;
    } else if (cy != ey) {
      cy += step_y;
      t_max_y += t_delta_y;
    } else {
      cx += step_x;
      t_max_x += t_delta_x;
    }
    push(cx, cy);
  }
}

}  // namespace detail

// Polyline through the control plane that the path follows; the linear-sqrt
// curve is sampled densely.
inline std::vector<SchedulePoint> path_polyline(const AnnealPath& path, std::size_t resolution) {
  if (path.kind() == PathKind::PiecewiseLinear) return path.waypoints();
  const std::size_t samples = 8 * resolution + 1;
  std::vector<SchedulePoint> pts(samples);
  for (std::size_t k = 0; k < samples; ++k) pts[k] = path.at_fraction(double(k) / double(samples - 1));
  return pts;
}

inline std::vector<GridNode> rasterize_path(const PhaseDiagram& diagram, const AnnealPath& path) {
  const auto pts = path_polyline(path, diagram.resolution());
  for (const auto& p : pts) p.validate();
  std::vector<GridNode> nodes;
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) detail::rasterize_segment(diagram, pts[k], pts[k + 1], nodes);
  return nodes;
}

struct Feasibility {
  bool feasible = true;
  std::vector<GridEdge> crossings;
};

// A path is feasible when its rasterization crosses no transition edge.
inline Feasibility path_is_feasible(const PhaseDiagram& diagram, const AnnealPath& path) {
  const auto nodes = rasterize_path(diagram, path);
  Feasibility result;
  for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
    const GridEdge edge{nodes[k], nodes[k + 1]};
    if (diagram.is_transition(edge)) {
      result.feasible = false;
      result.crossings.push_back(edge);
    }
  }
  return result;
}

// (0,0) -> (0,lambda) -> (1,lambda) -> (1,0).
inline AnnealPath constant_lambda_path(double lambda, double tau = 1.0) {
  return AnnealPath::piecewise_linear({{0.0, 0.0}, {0.0, lambda}, {1.0, lambda}, {1.0, 0.0}}, tau);
}

// (0,0) -> (s1,lambda) -> (s2,lambda) -> (1,0).
inline AnnealPath three_stage_path(double s1, double s2, double lambda, double tau = 1.0) {
  return AnnealPath::piecewise_linear({{0.0, 0.0}, {s1, lambda}, {s2, lambda}, {1.0, 0.0}}, tau);
}

struct PathSearch {
  // Grid lambda values whose constant-lambda path is feasible.
  std::vector<double> feasible_lambdas;
  // One feasible three-stage path with waypoints on the grid, if any.
  std::optional<AnnealPath> three_stage;
  // Grid nodes (s2, lambda) that end the second stage of some feasible path.
  std::size_t three_stage_count = 0;

  bool any_feasible() const { return !feasible_lambdas.empty() || three_stage.has_value(); }
};

// Exhaustive search over constant-lambda paths (one per grid row) and
// three-stage paths with both corner waypoints on grid nodes, s1 <= s2.
inline PathSearch search_feasible_paths(const PhaseDiagram& diagram) {
  const std::size_t n = diagram.resolution();
  PathSearch out;
  for (std::size_t j = 0; j < n; ++j) {
    const double lambda = diagram.coordinate(j);
    if (path_is_feasible(diagram, constant_lambda_path(lambda)).feasible) out.feasible_lambdas.push_back(lambda);
  }

  auto segment_clean = [&](SchedulePoint a, SchedulePoint b) {
    std::vector<GridNode> nodes;
    detail::rasterize_segment(diagram, a, b, nodes);
    for (std::size_t k = 0; k + 1 < nodes.size(); ++k)
      if (diagram.is_transition({nodes[k], nodes[k + 1]})) return false;
    return true;
  };
  std::vector<char> first_ok(n * n), last_ok(n * n);
  parallel_for(n, [&](std::size_t j) {
    for (std::size_t i = 0; i < n; ++i) {
      const SchedulePoint p{diagram.coordinate(i), diagram.coordinate(j)};
      first_ok[j * n + i] = segment_clean({0.0, 0.0}, p);
      last_ok[j * n + i] = segment_clean(p, {1.0, 0.0});
    }
  });

  for (std::size_t j = 0; j < n; ++j) {
    std::optional<std::size_t> start;
    for (std::size_t i = 0; i < n; ++i) {
      if (i > 0 && diagram.horizontal_transition(i - 1, j)) start.reset();
      if (first_ok[j * n + i]) start = i;
      if (start && last_ok[j * n + i]) {
        ++out.three_stage_count;
        if (!out.three_stage)
          out.three_stage = three_stage_path(diagram.coordinate(*start), diagram.coordinate(i), diagram.coordinate(j));
      }
    }
  }
  return out;
}

}  // namespace revanneal
