#pragma once

// Derivative-free minimizers used by the landscape analysis: golden-section
// line search, bracketed coordinate descent in a box and discrete local
// minima of sampled grids.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace revanneal::optimize {

struct LineMin {
  double x;
  double value;
};

// Golden-section search on [lo, hi] until the bracket is narrower than tol.
// Both endpoints are also evaluated so minima sitting on the boundary of the
// interval are returned exactly.
template <class F>
LineMin golden_section(F&& f, double lo, double hi, double tol) {
  constexpr double inv_phi = 0.6180339887498949;
  LineMin best{lo, f(lo)};
  const double f_hi = f(hi);
  if (f_hi < best.value) best = {hi, f_hi};
  if (hi - lo <= tol) return best;

  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  if (fc < best.value) best = {c, fc};
  if (fd < best.value) best = {d, fd};
  return best;
}

struct Box {
  double lo_u, hi_u;
  double lo_d, hi_d;
};

struct Point2 {
  double u;
  double d;
  double value;
};

struct DescentOptions {
  // Initial bracket half-widths per coordinate.
  double width_u = 1e-2;
  double width_d = 1e-2;
  // Converged when a full sweep moves by less than this in both coordinates.
  double step_tol = 1e-10;
  double line_tol = 1e-12;
  int max_sweeps = 20000;
};

// Coordinate-wise golden-section descent inside a box. Each line search is
// restricted to a bracket around the current point; the bracket grows when the
// line minimum lands on its edge and shrinks with the last move otherwise.
// A move is only accepted if it lowers the objective, so the sweep stops at
// the floating-point noise floor instead of jittering.
template <class F>
Point2 coordinate_descent(F&& f, double u0, double d0, const Box& box, const DescentOptions& opt = {}) {
  double u = std::clamp(u0, box.lo_u, box.hi_u);
  double d = std::clamp(d0, box.lo_d, box.hi_d);
  double value = f(u, d);
  double wu = opt.width_u, wd = opt.width_d;
  const double span_u = box.hi_u - box.lo_u;
  const double span_d = box.hi_d - box.lo_d;

  auto line = [&](double& coord, double& width, double lo_dom, double hi_dom, double span, auto&& g) {
    const double lo = std::max(lo_dom, coord - width);
    const double hi = std::min(hi_dom, coord + width);
    const LineMin r = golden_section(g, lo, hi, opt.line_tol);
    double move = 0.0;
    if (r.value < value) {
      move = std::abs(r.x - coord);
      coord = r.x;
      value = r.value;
    }
    const bool on_edge = (r.x <= lo + 2 * opt.line_tol && lo > lo_dom) ||
                         (r.x >= hi - 2 * opt.line_tol && hi < hi_dom);
    if (on_edge)
      width = std::min(2.0 * width, span);
    else
      width = std::clamp(4.0 * move, 64.0 * opt.line_tol, span);
    return move;
  };

  for (int sweep = 0; sweep < opt.max_sweeps; ++sweep) {
    const double du = line(u, wu, box.lo_u, box.hi_u, span_u, [&](double t) { return f(t, d); });
    const double dd = line(d, wd, box.lo_d, box.hi_d, span_d, [&](double t) { return f(u, t); });
    if (du < opt.step_tol && dd < opt.step_tol) break;
  }
  return {u, d, value};
}

// Indices (i, j) of a row-major n_u x n_d grid that are no higher than all of
// their up to 8 neighbours. Equal-valued neighbours are resolved by linear
// index so a flat plateau yields a single representative.
inline std::vector<std::pair<std::size_t, std::size_t>> grid_local_minima(const std::vector<double>& values,
                                                                          std::size_t n_u, std::size_t n_d) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < n_u; ++i) {
    for (std::size_t j = 0; j < n_d; ++j) {
      const std::size_t idx = i * n_d + j;
      const double v = values[idx];
      bool is_min = true;
      for (int di = -1; di <= 1 && is_min; ++di) {
        for (int dj = -1; dj <= 1; ++dj) {
          if (di == 0 && dj == 0) continue;
          const long ni = static_cast<long>(i) + di;
          const long nj = static_cast<long>(j) + dj;
          if (ni < 0 || nj < 0 || ni >= static_cast<long>(n_u) || nj >= static_cast<long>(n_d)) continue;
          const std::size_t nidx = static_cast<std::size_t>(ni) * n_d + static_cast<std::size_t>(nj);
          const double w = values[nidx];
          if (w < v || (w == v && nidx < idx)) {
            is_min = false;
            break;
          }
        }
      }
      if (is_min) out.emplace_back(i, j);
    }
  }
  return out;
}

// Local minima of a sampled 1D function, endpoints included.
inline std::vector<std::size_t> sequence_local_minima(const std::vector<double>& values) {
  std::vector<std::size_t> out;
  const std::size_t n = values.size();
  for (std::size_t i = 0; i < n; ++i) {
    const bool left_ok = i == 0 || values[i] < values[i - 1];
    const bool right_ok = i + 1 == n || values[i] <= values[i + 1];
    if (left_ok && right_ok) out.push_back(i);
  }
  return out;
}

}  // namespace revanneal::optimize
