#pragma once

// Static actions and free-energy landscapes Phi(m_u, m_d) for adiabatic
// (quantum, T = 0) and simulated (thermal) reverse annealing.
//
// Conventions:
//   Gamma = (1-s) lambda   transverse field (ARA) or temperature (SRA)
//   B     = (1-s)(1-lambda) bias along the marked state
// The SRA landscape drops its m-independent constant and uses 0 log 0 = 0 on
// the boundary of the box |m_u| <= 1-x, |m_d| <= x.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "model.hpp"
#include "optimize.hpp"
#include "parallel.hpp"

namespace revanneal {

enum class LandscapeModel { AraZeroT, SraThermal, FiniteTStatic };

struct LandscapeKind {
  LandscapeModel model = LandscapeModel::AraZeroT;
  double beta = 0.0;  // only for FiniteTStatic

  static LandscapeKind ara() { return {LandscapeModel::AraZeroT, 0.0}; }
  static LandscapeKind sra() { return {LandscapeModel::SraThermal, 0.0}; }
  static LandscapeKind finite_temperature(double beta) {
    if (!(beta > 0.0)) throw DomainError("finite-temperature landscape needs beta > 0");
    return {LandscapeModel::FiniteTStatic, beta};
  }

  bool has_beta() const { return model == LandscapeModel::FiniteTStatic; }
};

inline std::string to_string(LandscapeModel model) {
  switch (model) {
    case LandscapeModel::AraZeroT: return "ARA";
    case LandscapeModel::SraThermal: return "SRA";
    case LandscapeModel::FiniteTStatic: return "finite-T";
  }
  return "?";
}

namespace detail {

// log(2 cosh z) without overflow.
inline double log_two_cosh(double z) {
  const double a = std::abs(z);
  return a + std::log1p(std::exp(-2.0 * a));
}

inline double xlogx(double v) { return v > 0.0 ? v * std::log(v) : 0.0; }

// Terms shared by every action: -s m^p - s alpha n^p - B n.
inline double interaction_terms(const ModelParams& params, const SchedulePoint& pt, const OrderParams& m) {
  return pt.s * energy_density(params, m) - pt.bias() * m.staggered();
}

// sup_h [h m - (w / beta) log 2cosh(beta sqrt(h^2 + g^2))] for one sublattice of
// weight w. Returns the maximizing field in `field`; on the boundary |m| = w
// the supremum is the h -> infinity limit 0.
inline double finite_t_sublattice(double m, double w, double gamma, double beta, double* field) {
  auto response = [&](double h) {
    const double r = std::hypot(h, gamma);
    if (r == 0.0) return w * beta * h;  // slope at the origin when gamma = 0
    return w * std::tanh(beta * r) * h / r;
  };
  const double target = std::abs(m);
  if (target >= w) {
    if (field) *field = std::copysign(std::numeric_limits<double>::infinity(), m);
    return 0.0;
  }
  double lo = 0.0, hi = 1.0;
  while (response(hi) < target) {
    hi *= 2.0;
    if (hi > 1e300) break;
  }
  for (int it = 0; it < 400 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    (response(mid) < target ? lo : hi) = mid;
  }
  const double h = std::copysign(0.5 * (lo + hi), m);
  if (field) *field = h;
  return h * m - w / beta * log_two_cosh(beta * std::hypot(h, gamma));
}

}  // namespace detail

// Static-ansatz action at inverse temperature beta with transverse field
// (1-s) lambda inside both single-spin partition functions.
inline double static_action_finite_T(const ModelParams& params, const SchedulePoint& point, const OrderParams& m,
                                     const FieldPair& h, double beta) {
  if (!(beta > 0.0)) throw DomainError("beta must be > 0");
  const double gamma = point.fluctuation();
  const double w_u = params.up_fraction(), w_d = params.x;
  return detail::interaction_terms(params, point, m) + h.h_u * m.m_u + h.h_d * m.m_d -
         w_u / beta * detail::log_two_cosh(beta * std::hypot(h.h_u, gamma)) -
         w_d / beta * detail::log_two_cosh(beta * std::hypot(h.h_d, gamma));
}

// beta -> infinity limit of static_action_finite_T.
inline double static_action_zero_T(const ModelParams& params, const SchedulePoint& point, const OrderParams& m,
                                   const FieldPair& h) {
  const double gamma = point.fluctuation();
  return detail::interaction_terms(params, point, m) + h.h_u * m.m_u + h.h_d * m.m_d -
         params.up_fraction() * std::hypot(h.h_u, gamma) - params.x * std::hypot(h.h_d, gamma);
}

// Thermal action with the transverse field removed and T = (1-s) lambda.
inline double static_action_zero_field(const ModelParams& params, const SchedulePoint& point, const OrderParams& m,
                                       const FieldPair& h) {
  const double temp = point.temperature();
  if (!(temp > 0.0)) throw DomainError("zero-field action needs (1-s) lambda > 0");
  return detail::interaction_terms(params, point, m) + h.h_u * m.m_u + h.h_d * m.m_d -
         temp * params.up_fraction() * detail::log_two_cosh(h.h_u / temp) -
         temp * params.x * detail::log_two_cosh(h.h_d / temp);
}

// Lagrange fields that make the action stationary in (h_u, h_d) at fixed m.
inline FieldPair solve_fields(const ModelParams& params, const SchedulePoint& point, const OrderParams& m,
                              const LandscapeKind& kind) {
  const double w_u = params.up_fraction(), w_d = params.x;
  if (!(std::abs(m.m_u) < w_u && std::abs(m.m_d) < w_d))
    throw SingularFieldError("fields diverge unless |m_u| < 1-x and |m_d| < x");
  const double gamma = point.fluctuation();
  switch (kind.model) {
    case LandscapeModel::AraZeroT:
      return {gamma * m.m_u / std::sqrt(w_u * w_u - m.m_u * m.m_u),
              gamma * m.m_d / std::sqrt(w_d * w_d - m.m_d * m.m_d)};
    case LandscapeModel::SraThermal:
      return {0.5 * gamma * std::log((w_u + m.m_u) / (w_u - m.m_u)),
              0.5 * gamma * std::log((w_d + m.m_d) / (w_d - m.m_d))};
    case LandscapeModel::FiniteTStatic: {
      FieldPair h;
      detail::finite_t_sublattice(m.m_u, w_u, gamma, kind.beta, &h.h_u);
      detail::finite_t_sublattice(m.m_d, w_d, gamma, kind.beta, &h.h_d);
      return h;
    }
  }
  return {};
}

namespace detail {

// Landscape evaluation with the schedule-dependent constants hoisted; used in
// the inner loops of the minimizers. No domain check.
struct LandscapeEval {
  ModelParams params;
  LandscapeKind kind;
  double s, gamma, bias, w_u, w_d;

  LandscapeEval(const ModelParams& p, const SchedulePoint& pt, const LandscapeKind& k)
      : params(p), kind(k), s(pt.s), gamma(pt.fluctuation()), bias(pt.bias()), w_u(p.up_fraction()), w_d(p.x) {}

  double operator()(double m_u, double m_d) const {
    const double base = -s * (ipow(m_u + m_d, params.p) + params.alpha * ipow(m_u - m_d, params.p)) -
                        bias * (m_u - m_d);
    switch (kind.model) {
      case LandscapeModel::AraZeroT:
        return base - gamma * (std::sqrt(std::max(0.0, w_u * w_u - m_u * m_u)) +
                               std::sqrt(std::max(0.0, w_d * w_d - m_d * m_d)));
      case LandscapeModel::SraThermal:
        if (gamma == 0.0) return base;
        return base + 0.5 * gamma *
                          (xlogx(w_u + m_u) + xlogx(w_u - m_u) + xlogx(w_d + m_d) + xlogx(w_d - m_d));
      case LandscapeModel::FiniteTStatic:
        return base + finite_t_sublattice(m_u, w_u, gamma, kind.beta, nullptr) +
               finite_t_sublattice(m_d, w_d, gamma, kind.beta, nullptr);
    }
    return base;
  }
};

}  // namespace detail

// Free-energy landscape Phi(m_u, m_d) with the Lagrange fields eliminated.
inline double landscape_value(const ModelParams& params, const SchedulePoint& point, const OrderParams& m,
                              const LandscapeKind& kind) {
  require_domain(params, m);
  const OrderParams c{std::clamp(m.m_u, -params.up_fraction(), params.up_fraction()),
                      std::clamp(m.m_d, -params.x, params.x)};
  return detail::LandscapeEval(params, point, kind)(c.m_u, c.m_d);
}

struct ReducedValue {
  double phi;
  double m_u_argmin;
};

inline constexpr std::size_t kDefaultInnerGrid = 2001;
inline constexpr std::size_t kDefaultLandscapeGrid = 401;

// Phi'(m_d) = min over m_u of Phi(m_u, m_d): dense grid in m_u, then
// golden-section refinement of the best grid bracket.
inline ReducedValue reduced_landscape(const ModelParams& params, const SchedulePoint& point, double m_d,
                                      const LandscapeKind& kind, std::size_t inner_grid = kDefaultInnerGrid) {
  if (!(std::abs(m_d) <= params.x + 1e-12)) throw DomainError("|m_d| must be <= x");
  if (inner_grid < 3) throw DomainError("inner grid needs at least 3 points");
  m_d = std::clamp(m_d, -params.x, params.x);
  const detail::LandscapeEval eval(params, point, kind);
  const double w = params.up_fraction();
  const double step = 2.0 * w / static_cast<double>(inner_grid - 1);
  std::size_t best = 0;
  double best_val = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < inner_grid; ++i) {
    const double v = eval(-w + step * static_cast<double>(i), m_d);
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }
  const double lo = best == 0 ? -w : -w + step * static_cast<double>(best - 1);
  const double hi = best + 1 == inner_grid ? w : -w + step * static_cast<double>(best + 1);
  const auto line = optimize::golden_section([&](double u) { return eval(u, m_d); }, lo, hi, 1e-10);
  if (line.value < best_val) return {line.value, line.x};
  return {best_val, -w + step * static_cast<double>(best)};
}

struct LocalMinimum {
  OrderParams m;
  double value;
};

struct MinimizationResult {
  OrderParams m_star;
  double value = 0.0;
  std::vector<LocalMinimum> local_minima;
};

namespace detail {

inline bool lex_before(const LocalMinimum& a, const LocalMinimum& b) {
  if (a.m.m_u != b.m.m_u) return a.m.m_u < b.m.m_u;
  return a.m.m_d < b.m.m_d;
}

// Global minimum among candidates; exact ties go to the lexicographically
// smallest (m_u, m_d).
inline const LocalMinimum& pick_global(const std::vector<LocalMinimum>& minima) {
  const LocalMinimum* best = &minima.front();
  for (const auto& c : minima) {
    if (c.value < best->value || (c.value == best->value && lex_before(c, *best))) best = &c;
  }
  return *best;
}

inline optimize::Box domain_box(const ModelParams& params) {
  return {-params.up_fraction(), params.up_fraction(), -params.x, params.x};
}

// Adds a refined minimum unless one within `tol` per coordinate is already
// present, in which case the lower of the two is kept.
inline void merge_minimum(std::vector<LocalMinimum>& minima, const LocalMinimum& cand, double tol) {
  for (auto& existing : minima) {
    if (std::abs(existing.m.m_u - cand.m.m_u) <= tol && std::abs(existing.m.m_d - cand.m.m_d) <= tol) {
      if (cand.value < existing.value) existing = cand;
      return;
    }
  }
  minima.push_back(cand);
}

}  // namespace detail

// Global minimum of Phi over the closed box: grid_n x grid_n evaluation, then
// coordinate-wise golden-section descent from every discrete local minimum.
// Refined minima closer than 1e-4 per coordinate are merged.
inline MinimizationResult minimize_landscape(const ModelParams& params, const SchedulePoint& point,
                                             const LandscapeKind& kind, std::size_t grid_n) {
  if (grid_n < 3) throw DomainError("grid_n must be >= 3");
  const detail::LandscapeEval eval(params, point, kind);
  const auto box = detail::domain_box(params);
  const double step_u = (box.hi_u - box.lo_u) / static_cast<double>(grid_n - 1);
  const double step_d = (box.hi_d - box.lo_d) / static_cast<double>(grid_n - 1);
  auto coord_u = [&](std::size_t i) { return i + 1 == grid_n ? box.hi_u : box.lo_u + step_u * double(i); };
  auto coord_d = [&](std::size_t j) { return j + 1 == grid_n ? box.hi_d : box.lo_d + step_d * double(j); };

  std::vector<double> values(grid_n * grid_n);
  parallel_for(grid_n, [&](std::size_t i) {
    for (std::size_t j = 0; j < grid_n; ++j) values[i * grid_n + j] = eval(coord_u(i), coord_d(j));
  });

  const auto cells = optimize::grid_local_minima(values, grid_n, grid_n);
  optimize::DescentOptions opt;
  opt.width_u = step_u;
  opt.width_d = step_d;
  std::vector<LocalMinimum> refined(cells.size());
  parallel_for(cells.size(), [&](std::size_t k) {
    const auto [i, j] = cells[k];
    const auto r = optimize::coordinate_descent(eval, coord_u(i), coord_d(j), box, opt);
    refined[k] = {{r.u, r.d}, r.value};
  });

  MinimizationResult result;
  for (const auto& r : refined) detail::merge_minimum(result.local_minima, r, 1e-4);
  const auto& best = detail::pick_global(result.local_minima);
  result.m_star = best.m;
  result.value = best.value;
  return result;
}

// Row-major landscape samples over the box, m_u outer.
struct LandscapeGrid {
  std::size_t n = 0;
  std::vector<double> m_u, m_d, phi;
};

inline LandscapeGrid landscape_grid(const ModelParams& params, const SchedulePoint& point, const LandscapeKind& kind,
                                    std::size_t n = kDefaultLandscapeGrid) {
  if (n < 2) throw DomainError("landscape grid needs n >= 2");
  const detail::LandscapeEval eval(params, point, kind);
  LandscapeGrid g;
  g.n = n;
  g.m_u.resize(n * n);
  g.m_d.resize(n * n);
  g.phi.resize(n * n);
  const double w_u = params.up_fraction(), w_d = params.x;
  parallel_for(n, [&](std::size_t i) {
    const double u = i + 1 == n ? w_u : -w_u + 2.0 * w_u * double(i) / double(n - 1);
    for (std::size_t j = 0; j < n; ++j) {
      const double d = j + 1 == n ? w_d : -w_d + 2.0 * w_d * double(j) / double(n - 1);
      g.m_u[i * n + j] = u;
      g.m_d[i * n + j] = d;
      g.phi[i * n + j] = eval(u, d);
    }
  });
  return g;
}

struct ReducedCurve {
  std::vector<double> m_d, phi, m_u_argmin;
};

inline ReducedCurve reduced_landscape_curve(const ModelParams& params, const SchedulePoint& point,
                                            const LandscapeKind& kind, std::size_t n_md,
                                            std::size_t inner_grid = kDefaultInnerGrid) {
  if (n_md < 2) throw DomainError("reduced curve needs at least 2 points");
  ReducedCurve c;
  c.m_d.resize(n_md);
  c.phi.resize(n_md);
  c.m_u_argmin.resize(n_md);
  parallel_for(n_md, [&](std::size_t j) {
    const double d = j + 1 == n_md ? params.x : -params.x + 2.0 * params.x * double(j) / double(n_md - 1);
    const auto r = reduced_landscape(params, point, d, kind, inner_grid);
    c.m_d[j] = d;
    c.phi[j] = r.phi;
    c.m_u_argmin[j] = r.m_u_argmin;
  });
  return c;
}

}  // namespace revanneal
