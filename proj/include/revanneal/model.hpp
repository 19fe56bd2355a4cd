#pragma once

// Model parameters, control-plane schedules and shared observables for
// reverse annealing on the two-pattern p-spin model.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace revanneal {

// Argument outside the domain of an operation.
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// Lagrange fields diverge on the boundary of the magnetization box.
struct SingularFieldError : DomainError {
  using DomainError::DomainError;
};

// Problem too large for the requested method.
struct ResourceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Time stepper produced non-physical state.
struct IntegratorError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Integer power; p is small and odd, std::pow is much slower here.
inline double ipow(double base, int exponent) {
  double result = 1.0;
  for (int i = 0; i < exponent; ++i) result *= base;
  return result;
}

// (p, alpha, x): exponent of H0, weight of the marked-state pattern and
// fraction of down spins in the marked state.
struct ModelParams {
  int p = 3;
  double alpha = 0.5;
  double x = 0.2;

  ModelParams() = default;
  ModelParams(int p_, double alpha_, double x_) : p(p_), alpha(alpha_), x(x_) { validate(); }

  void validate() const {
    if (p < 3 || p % 2 == 0)
      throw DomainError("p must be an odd integer >= 3, got " + std::to_string(p));
    if (!(alpha > 0.0 && alpha < 1.0))
      throw DomainError("alpha must lie in (0, 1), got " + std::to_string(alpha));
    if (!(x > 0.0 && x <= 0.5))
      throw DomainError("x must lie in (0, 0.5], got " + std::to_string(x));
  }

  double up_fraction() const { return 1.0 - x; }
};

// A point (s, lambda) of the control plane.
struct SchedulePoint {
  double s = 0.0;
  double lambda = 0.0;

  SchedulePoint() = default;
  SchedulePoint(double s_, double lambda_) : s(s_), lambda(lambda_) {}

  void validate() const {
    if (!(s >= 0.0 && s <= 1.0 && lambda >= 0.0 && lambda <= 1.0))
      throw DomainError("schedule point (" + std::to_string(s) + ", " + std::to_string(lambda) +
                        ") outside the unit square");
  }

  // Transverse-field strength (ARA) and temperature (SRA) coincide.
  double fluctuation() const { return (1.0 - s) * lambda; }
  double temperature() const { return fluctuation(); }
  // Longitudinal bias towards the marked state.
  double bias() const { return (1.0 - s) * (1.0 - lambda); }
};

// Partial magnetization densities of the up and down sublattices.
struct OrderParams {
  double m_u = 0.0;
  double m_d = 0.0;

  double total() const { return m_u + m_d; }
  double staggered() const { return m_u - m_d; }
};

inline bool in_domain(const ModelParams& params, const OrderParams& m, double slack = 0.0) {
  return std::abs(m.m_u) <= params.up_fraction() + slack && std::abs(m.m_d) <= params.x + slack;
}

inline void require_domain(const ModelParams& params, const OrderParams& m) {
  if (!in_domain(params, m, 1e-12))
    throw DomainError("order parameters (" + std::to_string(m.m_u) + ", " + std::to_string(m.m_d) +
                      ") outside |m_u| <= 1-x, |m_d| <= x");
}

struct FieldPair {
  double h_u = 0.0;
  double h_d = 0.0;
};

// Average H0 energy per spin.
inline double energy_density(const ModelParams& params, const OrderParams& m) {
  return -ipow(m.total(), params.p) - params.alpha * ipow(m.staggered(), params.p);
}

// Magnetization deficit relative to the all-up state.
// 1 - m_u - m_d, grouped per sublattice so the all-up state gives exactly 0.
inline double delta_m(const ModelParams& params, const OrderParams& m) {
  return (params.up_fraction() - m.m_u) + (params.x - m.m_d);
}

// Ground state of H0 in (m_u, m_d) coordinates.
inline OrderParams all_up_state(const ModelParams& params) { return {params.up_fraction(), params.x}; }
inline OrderParams marked_state(const ModelParams& params) { return {params.up_fraction(), -params.x}; }

enum class PathKind { PiecewiseLinear, LinearSqrt };

// Time-parametrized curve through the control plane.
class AnnealPath {
 public:
  static AnnealPath piecewise_linear(std::vector<SchedulePoint> waypoints, double tau) {
    if (waypoints.size() < 2) throw DomainError("piecewise-linear path needs at least two waypoints");
    for (const auto& w : waypoints) w.validate();
    return AnnealPath(PathKind::PiecewiseLinear, std::move(waypoints), tau);
  }

  static AnnealPath linear_sqrt(double tau) { return AnnealPath(PathKind::LinearSqrt, {}, tau); }

  // Path held at one point for duration tau.
  static AnnealPath frozen(SchedulePoint point, double tau) { return piecewise_linear({point, point}, tau); }

  PathKind kind() const { return kind_; }
  double tau() const { return tau_; }
  const std::vector<SchedulePoint>& waypoints() const { return waypoints_; }

  // Waypoints are traversed at uniform parameter speed: segment k occupies
  // [k, k+1] * tau / (n-1).
  SchedulePoint at(double t) const {
    if (!(t >= 0.0 && t <= tau_))
      throw DomainError("time " + std::to_string(t) + " outside [0, " + std::to_string(tau_) + "]");
    return at_fraction(t / tau_);
  }

  // Same as at() with u = t / tau in [0, 1].
  SchedulePoint at_fraction(double u) const {
    if (kind_ == PathKind::LinearSqrt) return {u, std::sqrt(u)};
    const std::size_t segments = waypoints_.size() - 1;
    const double scaled = u * static_cast<double>(segments);
    std::size_t k = static_cast<std::size_t>(std::floor(scaled));
    if (k >= segments) k = segments - 1;
    const double f = scaled - static_cast<double>(k);
    const auto& a = waypoints_[k];
    const auto& b = waypoints_[k + 1];
    return {a.s + f * (b.s - a.s), a.lambda + f * (b.lambda - a.lambda)};
  }

  bool starts_at_origin() const {
    const auto p0 = at_fraction(0.0);
    return p0.s == 0.0 && p0.lambda == 0.0;
  }

 private:
  AnnealPath(PathKind kind, std::vector<SchedulePoint> waypoints, double tau)
      : kind_(kind), waypoints_(std::move(waypoints)), tau_(tau) {
    if (!(tau_ > 0.0) || !std::isfinite(tau_)) throw DomainError("path runtime tau must be > 0");
  }

  PathKind kind_;
  std::vector<SchedulePoint> waypoints_;
  double tau_;
};

inline SchedulePoint schedule_at(const AnnealPath& path, double t) { return path.at(t); }

struct TrajectorySample {
  double t = 0.0;
  double s = 0.0;
  double lambda = 0.0;
  double m_u = 0.0;
  double m_d = 0.0;
  double e = 0.0;
};

// Time series of a dynamics run. The standard-error columns are filled only
// by run-averaged finite-N simulations.
struct Trajectory {
  std::vector<TrajectorySample> samples;
  std::vector<double> stderr_m_u;
  std::vector<double> stderr_m_d;

  bool has_stderr() const { return !stderr_m_u.empty(); }

  const TrajectorySample& final_sample() const {
    if (samples.empty()) throw DomainError("empty trajectory");
    return samples.back();
  }

  double final_delta_m(const ModelParams& params) const {
    const auto& last = final_sample();
    return delta_m(params, {last.m_u, last.m_d});
  }
};

inline TrajectorySample make_sample(const ModelParams& params, double t, SchedulePoint point,
                                    OrderParams m) {
  return {t, point.s, point.lambda, m.m_u, m.m_d, energy_density(params, m)};
}

// Root-mean-square difference of m_d between two trajectories, taken at the
// sample times of `a` with `b` linearly interpolated.
inline double rms_difference_m_d(const Trajectory& a, const Trajectory& b) {
  if (a.samples.empty() || b.samples.size() < 2) throw DomainError("trajectories too short to compare");
  double acc = 0.0;
  std::size_t j = 0;
  for (const auto& sa : a.samples) {
    while (j + 2 < b.samples.size() && b.samples[j + 1].t < sa.t) ++j;
    const auto& l = b.samples[j];
    const auto& r = b.samples[j + 1];
    const double f = r.t > l.t ? std::clamp((sa.t - l.t) / (r.t - l.t), 0.0, 1.0) : 0.0;
    const double diff = sa.m_d - (l.m_d + f * (r.m_d - l.m_d));
    acc += diff * diff;
  }
  return std::sqrt(acc / double(a.samples.size()));
}

}  // namespace revanneal
