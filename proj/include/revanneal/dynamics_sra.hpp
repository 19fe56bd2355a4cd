#pragma once

// Simulated reverse-annealing dynamics.
//
// Mean field: two single-spin Metropolis chains (one per sublattice) in the
// self-consistent local fields, advanced as exact 2x2 master equations on the
// spin distributions. Finite N: explicit single-spin-flip Monte Carlo of the
// full classical Hamiltonian, averaged over seeded runs.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "dynamics_ara.hpp"
#include "model.hpp"
#include "parallel.hpp"

namespace revanneal {

inline FieldPair sra_fields(const ModelParams& params, const SchedulePoint& point, const OrderParams& m) {
  return mean_fields(params, point, m);
}

inline constexpr double kDefaultTemperatureFloor = 1e-12;

struct SraConfig {
  double gamma = 1.0;
  double dt = 1e-3;
  double t_floor = kDefaultTemperatureFloor;
  std::size_t sampling_stride = 1;

  void validate() const {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw DomainError("gamma must be > 0");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("dt must be > 0");
    if (gamma * dt > 1.0) throw DomainError("gamma*dt must be <= 1");
    if (!(t_floor >= 0.0)) throw DomainError("t_floor must be >= 0");
    if (sampling_stride == 0) throw DomainError("sampling stride must be >= 1");
  }
};

// Probability of flipping spin sigma in field b during one step.
inline double metropolis_kernel(int sigma, double b, double temperature, double gamma, double dt,
                                double t_floor = kDefaultTemperatureFloor) {
  const double rate = gamma * dt;
  const double bs = b * double(sigma);
  if (temperature <= t_floor) return bs <= 0.0 ? rate : 0.0;
  if (bs <= 0.0) return rate;
  return rate * std::exp(-2.0 * bs / temperature);
}

struct SpinStateC {
  double prob_up = 1.0;
  double prob_down = 0.0;

  static SpinStateC up() { return {1.0, 0.0}; }
  static SpinStateC down() { return {0.0, 1.0}; }

  double sigma_z() const { return prob_up - prob_down; }
  double total() const { return prob_up + prob_down; }

  void evolve(double b, double temperature, const SraConfig& cfg) {
    const double leave_up = metropolis_kernel(+1, b, temperature, cfg.gamma, cfg.dt, cfg.t_floor);
    const double leave_down = metropolis_kernel(-1, b, temperature, cfg.gamma, cfg.dt, cfg.t_floor);
    const double flow = prob_down * leave_down - prob_up * leave_up;
    prob_up += flow;
    prob_down -= flow;
    constexpr double tol = 1e-12;
    if (prob_up < -tol || prob_down < -tol || prob_up > 1.0 + tol || prob_down > 1.0 + tol ||
        std::abs(total() - 1.0) > tol)
      throw IntegratorError("spin distribution left the simplex: (" + std::to_string(prob_up) + ", " +
                            std::to_string(prob_down) + ")");
  }
};

class SraMeanField {
 public:
  explicit SraMeanField(const ModelParams& params)
      : params_(params), u_(SpinStateC::up()), d_(SpinStateC::down()) {}

  const SpinStateC& spin_u() const { return u_; }
  const SpinStateC& spin_d() const { return d_; }

  OrderParams magnetization() const { return {params_.up_fraction() * u_.sigma_z(), params_.x * d_.sigma_z()}; }

  void step(const SchedulePoint& point, const SraConfig& cfg) {
    const FieldPair b = sra_fields(params_, point, magnetization());
    if (!std::isfinite(b.h_u) || !std::isfinite(b.h_d)) throw IntegratorError("non-finite mean field");
    const double temperature = point.temperature();
    u_.evolve(b.h_u, temperature, cfg);
    d_.evolve(b.h_d, temperature, cfg);
  }

 private:
  ModelParams params_;
  SpinStateC u_, d_;
};

inline Trajectory sra_evolve(const ModelParams& params, const AnnealPath& path, const SraConfig& cfg) {
  params.validate();
  cfg.validate();
  const double tau = path.tau();
  const std::size_t steps = detail::step_count(tau, cfg.dt);
  SraConfig step_cfg = cfg;
  step_cfg.dt = tau / double(steps);

  SraMeanField system(params);
  Trajectory traj;
  traj.samples.reserve(steps / cfg.sampling_stride + 2);
  traj.samples.push_back(make_sample(params, 0.0, path.at(0.0), system.magnetization()));
  for (std::size_t k = 0; k < steps; ++k) {
    system.step(path.at(step_cfg.dt * double(k)), step_cfg);
    const std::size_t done = k + 1;
    if (done % cfg.sampling_stride == 0 || done == steps) {
      const double t_next = done == steps ? tau : step_cfg.dt * double(done);
      traj.samples.push_back(make_sample(params, t_next, path.at(t_next), system.magnetization()));
    }
  }
  return traj;
}

namespace detail {

// Classical energy of the full system from the two collective magnetizations
// M = sum of spins and A = sum of a_i sigma_i (a_i = +1 on u, -1 on d).
inline double classical_energy(const ModelParams& params, const SchedulePoint& point, double n, double total,
                               double staggered) {
  return -n * point.s * (ipow(total / n, params.p) + params.alpha * ipow(staggered / n, params.p)) -
         point.bias() * staggered;
}

// Sample times shared with sra_evolve under the same config.
inline std::vector<double> sample_times(double tau, const SraConfig& cfg) {
  const std::size_t steps = step_count(tau, cfg.dt);
  const double dt = tau / double(steps);
  std::vector<double> times{0.0};
  for (std::size_t done = 1; done <= steps; ++done)
    if (done % cfg.sampling_stride == 0 || done == steps) times.push_back(done == steps ? tau : dt * double(done));
  return times;
}

// One Monte Carlo run; returns (m_u, m_d) at each sample time.
inline std::vector<OrderParams> sra_single_run(const ModelParams& params, const AnnealPath& path, std::size_t n_spins,
                                               std::uint64_t seed, const SraConfig& cfg,
                                               const std::vector<double>& times) {
  const std::size_t n_u = static_cast<std::size_t>(std::llround(double(n_spins) * params.up_fraction()));
  const double n = double(n_spins);
  std::vector<std::int8_t> spin(n_spins);
  for (std::size_t i = 0; i < n_spins; ++i) spin[i] = i < n_u ? 1 : -1;
  // Marked state: u spins up, d spins down.
  long sum_u = long(n_u), sum_d = -long(n_spins - n_u);

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, n_spins - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const double attempt_dt = 1.0 / (cfg.gamma * n);
  std::vector<OrderParams> out;
  out.reserve(times.size());
  std::uint64_t attempt = 0;
  for (const double t_sample : times) {
    for (;;) {
      const double t = double(attempt) * attempt_dt;
      if (t >= t_sample) break;
      ++attempt;
      const SchedulePoint point = path.at(t);
      const std::size_t j = pick(rng);
      const bool is_u = j < n_u;
      const int sigma = spin[j];
      const double total = double(sum_u + sum_d);
      const double staggered = double(sum_u - sum_d);
      const double flipped_total = total - 2.0 * sigma;
      const double flipped_staggered = staggered - 2.0 * (is_u ? sigma : -sigma);
      const double delta = classical_energy(params, point, n, flipped_total, flipped_staggered) -
                           classical_energy(params, point, n, total, staggered);
      const double temperature = point.temperature();
      bool accept;
      if (temperature <= cfg.t_floor)
        accept = delta <= 0.0;
      else
        accept = delta <= 0.0 || unit(rng) < std::exp(-delta / temperature);
      if (accept) {
        spin[j] = std::int8_t(-sigma);
        (is_u ? sum_u : sum_d) -= 2 * sigma;
      }
    }
    out.push_back({double(sum_u) / n, double(sum_d) / n});
  }
  return out;
}

}  // namespace detail

// Run-averaged finite-N Metropolis simulation; samples on the same time grid
// as sra_evolve with the same config. Run r is seeded with seed + r.
inline Trajectory sra_finite_N(const ModelParams& params, const AnnealPath& path, std::size_t n_spins,
                               std::size_t n_runs, std::uint64_t seed, const SraConfig& cfg) {
  params.validate();
  cfg.validate();
  if (n_spins < 10) throw DomainError("N must be >= 10");
  if (n_runs < 1) throw DomainError("n_runs must be >= 1");
  const std::vector<double> times = detail::sample_times(path.tau(), cfg);

  std::vector<std::vector<OrderParams>> runs(n_runs);
  parallel_for(n_runs, [&](std::size_t r) {
    runs[r] = detail::sra_single_run(params, path, n_spins, seed + r, cfg, times);
  });

  Trajectory traj;
  traj.samples.reserve(times.size());
  traj.stderr_m_u.reserve(times.size());
  traj.stderr_m_d.reserve(times.size());
  const double count = double(n_runs);
  for (std::size_t k = 0; k < times.size(); ++k) {
    double su = 0.0, sd = 0.0;
    for (const auto& run : runs) {
      su += run[k].m_u;
      sd += run[k].m_d;
    }
    const OrderParams mean{su / count, sd / count};
    double vu = 0.0, vd = 0.0;
    for (const auto& run : runs) {
      vu += (run[k].m_u - mean.m_u) * (run[k].m_u - mean.m_u);
      vd += (run[k].m_d - mean.m_d) * (run[k].m_d - mean.m_d);
    }
    const double denom = n_runs > 1 ? (count - 1.0) * count : 1.0;
    traj.samples.push_back(make_sample(params, times[k], path.at(times[k]), mean));
    traj.stderr_m_u.push_back(n_runs > 1 ? std::sqrt(vu / denom) : 0.0);
    traj.stderr_m_d.push_back(n_runs > 1 ? std::sqrt(vd / denom) : 0.0);
  }
  return traj;
}

}  // namespace revanneal
