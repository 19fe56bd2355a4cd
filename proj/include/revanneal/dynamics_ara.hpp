#pragma once

// Quantum reverse-annealing dynamics.
//
// Mean field: two representative spins u and d, each precessing in its own
// self-consistent longitudinal field plus the shared transverse field
// (1-s) lambda. Fields are frozen over each step and the 2x2 propagator is
// applied exactly.
//
// Finite N: exact Schrodinger evolution of the full Hamiltonian restricted to
// the permutation-symmetric sector of each sublattice (two collective spins of
// length N_u/2 and N_d/2), propagated with a Chebyshev expansion of the
// midpoint Hamiltonian.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "model.hpp"

namespace revanneal {

using cplx = std::complex<double>;

// Self-consistent longitudinal fields; identical for ARA and SRA.
inline FieldPair mean_fields(const ModelParams& params, const SchedulePoint& point, const OrderParams& m) {
  const double ferro = point.s * params.p * ipow(m.total(), params.p - 1);
  const double pattern = point.s * params.alpha * params.p * ipow(m.staggered(), params.p - 1);
  const double bias = point.bias();
  return {ferro + pattern + bias, ferro - pattern - bias};
}

inline FieldPair ara_fields(const ModelParams& params, const SchedulePoint& point, const OrderParams& m) {
  return mean_fields(params, point, m);
}

// Single spin-1/2 in the sigma^z basis.
struct SpinStateQ {
  cplx amp_up{1.0, 0.0};
  cplx amp_down{0.0, 0.0};

  static SpinStateQ up() { return {{1.0, 0.0}, {0.0, 0.0}}; }
  static SpinStateQ down() { return {{0.0, 0.0}, {1.0, 0.0}}; }

  double norm() const { return std::norm(amp_up) + std::norm(amp_down); }
  double sigma_z() const { return std::norm(amp_up) - std::norm(amp_down); }
  double sigma_x() const { return 2.0 * (std::conj(amp_up) * amp_down).real(); }

  // |psi> <- exp(-i H dt) |psi> for H = -h sigma^z - g sigma^x.
  void evolve(double h, double g, double dt) {
    const double omega = std::hypot(h, g);
    if (omega == 0.0) return;
    const double c = std::cos(omega * dt);
    const double sn = std::sin(omega * dt) / omega;
    // exp(i dt (h Z + g X)) = c I + i sn (h Z + g X)
    const cplx i_sn{0.0, sn};
    const cplx up = c * amp_up + i_sn * (h * amp_up + g * amp_down);
    const cplx dn = c * amp_down + i_sn * (g * amp_up - h * amp_down);
    amp_up = up;
    amp_down = dn;
  }
};

enum class FieldEvaluation {
  StepStart,  // measure, set fields, evolve
  Midpoint,   // fields re-evaluated after a half-step predictor
};

struct AraIntegratorConfig {
  double dt = 1e-3;
  std::size_t sampling_stride = 1;
  FieldEvaluation fields = FieldEvaluation::StepStart;

  // dt = 1e-3 * tau / 10, capped at 1e-3.
  static AraIntegratorConfig defaults_for(double tau) {
    AraIntegratorConfig cfg;
    cfg.dt = std::min(1e-4 * tau, 1e-3);
    return cfg;
  }
};

// The two representative spins of the mean-field dynamics.
class AraMeanField {
 public:
  explicit AraMeanField(const ModelParams& params)
      : params_(params), u_(SpinStateQ::up()), d_(SpinStateQ::down()) {}

  const SpinStateQ& spin_u() const { return u_; }
  const SpinStateQ& spin_d() const { return d_; }

  OrderParams magnetization() const { return {params_.up_fraction() * u_.sigma_z(), params_.x * d_.sigma_z()}; }

  // Mean-field energy per spin including the driver terms.
  double energy(const SchedulePoint& point) const {
    const OrderParams m = magnetization();
    const double transverse = params_.up_fraction() * u_.sigma_x() + params_.x * d_.sigma_x();
    return point.s * energy_density(params_, m) -
           (1.0 - point.s) * (point.lambda * transverse + (1.0 - point.lambda) * m.staggered());
  }

  // Advances both spins by dt. `point` is the schedule at the step start and
  // `mid_point` the schedule at t + dt/2 (used by the midpoint variant).
  void step(const SchedulePoint& point, const SchedulePoint& mid_point, double dt, FieldEvaluation mode) {
    FieldPair h = mean_fields(params_, point, magnetization());
    double g = point.fluctuation();
    if (mode == FieldEvaluation::Midpoint) {
      AraMeanField half = *this;
      half.apply(h, g, 0.5 * dt);
      h = mean_fields(params_, mid_point, half.magnetization());
      g = mid_point.fluctuation();
    }
    if (!std::isfinite(h.h_u) || !std::isfinite(h.h_d) || !std::isfinite(g))
      throw IntegratorError("non-finite mean field (h_u=" + std::to_string(h.h_u) +
                            ", h_d=" + std::to_string(h.h_d) + ")");
    apply(h, g, dt);
  }

 private:
  void apply(const FieldPair& h, double g, double dt) {
    u_.evolve(h.h_u, g, dt);
    d_.evolve(h.h_d, g, dt);
  }

  ModelParams params_;
  SpinStateQ u_, d_;
};

namespace detail {

// Number of uniform steps covering [0, tau] with spacing at most dt.
inline std::size_t step_count(double tau, double dt) {
  if (!(dt > 0.0)) throw DomainError("dt must be > 0");
  if (dt > tau) throw DomainError("dt must not exceed the runtime tau");
  return static_cast<std::size_t>(std::ceil(tau / dt - 1e-9));
}

}  // namespace detail

// Self-consistent mean-field evolution from the marked state.
inline Trajectory ara_evolve(const ModelParams& params, const AnnealPath& path, const AraIntegratorConfig& cfg) {
  params.validate();
  if (cfg.sampling_stride == 0) throw DomainError("sampling stride must be >= 1");
  const double tau = path.tau();
  const std::size_t steps = detail::step_count(tau, cfg.dt);
  const double dt = tau / double(steps);

  AraMeanField system(params);
  Trajectory traj;
  traj.samples.reserve(steps / cfg.sampling_stride + 2);
  traj.samples.push_back(make_sample(params, 0.0, path.at(0.0), system.magnetization()));
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = dt * double(k);
    system.step(path.at(t), path.at(std::min(tau, t + 0.5 * dt)), dt, cfg.fields);
    const std::size_t done = k + 1;
    if (done % cfg.sampling_stride == 0 || done == steps) {
      const double t_next = done == steps ? tau : dt * double(done);
      traj.samples.push_back(make_sample(params, t_next, path.at(t_next), system.magnetization()));
    }
  }
  return traj;
}

inline constexpr std::size_t kMaxSectorDimension = 100000;

// Permutation-symmetric sector of the two sublattices: basis |a_u, a_d> with
// S_u^z = N_u - 2 a_u and S_d^z = N_d - 2 a_d.
class CollectiveSector {
 public:
  CollectiveSector(const ModelParams& params, std::size_t n_spins) : params_(params), n_(n_spins) {
    params.validate();
    if (n_spins < 1) throw DomainError("N must be >= 1");
    n_u_ = static_cast<std::size_t>(std::llround(double(n_spins) * params.up_fraction()));
    n_d_ = n_spins - n_u_;
    const double dim = double(n_u_ + 1) * double(n_d_ + 1);
    if (dim > double(kMaxSectorDimension))
      throw ResourceError("symmetric sector dimension " + std::to_string(std::size_t(dim)) + " exceeds " +
                          std::to_string(kMaxSectorDimension));
    state_.assign((n_u_ + 1) * (n_d_ + 1), cplx{0.0, 0.0});
    // Marked state: all u spins up, all d spins down.
    state_[index(0, n_d_)] = 1.0;

    // Raising amplitudes of S^x = J^+ + J^-, between a and a-1.
    lift_u_.resize(n_u_ + 1);
    lift_d_.resize(n_d_ + 1);
    for (std::size_t a = 1; a <= n_u_; ++a) lift_u_[a] = collective_matrix_element(n_u_, a);
    for (std::size_t a = 1; a <= n_d_; ++a) lift_d_[a] = collective_matrix_element(n_d_, a);
  }

  std::size_t n() const { return n_; }
  std::size_t n_u() const { return n_u_; }
  std::size_t n_d() const { return n_d_; }
  std::size_t dimension() const { return state_.size(); }
  const std::vector<cplx>& state() const { return state_; }

  double norm() const {
    double acc = 0.0;
    for (const auto& c : state_) acc += std::norm(c);
    return acc;
  }

  double sz_u(std::size_t a) const { return double(n_u_) - 2.0 * double(a); }
  double sz_d(std::size_t a) const { return double(n_d_) - 2.0 * double(a); }

  // <S_u^z>/N and <S_d^z>/N.
  OrderParams magnetization() const {
    double mu = 0.0, md = 0.0;
    for (std::size_t au = 0; au <= n_u_; ++au)
      for (std::size_t ad = 0; ad <= n_d_; ++ad) {
        const double w = std::norm(state_[index(au, ad)]);
        mu += w * sz_u(au);
        md += w * sz_d(ad);
      }
    return {mu / double(n_), md / double(n_)};
  }

  // |psi> <- exp(-i H(point) dt) |psi>.
  void evolve(const SchedulePoint& point, double dt) {
    diagonal(point, diag_);
    const double g = point.fluctuation();
    const auto [dmin, dmax] = std::minmax_element(diag_.begin(), diag_.end());
    const double spread = g * double(n_);  // ||S_u^x + S_d^x|| = N
    const double lo = *dmin - spread, hi = *dmax + spread;
    const double center = 0.5 * (lo + hi);
    const double radius = 0.5 * (hi - lo) * 1.01 + 1e-12;
    chebyshev_step(center, radius, g, dt);
  }

 private:
  std::size_t index(std::size_t a_u, std::size_t a_d) const { return a_u * (n_d_ + 1) + a_d; }

  // <a-1| J^+ + J^- |a> for a spin of length n/2 with J^z = n/2 - a.
  static double collective_matrix_element(std::size_t n, std::size_t a) {
    const double j = 0.5 * double(n);
    const double mz = j - double(a);
    return std::sqrt((j - mz) * (j + mz + 1.0));
  }

  void diagonal(const SchedulePoint& point, std::vector<double>& out) const {
    out.resize(state_.size());
    const double scale = double(n_);
    const double bias = point.bias();
    for (std::size_t au = 0; au <= n_u_; ++au)
      for (std::size_t ad = 0; ad <= n_d_; ++ad) {
        const double su = sz_u(au), sd = sz_d(ad);
        const OrderParams m{su / scale, sd / scale};
        out[index(au, ad)] = scale * point.s * energy_density(params_, m) - bias * (su - sd);
      }
  }

  // out = ((H - center) / radius) in.
  void apply_scaled(const std::vector<cplx>& in, std::vector<cplx>& out, double center, double radius,
                    double g) const {
    const double inv = 1.0 / radius;
    for (std::size_t au = 0; au <= n_u_; ++au)
      for (std::size_t ad = 0; ad <= n_d_; ++ad) {
        const std::size_t k = index(au, ad);
        cplx acc = (diag_[k] - center) * in[k];
        cplx off{0.0, 0.0};
        if (au > 0) off += lift_u_[au] * in[index(au - 1, ad)];
        if (au < n_u_) off += lift_u_[au + 1] * in[index(au + 1, ad)];
        if (ad > 0) off += lift_d_[ad] * in[index(au, ad - 1)];
        if (ad < n_d_) off += lift_d_[ad + 1] * in[index(au, ad + 1)];
        out[k] = (acc - g * off) * inv;
      }
  }

  // exp(-i H dt) = exp(-i c dt) sum_k (2 - delta_k0) (-i)^k J_k(r dt) T_k(H~).
  void chebyshev_step(double center, double radius, double g, double dt) {
    const double z = radius * dt;
    const std::size_t dim = state_.size();
    std::vector<cplx> t_prev = state_, t_cur(dim), t_next(dim), acc(dim);
    const double j0 = std::cyl_bessel_j(0.0, z);
    for (std::size_t k = 0; k < dim; ++k) acc[k] = j0 * t_prev[k];
    apply_scaled(t_prev, t_cur, center, radius, g);
    cplx phase{0.0, -1.0};  // (-i)^k
    const std::size_t max_terms = static_cast<std::size_t>(z) + 200;
    for (std::size_t order = 1; order < max_terms; ++order) {
      const double jk = std::cyl_bessel_j(double(order), z);
      const cplx coef = 2.0 * jk * phase;
      for (std::size_t k = 0; k < dim; ++k) acc[k] += coef * t_cur[k];
      if (double(order) > z && std::abs(jk) < 1e-17) break;
      apply_scaled(t_cur, t_next, center, radius, g);
      for (std::size_t k = 0; k < dim; ++k) t_next[k] = 2.0 * t_next[k] - t_prev[k];
      std::swap(t_prev, t_cur);
      std::swap(t_cur, t_next);
      phase *= cplx{0.0, -1.0};
    }
    const cplx global = std::polar(1.0, -center * dt);
    for (std::size_t k = 0; k < dim; ++k) state_[k] = global * acc[k];
  }

  ModelParams params_;
  std::size_t n_, n_u_ = 0, n_d_ = 0;
  std::vector<cplx> state_;
  std::vector<double> lift_u_, lift_d_, diag_;
};

// Exact finite-N evolution from the marked state, sampled every step.
inline Trajectory ara_exact_finite_N(const ModelParams& params, const AnnealPath& path, std::size_t n_spins,
                                     double dt) {
  CollectiveSector sector(params, n_spins);
  const double tau = path.tau();
  const std::size_t steps = detail::step_count(tau, dt);
  const double h = tau / double(steps);
  Trajectory traj;
  traj.samples.reserve(steps + 1);
  traj.samples.push_back(make_sample(params, 0.0, path.at(0.0), sector.magnetization()));
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = h * double(k);
    sector.evolve(path.at(std::min(tau, t + 0.5 * h)), h);
    if (std::abs(sector.norm() - 1.0) > 1e-9)
      throw IntegratorError("finite-N state lost normalization: " + std::to_string(sector.norm()));
    const double t_next = k + 1 == steps ? tau : h * double(k + 1);
    traj.samples.push_back(make_sample(params, t_next, path.at(t_next), sector.magnetization()));
  }
  return traj;
}

}  // namespace revanneal
