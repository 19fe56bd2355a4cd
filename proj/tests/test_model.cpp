#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include <revanneal/model.hpp>

using namespace revanneal;

TEST(ModelParams, AcceptsValidTriples) {
  EXPECT_NO_THROW(ModelParams(3, 0.5, 0.2));
  EXPECT_NO_THROW(ModelParams(5, 0.9, 0.5));
  EXPECT_NO_THROW(ModelParams(7, 1e-6, 1e-6));
}

TEST(ModelParams, RejectsEvenOrSmallP) {
  EXPECT_THROW(ModelParams(2, 0.5, 0.2), DomainError);
  EXPECT_THROW(ModelParams(4, 0.5, 0.2), DomainError);
  EXPECT_THROW(ModelParams(1, 0.5, 0.2), DomainError);
}

TEST(ModelParams, RejectsAlphaAndXOutOfRange) {
  EXPECT_THROW(ModelParams(3, 0.0, 0.2), DomainError);
  EXPECT_THROW(ModelParams(3, 1.0, 0.2), DomainError);
  EXPECT_THROW(ModelParams(3, 0.5, 0.0), DomainError);
  EXPECT_THROW(ModelParams(3, 0.5, 0.51), DomainError);
  EXPECT_THROW(ModelParams(3, std::nan(""), 0.2), DomainError);
}

TEST(SchedulePoint, DerivedQuantities) {
  const SchedulePoint pt{0.25, 0.6};
  EXPECT_DOUBLE_EQ(pt.fluctuation(), 0.75 * 0.6);
  EXPECT_DOUBLE_EQ(pt.temperature(), 0.75 * 0.6);
  EXPECT_DOUBLE_EQ(pt.bias(), 0.75 * 0.4);
  EXPECT_THROW((SchedulePoint{1.1, 0.0}.validate()), DomainError);
  EXPECT_THROW((SchedulePoint{0.0, -0.1}.validate()), DomainError);
}

TEST(EnergyDensity, HandEvaluatedExamples) {
  const ModelParams params(3, 0.5, 0.2);
  EXPECT_DOUBLE_EQ(energy_density(params, {0.0, 0.0}), 0.0);
  EXPECT_NEAR(energy_density(params, {0.8, 0.2}), -1.108, 1e-12);
  EXPECT_NEAR(energy_density(params, {0.8, -0.2}), -0.716, 1e-12);
}

TEST(EnergyDensity, MinimumAtAllUpStateOnGrid) {
  for (const ModelParams params : {ModelParams(3, 0.5, 0.2), ModelParams(5, 0.9, 0.2), ModelParams(3, 0.1, 0.1),
                                   ModelParams(3, 0.6, 0.25), ModelParams(7, 0.3, 0.5)}) {
    const std::size_t n = 401;
    const double wu = params.up_fraction(), wd = params.x;
    double best = std::numeric_limits<double>::infinity();
    double best_u = 0.0, best_d = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const double u = -wu + 2.0 * wu * double(i) / double(n - 1);
        const double d = -wd + 2.0 * wd * double(j) / double(n - 1);
        const double e = energy_density(params, {u, d});
        if (e < best) {
          best = e;
          best_u = u;
          best_d = d;
        }
      }
    const double expected = -1.0 - params.alpha * std::pow(1.0 - 2.0 * params.x, params.p);
    EXPECT_NEAR(best, expected, 1e-12);
    EXPECT_NEAR(best_u, wu, 1e-12);
    EXPECT_NEAR(best_d, wd, 1e-12);
    EXPECT_NEAR(energy_density(params, all_up_state(params)), expected, 1e-12);
  }
}

TEST(DeltaM, ZeroExactlyAtAllUp) {
  for (double x : {0.1, 0.2, 0.25, 0.5}) {
    const ModelParams params(3, 0.5, x);
    EXPECT_EQ(delta_m(params, all_up_state(params)), 0.0);
    EXPECT_NEAR(delta_m(params, marked_state(params)), 2.0 * x, 1e-15);
  }
}

TEST(ScheduleAt, LinearSqrtEndpoints) {
  const auto path = AnnealPath::linear_sqrt(10.0);
  const auto start = schedule_at(path, 0.0);
  const auto end = schedule_at(path, 10.0);
  EXPECT_EQ(start.s, 0.0);
  EXPECT_EQ(start.lambda, 0.0);
  EXPECT_DOUBLE_EQ(end.s, 1.0);
  EXPECT_DOUBLE_EQ(end.lambda, 1.0);
  const auto mid = schedule_at(path, 2.5);
  EXPECT_DOUBLE_EQ(mid.s, 0.25);
  EXPECT_DOUBLE_EQ(mid.lambda, 0.5);
}

TEST(ScheduleAt, PiecewiseLinearUniformSpeed) {
  const auto path = AnnealPath::piecewise_linear({{0.0, 0.0}, {0.2, 0.7}, {0.6, 0.7}, {1.0, 0.0}}, 3.0);
  const auto pt = schedule_at(path, 1.5);
  EXPECT_NEAR(pt.s, 0.4, 1e-15);
  EXPECT_NEAR(pt.lambda, 0.7, 1e-15);
  const auto corner = schedule_at(path, 1.0);
  EXPECT_NEAR(corner.s, 0.2, 1e-15);
  EXPECT_NEAR(corner.lambda, 0.7, 1e-15);
  const auto end = schedule_at(path, 3.0);
  EXPECT_NEAR(end.s, 1.0, 1e-15);
  EXPECT_NEAR(end.lambda, 0.0, 1e-15);
}

TEST(ScheduleAt, RejectsTimesOutsideRuntime) {
  const auto path = AnnealPath::linear_sqrt(10.0);
  EXPECT_THROW(schedule_at(path, -1e-9), DomainError);
  EXPECT_THROW(schedule_at(path, 10.0 + 1e-9), DomainError);
  EXPECT_THROW(schedule_at(path, std::nan("")), DomainError);
}

TEST(AnnealPath, RejectsInvalidConstruction) {
  EXPECT_THROW(AnnealPath::piecewise_linear({{0.0, 0.0}}, 1.0), DomainError);
  EXPECT_THROW(AnnealPath::piecewise_linear({{0.0, 0.0}, {1.2, 0.0}}, 1.0), DomainError);
  EXPECT_THROW(AnnealPath::linear_sqrt(0.0), DomainError);
  EXPECT_THROW(AnnealPath::linear_sqrt(-1.0), DomainError);
}

TEST(ScheduleAt, ContinuousInTime) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto pw = AnnealPath::piecewise_linear({{0.0, 0.0}, {0.2, 0.7}, {0.6, 0.7}, {1.0, 0.0}}, 3.0);
  const auto ls = AnnealPath::linear_sqrt(7.0);
  const double eps = 1e-12;
  for (const auto* path : {&pw, &ls}) {
    std::vector<double> times{0.0, path->tau() / 3.0, 2.0 * path->tau() / 3.0};
    for (int k = 0; k < 200; ++k) times.push_back(unit(rng) * (path->tau() - eps));
    for (double t : times) {
      const auto a = schedule_at(*path, t);
      const auto b = schedule_at(*path, t + eps);
      EXPECT_LT(std::hypot(a.s - b.s, a.lambda - b.lambda), 1e-6) << "t=" << t;
    }
  }
}

TEST(Trajectory, RmsDifferenceInterpolates) {
  Trajectory a, b;
  for (int k = 0; k <= 10; ++k) b.samples.push_back({0.1 * k, 0, 0, 0, 0.1 * k, 0});
  for (int k = 0; k <= 4; ++k) a.samples.push_back({0.25 * k, 0, 0, 0, 0.25 * k + 0.01, 0});
  EXPECT_NEAR(rms_difference_m_d(a, b), 0.01, 1e-12);
}
