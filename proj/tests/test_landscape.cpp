#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include <revanneal/landscape.hpp>
#include <revanneal/optimize.hpp>

using namespace revanneal;

namespace {

const ModelParams kCorridor(3, 0.5, 0.2);

// Independent transcription of the two eliminated-field landscapes.
double reference_ara(const ModelParams& prm, double s, double lambda, double mu, double md) {
  const double g = (1 - s) * lambda, b = (1 - s) * (1 - lambda);
  const double wu = 1 - prm.x, wd = prm.x;
  return -s * std::pow(mu + md, prm.p) - s * prm.alpha * std::pow(mu - md, prm.p) - b * (mu - md) -
         g * std::sqrt(wu * wu - mu * mu) - g * std::sqrt(wd * wd - md * md);
}

double plogp(double v) { return v > 0 ? v * std::log(v) : 0.0; }

double reference_sra(const ModelParams& prm, double s, double lambda, double mu, double md) {
  const double t = (1 - s) * lambda, b = (1 - s) * (1 - lambda);
  const double wu = 1 - prm.x, wd = prm.x;
  return -s * std::pow(mu + md, prm.p) - s * prm.alpha * std::pow(mu - md, prm.p) - b * (mu - md) +
         t * (plogp(wu + mu) / 2 + plogp(wu - mu) / 2 + plogp(wd + md) / 2 + plogp(wd - md) / 2);
}

}  // namespace

TEST(StaticAction, FiniteTemperatureLargeBetaAtOrigin) {
  const double v = static_action_finite_T(kCorridor, {0.0, 0.5}, {0.0, 0.0}, {0.0, 0.0}, 1e6);
  EXPECT_NEAR(v, -0.5, 1e-5);
}

TEST(StaticAction, FiniteTemperatureLongitudinalOnly) {
  // With zero fields and no transverse term both sublattices contribute
  // log 2 with weights (1-x) and x, which sum to one.
  for (double beta : {0.5, 1.0, 3.0, 20.0}) {
    const double v = static_action_finite_T(kCorridor, {0.0, 0.0}, {0.8, -0.2}, {0.0, 0.0}, beta);
    EXPECT_NEAR(v, -1.0 - std::log(2.0) / beta, 1e-14) << "beta=" << beta;
  }
}

TEST(StaticAction, FiniteTemperatureApproachesZeroTemperature) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    const SchedulePoint pt{unit(rng), unit(rng)};
    const OrderParams m{(2 * unit(rng) - 1) * 0.8, (2 * unit(rng) - 1) * 0.2};
    const FieldPair h{4 * unit(rng) - 2, 4 * unit(rng) - 2};
    EXPECT_NEAR(static_action_finite_T(kCorridor, pt, m, h, 1e8), static_action_zero_T(kCorridor, pt, m, h), 1e-6);
  }
}

TEST(StaticAction, RejectsNonPositiveBeta) {
  EXPECT_THROW(static_action_finite_T(kCorridor, {0.0, 0.5}, {0.0, 0.0}, {0.0, 0.0}, 0.0), DomainError);
  EXPECT_THROW(LandscapeKind::finite_temperature(-1.0), DomainError);
}

TEST(SolveFields, HandEvaluatedExamples) {
  const SchedulePoint pt{0.0, 0.5};
  const auto ara = solve_fields(kCorridor, pt, {0.4, 0.1}, LandscapeKind::ara());
  EXPECT_NEAR(ara.h_u, 0.288675, 1e-6);
  EXPECT_NEAR(ara.h_d, 0.288675, 1e-6);
  const auto sra = solve_fields(kCorridor, pt, {0.4, 0.1}, LandscapeKind::sra());
  EXPECT_NEAR(sra.h_u, 0.274653, 1e-6);
  EXPECT_NEAR(sra.h_d, 0.274653, 1e-6);
  const auto zero = solve_fields(kCorridor, {0.3, 0.9}, {0.0, 0.0}, LandscapeKind::ara());
  EXPECT_EQ(zero.h_u, 0.0);
  EXPECT_EQ(zero.h_d, 0.0);
}

TEST(SolveFields, BoundaryIsSingular) {
  const SchedulePoint pt{0.2, 0.5};
  EXPECT_THROW(solve_fields(kCorridor, pt, {0.8, 0.0}, LandscapeKind::ara()), SingularFieldError);
  EXPECT_THROW(solve_fields(kCorridor, pt, {0.0, -0.2}, LandscapeKind::sra()), SingularFieldError);
  EXPECT_THROW(solve_fields(kCorridor, pt, {0.9, 0.0}, LandscapeKind::ara()), DomainError);
}

// Central differences of the four-argument action in h vanish at the solved fields.
TEST(SolveFields, StationaryPointOfAction) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double step = 1e-6;
  for (int k = 0; k < 40; ++k) {
    const SchedulePoint pt{0.9 * unit(rng), 0.05 + 0.95 * unit(rng)};
    const OrderParams m{(2 * unit(rng) - 1) * 0.75, (2 * unit(rng) - 1) * 0.18};
    const double beta = 0.5 + 10 * unit(rng);

    auto check = [&](auto&& action, const FieldPair& h, const char* what) {
      const double du = (action(FieldPair{h.h_u + step, h.h_d}) - action(FieldPair{h.h_u - step, h.h_d})) / (2 * step);
      const double dd = (action(FieldPair{h.h_u, h.h_d + step}) - action(FieldPair{h.h_u, h.h_d - step})) / (2 * step);
      EXPECT_LT(std::abs(du), 1e-5) << what;
      EXPECT_LT(std::abs(dd), 1e-5) << what;
    };
    check([&](const FieldPair& h) { return static_action_finite_T(kCorridor, pt, m, h, beta); },
          solve_fields(kCorridor, pt, m, LandscapeKind::finite_temperature(beta)), "finite-T");
    check([&](const FieldPair& h) { return static_action_zero_T(kCorridor, pt, m, h); },
          solve_fields(kCorridor, pt, m, LandscapeKind::ara()), "ARA");
    check([&](const FieldPair& h) { return static_action_zero_field(kCorridor, pt, m, h); },
          solve_fields(kCorridor, pt, m, LandscapeKind::sra()), "SRA");
  }
}

TEST(SolveFields, EliminatingFieldsReproducesLandscape) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int k = 0; k < 40; ++k) {
    const SchedulePoint pt{0.9 * unit(rng), 0.05 + 0.95 * unit(rng)};
    const OrderParams m{(2 * unit(rng) - 1) * 0.75, (2 * unit(rng) - 1) * 0.18};
    EXPECT_NEAR(static_action_zero_T(kCorridor, pt, m, solve_fields(kCorridor, pt, m, LandscapeKind::ara())),
                landscape_value(kCorridor, pt, m, LandscapeKind::ara()), 1e-12);
    // The SRA landscape drops an m-independent constant of the zero-field action.
    const double w = 1 - kCorridor.x, x = kCorridor.x;
    const double constant = -pt.temperature() * (std::log(2.0) + w * std::log(w) + x * std::log(x));
    EXPECT_NEAR(static_action_zero_field(kCorridor, pt, m, solve_fields(kCorridor, pt, m, LandscapeKind::sra())),
                landscape_value(kCorridor, pt, m, LandscapeKind::sra()) + constant, 1e-12);
  }
}

TEST(LandscapeValue, HandEvaluatedExamples) {
  EXPECT_NEAR(landscape_value(kCorridor, {0.0, 0.5}, {0.0, 0.0}, LandscapeKind::ara()), -0.5, 1e-15);
  EXPECT_NEAR(landscape_value(kCorridor, {0.0, 0.5}, {0.0, 0.0}, LandscapeKind::sra()), -0.250201, 1e-6);
  EXPECT_NEAR(landscape_value(kCorridor, {1.0, 0.3}, {0.8, 0.2}, LandscapeKind::ara()), -1.108, 1e-12);
  EXPECT_NEAR(landscape_value(kCorridor, {1.0, 0.3}, {0.8, 0.2}, LandscapeKind::sra()), -1.108, 1e-12);
}

TEST(LandscapeValue, MatchesReferenceFormulas) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (const ModelParams prm : {ModelParams(3, 0.5, 0.2), ModelParams(5, 0.9, 0.2), ModelParams(3, 0.6, 0.25)}) {
    for (int k = 0; k < 100; ++k) {
      const double s = unit(rng), lambda = unit(rng);
      const double mu = (2 * unit(rng) - 1) * (1 - prm.x), md = (2 * unit(rng) - 1) * prm.x;
      EXPECT_NEAR(landscape_value(prm, {s, lambda}, {mu, md}, LandscapeKind::ara()),
                  reference_ara(prm, s, lambda, mu, md), 1e-13);
      EXPECT_NEAR(landscape_value(prm, {s, lambda}, {mu, md}, LandscapeKind::sra()),
                  reference_sra(prm, s, lambda, mu, md), 1e-13);
    }
  }
}

TEST(LandscapeValue, BoundaryUsesZeroLogZero) {
  const double v = landscape_value(kCorridor, {0.0, 0.5}, {0.8, -0.2}, LandscapeKind::sra());
  EXPECT_TRUE(std::isfinite(v));
  EXPECT_NEAR(v, -0.5 + 0.25 * (1.6 * std::log(1.6) + 0.4 * std::log(0.4)), 1e-14);
}

TEST(LandscapeValue, OutsideDomainThrows) {
  EXPECT_THROW(landscape_value(kCorridor, {0.0, 0.5}, {0.81, 0.0}, LandscapeKind::ara()), DomainError);
  EXPECT_THROW(landscape_value(kCorridor, {0.0, 0.5}, {0.0, -0.21}, LandscapeKind::sra()), DomainError);
}

TEST(LandscapeValue, AraAndSraCoincideAtEndOfAnneal) {
  for (double lambda : {0.0, 0.4, 1.0})
    for (int i = 0; i <= 40; ++i)
      for (int j = 0; j <= 40; ++j) {
        const OrderParams m{-0.8 + 0.04 * i, -0.2 + 0.01 * j};
        const double a = landscape_value(kCorridor, {1.0, lambda}, m, LandscapeKind::ara());
        const double b = landscape_value(kCorridor, {1.0, lambda}, m, LandscapeKind::sra());
        EXPECT_NEAR(a, b, 1e-12);
      }
}

TEST(LandscapeValue, ZeroTemperatureLimitOfFiniteTemperature) {
  const auto kind = LandscapeKind::finite_temperature(1e8);
  for (const SchedulePoint pt : {SchedulePoint{0.3, 0.7}, SchedulePoint{0.0, 1.0}, SchedulePoint{0.6, 0.2}})
    for (int i = 1; i <= 21; ++i)
      for (int j = 1; j <= 21; ++j) {
        const OrderParams m{-0.8 + 1.6 * i / 22.0, -0.2 + 0.4 * j / 22.0};
        EXPECT_NEAR(landscape_value(kCorridor, pt, m, LandscapeKind::ara()), landscape_value(kCorridor, pt, m, kind), 1e-6);
      }
}

TEST(LandscapeValue, PureTransverseFieldIsEven) {
  for (int i = 0; i <= 20; ++i)
    for (int j = 0; j <= 20; ++j) {
      const double mu = 0.04 * i, md = 0.01 * j;
      const SchedulePoint pt{0.0, 1.0};
      const double v = landscape_value(kCorridor, pt, {mu, md}, LandscapeKind::ara());
      EXPECT_NEAR(v, landscape_value(kCorridor, pt, {-mu, md}, LandscapeKind::ara()), 1e-15);
      EXPECT_NEAR(v, landscape_value(kCorridor, pt, {mu, -md}, LandscapeKind::ara()), 1e-15);
    }
}

TEST(ReducedLandscape, HandEvaluatedExamples) {
  const auto a = reduced_landscape(kCorridor, {1.0, 0.5}, 0.2, LandscapeKind::ara());
  EXPECT_NEAR(a.phi, -1.108, 1e-12);
  EXPECT_NEAR(a.m_u_argmin, 0.8, 1e-9);
  const auto b = reduced_landscape(kCorridor, {0.0, 0.0}, -0.2, LandscapeKind::ara());
  EXPECT_NEAR(b.phi, -1.0, 1e-12);
  EXPECT_NEAR(b.m_u_argmin, 0.8, 1e-9);
}

TEST(ReducedLandscape, MatchesDenseScan) {
  const SchedulePoint pt{0.35, 0.6};
  for (const auto kind : {LandscapeKind::ara(), LandscapeKind::sra()})
    for (double md : {-0.2, -0.13, 0.0, 0.07, 0.2}) {
      double best = std::numeric_limits<double>::infinity();
      for (int i = 0; i <= 200000; ++i) {
        const double mu = -0.8 + 1.6 * i / 200000.0;
        best = std::min(best, landscape_value(kCorridor, pt, {mu, md}, kind));
      }
      const auto r = reduced_landscape(kCorridor, pt, md, kind);
      EXPECT_LE(r.phi, best + 1e-12);
      EXPECT_NEAR(r.phi, best, 1e-8);
      EXPECT_NEAR(landscape_value(kCorridor, pt, {r.m_u_argmin, md}, kind), r.phi, 1e-15);
    }
}

TEST(ReducedLandscape, BlendedWellsOnSecondStage) {
  const auto curve = reduced_landscape_curve(kCorridor, {0.4, 0.7}, LandscapeKind::ara(), 401);
  EXPECT_EQ(optimize::sequence_local_minima(curve.phi).size(), 1u);
}

TEST(MinimizeLandscape, EndOfAnnealCorner) {
  for (const auto kind : {LandscapeKind::ara(), LandscapeKind::sra()}) {
    const auto r = minimize_landscape(kCorridor, {1.0, 0.5}, kind, 101);
    EXPECT_NEAR(r.m_star.m_u, 0.8, 1e-9);
    EXPECT_NEAR(r.m_star.m_d, 0.2, 1e-9);
    EXPECT_NEAR(r.value, -1.108, 1e-12);
  }
  const auto r = minimize_landscape(kCorridor, {1.0, 0.5}, LandscapeKind::finite_temperature(1e8), 101);
  EXPECT_NEAR(r.m_star.m_u, 0.8, 1e-6);
  EXPECT_NEAR(r.m_star.m_d, 0.2, 1e-6);
  EXPECT_NEAR(r.value, -1.108, 1e-6);
}

TEST(MinimizeLandscape, StartOfAnnealIsMarkedState) {
  for (const ModelParams prm : {ModelParams(3, 0.5, 0.2), ModelParams(5, 0.9, 0.2), ModelParams(7, 0.2, 0.4)})
    for (const auto kind : {LandscapeKind::ara(), LandscapeKind::sra()}) {
      const auto r = minimize_landscape(prm, {0.0, 0.0}, kind, 101);
      EXPECT_NEAR(r.m_star.m_u, 1 - prm.x, 1e-12);
      EXPECT_NEAR(r.m_star.m_d, -prm.x, 1e-12);
      EXPECT_NEAR(r.value, -1.0, 1e-12);
    }
}

TEST(MinimizeLandscape, ThreeWellsOfFailureCase) {
  const ModelParams prm(5, 0.9, 0.2);
  const auto r = minimize_landscape(prm, {0.4, 0.88}, LandscapeKind::ara(), kDefaultLandscapeGrid);
  ASSERT_EQ(r.local_minima.size(), 3u);
  int near_all_up = 0, near_marked = 0, near_origin = 0;
  for (const auto& m : r.local_minima) {
    if (m.m.m_u > 0.7 && m.m.m_d > 0.15) ++near_all_up;
    if (m.m.m_u > 0.7 && m.m.m_d < -0.15) ++near_marked;
    if (std::abs(m.m.m_u) < 0.2 && std::abs(m.m.m_d) < 0.05) ++near_origin;
  }
  EXPECT_EQ(near_all_up, 1);
  EXPECT_EQ(near_marked, 1);
  EXPECT_EQ(near_origin, 1);
}

TEST(MinimizeLandscape, GlobalMinimumIsListedAndLowest) {
  const auto r = minimize_landscape(ModelParams(5, 0.9, 0.2), {0.4, 0.88}, LandscapeKind::ara(), 201);
  bool listed = false;
  for (const auto& m : r.local_minima) {
    EXPECT_LE(r.value, m.value);
    if (m.m.m_u == r.m_star.m_u && m.m.m_d == r.m_star.m_d && m.value == r.value) listed = true;
  }
  EXPECT_TRUE(listed);
}

TEST(MinimizeLandscape, AgreesWithBruteForceGrid) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int ps[] = {3, 5, 7};
  for (int k = 0; k < 20; ++k) {
    const ModelParams prm(ps[k % 3], 0.05 + 0.9 * unit(rng), 0.05 + 0.45 * unit(rng));
    const SchedulePoint pt{unit(rng), unit(rng)};
    const auto kind = k % 2 ? LandscapeKind::sra() : LandscapeKind::ara();
    const auto r = minimize_landscape(prm, pt, kind, 101);

    const detail::LandscapeEval eval(prm, pt, kind);
    const std::size_t n = 1001;
    const double wu = prm.up_fraction(), wd = prm.x;
    double best = std::numeric_limits<double>::infinity(), bu = 0, bd = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const double u = -wu + 2 * wu * double(i) / double(n - 1);
        const double d = -wd + 2 * wd * double(j) / double(n - 1);
        const double v = eval(u, d);
        if (v < best) {
          best = v;
          bu = u;
          bd = d;
        }
      }
    EXPECT_LE(r.value, best + 1e-12) << "case " << k;
    EXPECT_NEAR(r.m_star.m_u, bu, 0.01) << "case " << k << " s=" << pt.s << " lambda=" << pt.lambda;
    EXPECT_NEAR(r.m_star.m_d, bd, 0.01) << "case " << k << " s=" << pt.s << " lambda=" << pt.lambda;
  }
}

TEST(MinimizeLandscape, DeterministicTieBreak) {
  // At s = 0, lambda = 1 the ARA landscape is even in both coordinates with a
  // single minimum at the origin, so the answer must not depend on the call.
  const auto a = minimize_landscape(kCorridor, {0.0, 1.0}, LandscapeKind::ara(), 101);
  const auto b = minimize_landscape(kCorridor, {0.0, 1.0}, LandscapeKind::ara(), 101);
  EXPECT_EQ(a.m_star.m_u, b.m_star.m_u);
  EXPECT_EQ(a.m_star.m_d, b.m_star.m_d);
  EXPECT_NEAR(a.m_star.m_u, 0.0, 1e-8);
  EXPECT_NEAR(a.m_star.m_d, 0.0, 1e-8);
}

TEST(LandscapeGrid, ShapeAndOrdering) {
  const auto g = landscape_grid(kCorridor, {0.5, 0.5}, LandscapeKind::ara(), 11);
  ASSERT_EQ(g.phi.size(), 121u);
  EXPECT_EQ(g.m_u.front(), -0.8);
  EXPECT_EQ(g.m_d.front(), -0.2);
  EXPECT_EQ(g.m_u.back(), 0.8);
  EXPECT_EQ(g.m_d.back(), 0.2);
  EXPECT_EQ(g.m_d[1], -0.2 + 0.04);
  EXPECT_NEAR(g.phi[37], landscape_value(kCorridor, {0.5, 0.5}, {g.m_u[37], g.m_d[37]}, LandscapeKind::ara()), 1e-15);
}
