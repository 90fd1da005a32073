#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "myopic/matrix_tools.hpp"
#include "oracles.hpp"

using namespace myopic;

namespace {

Matrix random_matrix(std::mt19937_64& rng, std::size_t r, std::size_t c) {
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  Matrix m(r, Vector(c));
  for (auto& row : m) {
    for (double& v : row) v = u(rng);
  }
  return m;
}

}  // namespace

TEST(GameValue, MatchingPennies) {
  const GameValue g = game_value({{1, -1}, {-1, 1}});
  EXPECT_NEAR(g.value, 0.0, 1e-12);
  EXPECT_NEAR(g.row_strategy[0], 0.5, 1e-12);
  EXPECT_NEAR(g.col_strategy[0], 0.5, 1e-12);
}

TEST(GameValue, Constant) {
  EXPECT_NEAR(game_value({{3, 3, 3}, {3, 3, 3}}).value, 3.0, 1e-12);
}

TEST(GameValue, DiagonalCornerMatchesMeshMinimax) {
  const Matrix m{{1, 0}, {0, 0}};
  EXPECT_NEAR(game_value(m).value, oracle::brute_force_value_2rows(m, 1000), 1e-9);
  EXPECT_NEAR(game_value(m).value, 0.0, 1e-12);
}

TEST(GameValue, DualityOnRandomMatrices) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 50; ++t) {
    const Matrix m = random_matrix(rng, 1 + t % 5, 1 + (t / 5) % 5);
    const GameValue g = game_value(m);
    EXPECT_LE(std::abs(g.gap()), 1e-9);
    if (m.size() == 2) EXPECT_NEAR(g.value, oracle::brute_force_value_2rows(m, 20000), 1e-3);
  }
}

TEST(Envelope, ConvexFunctionUnchanged) {
  const auto grid = simplex_grid(2, 100);
  Vector f;
  for (const auto& p : grid) f.push_back(std::abs(2 * p[0] - 1));
  const Envelope e = envelope(grid, f, EnvelopeKind::kVex);
  for (std::size_t i = 0; i < f.size(); ++i) EXPECT_NEAR(e.values()[i], f[i], 1e-12);
}

TEST(Envelope, TentHasFlatVex) {
  const auto grid = simplex_grid(2, 100);
  Vector f;
  for (const auto& p : grid) f.push_back(-std::abs(2 * p[0] - 1));
  const Envelope e = envelope(grid, f, EnvelopeKind::kVex);
  for (double v : e.values()) EXPECT_NEAR(v, -1.0, 1e-12);
  const Envelope c = envelope(grid, f, EnvelopeKind::kCav);
  for (std::size_t i = 0; i < f.size(); ++i) EXPECT_NEAR(c.values()[i], f[i], 1e-12);
}

TEST(Envelope, RandomMatchesAffineMinorantOracle) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const auto grid = simplex_grid(2, 30);
  for (int t = 0; t < 20; ++t) {
    Vector f;
    for (std::size_t i = 0; i < grid.size(); ++i) f.push_back(u(rng));
    const Vector lo = oracle::affine_minorant_envelope(f);
    const Envelope e = envelope(grid, f, EnvelopeKind::kVex);
    Vector neg(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) neg[i] = -f[i];
    const Vector hi = oracle::affine_minorant_envelope(neg);
    const Envelope c = envelope(grid, f, EnvelopeKind::kCav);
    for (std::size_t i = 0; i < f.size(); ++i) {
      EXPECT_NEAR(e.values()[i], lo[i], 1e-12);
      EXPECT_NEAR(c.values()[i], -hi[i], 1e-12);
    }
  }
}

TEST(Envelope, ThreeStateHullIsConvexAndBelow) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const auto grid = simplex_grid(3, 6);
  Vector f;
  for (std::size_t i = 0; i < grid.size(); ++i) f.push_back(u(rng));
  const Envelope e = envelope(grid, f, EnvelopeKind::kVex);
  for (std::size_t i = 0; i < f.size(); ++i) EXPECT_LE(e.values()[i], f[i] + 1e-12);
  // Midpoint convexity along grid pairs whose midpoint is a grid point.
  for (std::size_t a = 0; a < grid.size(); ++a) {
    for (std::size_t b = 0; b < grid.size(); ++b) {
      Vector mid(3);
      for (int k = 0; k < 3; ++k) mid[k] = 0.5 * (grid[a][k] + grid[b][k]);
      for (std::size_t m = 0; m < grid.size(); ++m) {
        if (max_abs_diff(grid[m], mid) < 1e-12) {
          EXPECT_LE(e.values()[m], 0.5 * (e.values()[a] + e.values()[b]) + 1e-10);
        }
      }
    }
  }
}

namespace {

StateMatrices two_state_example() {
  StateMatrices s;
  s.a = {{{1, 0}, {0, 0}}, {{0, 0}, {0, 1}}};
  s.b = {{{0, 1}, {1, 0}}, {{1, 0}, {0, 1}}};
  return s;
}

}  // namespace

TEST(StateGames, StarValuesBetweenEntries) {
  const StateGameAnalysis an(two_state_example(), 20);
  for (std::size_t g = 0; g < an.grid().size(); ++g) {
    EXPECT_GE(an.a_values()[g], -1e-12);
    EXPECT_LE(an.a_values()[g], 1 + 1e-12);
    EXPECT_LE(an.vex_b().values()[g], an.b_values()[g] + 1e-12);
  }
  // a*(p) for this pair is p(1-p): value of diag(p, 1-p).
  for (std::size_t g = 0; g < an.grid().size(); ++g) {
    const double p = an.grid()[g][0];
    EXPECT_NEAR(an.a_values()[g], p * (1 - p), 1e-12);
  }
}

TEST(IndividualRationality, PlayerOne) {
  const StateGameAnalysis an(two_state_example());
  EXPECT_TRUE(individually_rational_p1(Vector{1, 1}, an).ok);
  const IrCheck low = individually_rational_p1(Vector{-100, -100}, an);
  EXPECT_FALSE(low.ok);
  EXPECT_EQ(low.worst_q.size(), 2u);
  // Boundary: y = (a*(e1), a*(e2)) = (0, 0) touches at the vertices and a*
  // is positive in between, so the zero vector fails in the interior.
  EXPECT_FALSE(individually_rational_p1(Vector{0, 0}, an).ok);
  EXPECT_TRUE(individually_rational_p1(Vector{0.25, 0.25}, an).ok);
}

TEST(IndividualRationality, PlayerTwo) {
  const StateGameAnalysis an(two_state_example());
  const Vector p{0.3, 0.7};
  const double vex = an.vex_b()(p);
  EXPECT_TRUE(individually_rational_p2(b_star(an.matrices(), p), p, an));
  EXPECT_TRUE(individually_rational_p2(vex, p, an));
  EXPECT_FALSE(individually_rational_p2(vex - 1, p, an));
}

TEST(IndividualRationality, GridAgreesWithCav) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int t = 0; t < 10; ++t) {
    StateMatrices s;
    s.a = {random_matrix(rng, 2, 2), random_matrix(rng, 2, 2)};
    s.b = s.a;
    const StateGameAnalysis an(s, 40);
    const Envelope cav = envelope(an.grid(), an.a_values(), EnvelopeKind::kCav);
    for (int r = 0; r < 20; ++r) {
      const Vector y{u(rng) * 5, u(rng) * 5};
      bool below_a = false, below_cav = false;
      for (std::size_t g = 0; g < an.grid().size(); ++g) {
        const double yq = y[0] * an.grid()[g][0] + y[1] * an.grid()[g][1];
        below_a |= yq < an.a_values()[g] - 1e-9;
        below_cav |= yq < cav.values()[g] - 1e-9;
      }
      EXPECT_EQ(below_a, below_cav);
      EXPECT_EQ(individually_rational_p1(y, an).ok, !below_a);
    }
  }
}

TEST(GammaPayoffs, PointMassAndUniformAndResummation) {
  const StateMatrices s = two_state_example();
  const auto [pa, pb] = gamma_payoffs(Vector{0, 0, 0, 1}, s);
  EXPECT_EQ(pa, (Vector{0, 1}));
  EXPECT_EQ(pb, (Vector{0, 1}));
  const auto [ua, ub] = gamma_payoffs(Vector{0.25, 0.25, 0.25, 0.25}, s);
  EXPECT_NEAR(ua[0], 0.25, 1e-15);
  EXPECT_NEAR(ub[0], 0.5, 1e-15);
  std::mt19937_64 rng(2);
  const Vector g = oracle::random_simplex_point(4, rng);
  const auto [ga, gb] = gamma_payoffs(g, s);
  for (std::size_t k = 0; k < 2; ++k) {
    double sa = 0, sb = 0;
    for (std::size_t c = 4; c-- > 0;) {
      sa += g[c] * s.a[k][c / 2][c % 2];
      sb += g[c] * s.b[k][c / 2][c % 2];
    }
    EXPECT_NEAR(ga[k], sa, 1e-14);
    EXPECT_NEAR(gb[k], sb, 1e-14);
  }
}

TEST(Approachability, DominatingTarget) {
  const StateMatrices s = two_state_example();
  const auto r = approachability_punish(Vector{1, 1}, s,
                                        [](std::size_t, const Vector&) { return Vector{0.5, 0.5}; },
                                        1, 7);
  EXPECT_LE(r.average[0], 1.0);
  EXPECT_LE(r.average[1], 1.0);
  EXPECT_EQ(r.distance, 0.0);
}

TEST(Approachability, SingleStateHeldToValue) {
  StateMatrices s;
  s.a = {{{3, -1}, {-2, 2}}};
  s.b = s.a;
  const double v = game_value(s.a[0]).value;
  const std::size_t T = 10000;
  // Player one best-responds to the running average each stage.
  const auto r = approachability_punish(
      Vector{v}, s, [](std::size_t t, const Vector&) { return t % 2 ? Vector{1, 0} : Vector{0, 1}; },
      T, 1);
  EXPECT_LE(r.average[0], v + 5.0 * 5.0 / std::sqrt(static_cast<double>(T)));
}

TEST(Approachability, ViolatingTargetIsExceeded) {
  const StateMatrices s = two_state_example();
  const Vector q{0.5, 0.5};
  const Vector sigma = game_value(s.a_mix(q)).row_strategy;
  const double aq = a_star(s, q);
  const Vector y{aq - 0.1, aq - 0.1};
  const auto r = approachability_punish(
      y, s, [&](std::size_t, const Vector&) { return sigma; }, 20000, 4);
  EXPECT_GT(q[0] * r.average[0] + q[1] * r.average[1], q[0] * y[0] + q[1] * y[1]);
}

TEST(Nash, PrisonersDilemma) {
  const NashResult r = nash_bimatrix({{3, 0}, {5, 1}}, {{3, 5}, {0, 1}});
  ASSERT_EQ(r.equilibria.size(), 1u);
  EXPECT_EQ(r.equilibria[0].row, (Vector{0, 1}));
  EXPECT_EQ(r.equilibria[0].col, (Vector{0, 1}));
}

TEST(Nash, MatchingPennies) {
  const NashResult r = nash_bimatrix({{1, -1}, {-1, 1}}, {{-1, 1}, {1, -1}});
  ASSERT_EQ(r.equilibria.size(), 1u);
  EXPECT_NEAR(r.equilibria[0].row[0], 0.5, 1e-12);
  EXPECT_NEAR(r.equilibria[0].col[0], 0.5, 1e-12);
}

TEST(Nash, CoordinationHasThree) {
  const NashResult r = nash_bimatrix({{1, 0}, {0, 1}}, {{1, 0}, {0, 1}});
  EXPECT_EQ(r.equilibria.size(), 3u);
  EXPECT_FALSE(r.degenerate);
}

TEST(Nash, RejectsLargeGames) {
  const Matrix m(5, Vector(2, 0.0));
  EXPECT_THROW(nash_bimatrix(m, m), InvalidInput);
}
