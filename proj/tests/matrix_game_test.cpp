// Copyright 2026 The MRO Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <atomic>

#include "mro/cyber_env.hpp"
#include "mro/empirical_game.hpp"
#include "mro/io.hpp"
#include "mro/zero_sum.hpp"
#include "test_util.hpp"

namespace mro {
namespace {

using testing::random_matrix;

PayoffMatrix m(std::initializer_list< std::initializer_list< double > > rows) {
   PayoffMatrix a(static_cast< Eigen::Index >(rows.size()), static_cast< Eigen::Index >(rows.begin()->size()));
   Eigen::Index i = 0;
   for(const auto& r : rows) {
      Eigen::Index j = 0;
      for(double x : r) a(i, j++) = x;
      ++i;
   }
   return a;
}

void expect_certificates(const PayoffMatrix& a, const SolveResult& sol) {
   const Eigen::Map< const Eigen::VectorXd > x(sol.blue.weights().data(), a.rows());
   const Eigen::Map< const Eigen::VectorXd > y(sol.red.weights().data(), a.cols());
   EXPECT_GE((a.transpose() * x).minCoeff(), sol.value - 1e-9);
   EXPECT_LE((a * y).maxCoeff(), sol.value + 1e-9);
}

// Hand-solved 2x2: Blue indifference 3x + (1 - x) = 2(1 - x) gives x = 1/4;
// Red indifference 3y = y + 2(1 - y) gives y = 1/2; value 3/2.
TEST(SolveZeroSum, HandSolvedTwoByTwo) {
   const auto a = m({{3, 0}, {1, 2}});
   const auto sol = solve_zero_sum(a);
   EXPECT_NEAR(sol.value, 1.5, 1e-12);
   EXPECT_NEAR(sol.blue[0], 0.25, 1e-12);
   EXPECT_NEAR(sol.blue[1], 0.75, 1e-12);
   EXPECT_NEAR(sol.red[0], 0.5, 1e-12);
   EXPECT_NEAR(sol.red[1], 0.5, 1e-12);
}

TEST(SolveZeroSum, SaddlePoint) {
   const auto sol = solve_zero_sum(m({{2, 3}, {0, 1}}));
   EXPECT_NEAR(sol.value, 2.0, 1e-12);
   EXPECT_NEAR(sol.blue[0], 1.0, 1e-12);
   EXPECT_NEAR(sol.red[0], 1.0, 1e-12);
}

TEST(SolveZeroSum, RockPaperScissorsIsUniform) {
   const auto sol = solve_zero_sum(rock_paper_scissors());
   EXPECT_NEAR(sol.value, 0.0, 1e-12);
   for(std::size_t i = 0; i < 3; ++i) {
      EXPECT_NEAR(sol.blue[i], 1.0 / 3.0, 1e-9);
      EXPECT_NEAR(sol.red[i], 1.0 / 3.0, 1e-9);
   }
}

TEST(SolveZeroSum, NegativeAndConstantMatrices) {
   EXPECT_NEAR(solve_zero_sum(m({{-5}})).value, -5.0, 1e-12);
   const auto c = solve_zero_sum(PayoffMatrix::Constant(3, 4, -2.5));
   EXPECT_NEAR(c.value, -2.5, 1e-12);
}

TEST(SolveZeroSum, RejectsBadInput) {
   EXPECT_THROW(solve_zero_sum(PayoffMatrix(0, 0)), Error);
   auto a = m({{1, 2}, {3, 4}});
   a(0, 1) = std::numeric_limits< double >::quiet_NaN();
   EXPECT_THROW(solve_zero_sum(a), Error);
}

TEST(SolveZeroSum, DegenerateMatricesTerminate) {
   // Repeated rows and columns force degenerate pivots.
   const auto a = m({{1, 1, 0}, {1, 1, 0}, {0, 0, 1}, {0, 0, 1}});
   const auto sol = solve_zero_sum(a);
   EXPECT_NEAR(sol.value, 0.5, 1e-9);
   expect_certificates(a, sol);
}

TEST(SolveZeroSumProperty, CertificatesAndSupportIndifference) {
   Rng rng(2024);
   for(int t = 0; t < 300; ++t) {
      const auto rows = static_cast< Eigen::Index >(1 + rng.below(8));
      const auto cols = static_cast< Eigen::Index >(1 + rng.below(8));
      const auto a = random_matrix(rng, rows, cols);
      const auto sol = solve_zero_sum(a);
      expect_certificates(a, sol);
      const auto g = support_gains(a, sol.blue, sol.red);
      for(std::size_t i = 0; i < sol.blue.size(); ++i)
         if(sol.blue[i] > 0.0) {
            EXPECT_NEAR(g.blue[i], sol.value, 1e-6);
         }
      for(std::size_t j = 0; j < sol.red.size(); ++j)
         if(sol.red[j] > 0.0) {
            EXPECT_NEAR(g.red[j], -sol.value, 1e-6);
         }
   }
}

TEST(SolveZeroSumProperty, IntegerMatricesWithTies) {
   Rng rng(77);
   for(int t = 0; t < 200; ++t) {
      PayoffMatrix a(1 + static_cast< Eigen::Index >(rng.below(6)), 1 + static_cast< Eigen::Index >(rng.below(6)));
      for(Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = static_cast< double >(rng.below(3)) - 1.0;
      expect_certificates(a, solve_zero_sum(a));
   }
}

// Empirical games repeat near-identical policies: rows and columns that agree
// up to round-off. Degenerate pivots must not cycle.
TEST(SolveZeroSumProperty, NearDuplicateStrategiesTerminate) {
   Rng rng(91);
   for(int t = 0; t < 60; ++t) {
      const auto base = random_matrix(rng, 4, 4);
      const auto rows = static_cast< Eigen::Index >(8 + rng.below(30));
      const auto cols = static_cast< Eigen::Index >(8 + rng.below(30));
      PayoffMatrix a(rows, cols);
      std::vector< Eigen::Index > ri(static_cast< std::size_t >(rows)), ci(static_cast< std::size_t >(cols));
      for(auto& r : ri) r = static_cast< Eigen::Index >(rng.below(4));
      for(auto& c : ci) c = static_cast< Eigen::Index >(rng.below(4));
      for(Eigen::Index i = 0; i < rows; ++i)
         for(Eigen::Index j = 0; j < cols; ++j) {
            const double x = base(ri[static_cast< std::size_t >(i)], ci[static_cast< std::size_t >(j)]);
            a(i, j) = rng.below(2) ? x : x * (1.0 + 1e-15 * (2.0 * rng.uniform() - 1.0));
         }
      expect_certificates(a, solve_zero_sum(a));
   }
}

// A 33x38 payoff matrix from a cyber-game run that cycled before degenerate
// right-hand sides were snapped to zero.
TEST(SolveZeroSum, CyberRegistryRegression) {
   const auto a = io::matrix_from_json(io::read_json(std::filesystem::path(MRO_SOURCE_DIR) / "tests" / "data" /
                                                     "degenerate_33x38.json"));
   const auto sol = solve_zero_sum(a);
   expect_certificates(a, sol);
   EXPECT_NEAR(sol.value, 0.0, 1e-9);
}

TEST(SolveZeroSumProperty, ValueMonotoneInAddedStrategies) {
   Rng rng(5);
   for(int t = 0; t < 200; ++t) {
      const auto a = random_matrix(rng, 1 + static_cast< Eigen::Index >(rng.below(5)),
                                   1 + static_cast< Eigen::Index >(rng.below(5)));
      const double v = solve_zero_sum(a).value;
      PayoffMatrix wider(a.rows(), a.cols() + 1);
      wider << a, random_matrix(rng, a.rows(), 1);
      PayoffMatrix taller(a.rows() + 1, a.cols());
      taller << a, random_matrix(rng, 1, a.cols());
      EXPECT_LE(solve_zero_sum(wider).value, v + 1e-9);
      EXPECT_GE(solve_zero_sum(taller).value, v - 1e-9);
   }
}

TEST(SupportGains, MatchesMatrixProducts) {
   const auto a = m({{3, 0}, {1, 2}});
   const auto g = support_gains(a, Mixture(Player::kBlue, {0.5, 0.5}), Mixture(Player::kRed, {1.0, 0.0}));
   EXPECT_DOUBLE_EQ(g.blue[0], 3.0);
   EXPECT_DOUBLE_EQ(g.blue[1], 1.0);
   EXPECT_DOUBLE_EQ(g.red[0], -2.0);
   EXPECT_DOUBLE_EQ(g.red[1], -1.0);
   EXPECT_THROW(support_gains(a, Mixture(Player::kBlue, {1.0}), Mixture(Player::kRed, {1.0, 0.0})), DimensionMismatch);
}

TEST(Dominance, StrictAndWeak) {
   const auto a = m({{1, 1}, {1, 0}, {0, -1}});
   // Row 2 is strictly below row 0; row 1 only weakly.
   EXPECT_EQ(find_dominated(a, Player::kBlue, DominanceMode::kStrict), (std::vector< std::size_t >{2}));
   EXPECT_EQ(find_dominated(a, Player::kBlue, DominanceMode::kWeak), (std::vector< std::size_t >{1, 2}));
}

TEST(Dominance, IteratedStrictEliminationOrder) {
   // Column 1 is strictly worse for Red than column 0 only once row 2 is gone.
   const auto a = m({{1, 2}, {0, 3}, {-1, -1}});
   const auto r = eliminate_iteratively(a, DominanceMode::kStrict);
   ASSERT_EQ(r.order.size(), 3u);
   EXPECT_EQ(r.order[0].player, Player::kBlue);
   EXPECT_EQ(r.order[0].original_index, 2u);
   EXPECT_EQ(r.order[1].player, Player::kRed);
   EXPECT_EQ(r.order[1].original_index, 1u);
   EXPECT_EQ(r.order[2].player, Player::kBlue);
   EXPECT_EQ(r.order[2].original_index, 1u);
   EXPECT_EQ(r.blue_kept, (std::vector< std::size_t >{0}));
   EXPECT_EQ(r.red_kept, (std::vector< std::size_t >{0}));
   EXPECT_NEAR(r.payoff(0, 0), 1.0, 0.0);
}

TEST(Dominance, WeakOrderIsLowestIndexFirst) {
   const auto a = m({{1, 1}, {1, 1}, {0, 1}});
   const auto r = eliminate_iteratively(a, DominanceMode::kWeak);
   ASSERT_FALSE(r.order.empty());
   EXPECT_EQ(r.order[0].player, Player::kBlue);
   EXPECT_EQ(r.order[0].original_index, 2u);
}

TEST(Dominance, NothingToRemove) {
   const auto r = eliminate_iteratively(rock_paper_scissors(), DominanceMode::kStrict);
   EXPECT_TRUE(r.order.empty());
   EXPECT_EQ(r.payoff, rock_paper_scissors());
}

TEST(DominanceProperty, StrictEliminationPreservesValue) {
   Rng rng(31);
   for(int t = 0; t < 100; ++t) {
      auto a = random_matrix(rng, 6, 6);
      // Inject strictly dominated rows and columns.
      a.row(5) = a.row(static_cast< Eigen::Index >(rng.below(5))).array() - 0.5 - rng.uniform();
      a.col(4) = a.col(static_cast< Eigen::Index >(rng.below(4))).array() + 0.5 + rng.uniform();
      const auto r = eliminate_iteratively(a, DominanceMode::kStrict);
      EXPECT_GE(r.order.size(), 2u);
      EXPECT_NEAR(solve_zero_sum(a).value, solve_zero_sum(r.payoff).value, 1e-9);
   }
}

// ---------------------------------------------------------------------------
// Augmentation accounting

TEST(PredictedNewCells, ClosedForm) {
   EXPECT_EQ(predicted_new_cells(4, 4, 397, 397), 3192u);
   EXPECT_EQ(predicted_new_cells(1, 1, 1, 1), 3u);
   EXPECT_EQ(predicted_new_cells(1, 0, 3, 2), 2u);
   EXPECT_EQ(predicted_new_cells(0, 0, 5, 5), 0u);
}

// The shortcut count n|R| + m|B| - nm undercounts by 2nm when |B|, |R| are
// the sizes at the start of the iteration; with post-augmentation sizes it is
// exact.
TEST(PredictedNewCells, ShortcutFormDiscrepancy) {
   auto shortcut = [](std::size_t n, std::size_t m, std::size_t b, std::size_t r) { return n * r + m * b - n * m; };
   for(std::size_t n = 0; n <= 5; ++n)
      for(std::size_t mm = 0; mm <= 5; ++mm)
         for(std::size_t b : {1u, 7u, 397u})
            for(std::size_t r : {1u, 4u, 397u}) {
               EXPECT_EQ(predicted_new_cells(n, mm, b, r), shortcut(n, mm, b, r) + 2 * n * mm);
               EXPECT_EQ(predicted_new_cells(n, mm, b, r), shortcut(n, mm, b + n, r + mm));
            }
   EXPECT_EQ(shortcut(4, 4, 397, 397), 3160u);
}

TabularPolicy one_state(Player p, std::size_t action, std::size_t actions, const std::string& id) {
   PolicyMetadata md;
   md.id = id;
   const std::vector< std::size_t > choice{action};
   return TabularPolicy::deterministic(p, actions, choice, md);
}

TEST(Augment, CountsAndFillsOnlyNewCells) {
   const auto game = one_step_matrix_game(rock_paper_scissors());
   std::atomic< std::size_t > calls{0};
   CellEvaluator ev = [&](const TabularPolicy& b, const TabularPolicy& r) {
      ++calls;
      return evaluate_exact(game, b, r);
   };
   auto res = augment({}, {{one_state(Player::kBlue, 0, 3, "b0"), std::nullopt}},
                      {{one_state(Player::kRed, 0, 3, "r0"), std::nullopt}}, ev);
   EXPECT_EQ(res.new_cell_count, 1u);
   res = augment(std::move(res.game),
                 {{one_state(Player::kBlue, 1, 3, "b1"), std::nullopt}, {one_state(Player::kBlue, 2, 3, "b2"), std::nullopt}},
                 {{one_state(Player::kRed, 1, 3, "r1"), std::nullopt}}, ev);
   EXPECT_EQ(res.new_cell_count, predicted_new_cells(2, 1, 1, 1));
   EXPECT_EQ(calls.load(), 1u + predicted_new_cells(2, 1, 1, 1));
   EXPECT_EQ(res.game.payoff.rows(), 3);
   EXPECT_EQ(res.game.payoff.cols(), 2);
   for(Eigen::Index i = 0; i < 3; ++i)
      for(Eigen::Index j = 0; j < 2; ++j) EXPECT_EQ(res.game.payoff(i, j), rock_paper_scissors()(i, j));
   EXPECT_EQ(res.game.total_evaluations(), calls.load());
}

TEST(Augment, RejectsDuplicateIdsAndWrongPlayer) {
   const auto game = one_step_matrix_game(rock_paper_scissors());
   CellEvaluator ev = [&](const TabularPolicy& b, const TabularPolicy& r) { return evaluate_exact(game, b, r); };
   auto res = augment({}, {{one_state(Player::kBlue, 0, 3, "x"), std::nullopt}},
                      {{one_state(Player::kRed, 0, 3, "y"), std::nullopt}}, ev);
   EXPECT_THROW(augment(res.game, {{one_state(Player::kBlue, 1, 3, "x"), std::nullopt}}, {}, ev), InvalidArgument);
   EXPECT_THROW(augment(res.game, {{one_state(Player::kRed, 1, 3, "z"), std::nullopt}}, {}, ev), InvalidArgument);
   EXPECT_THROW(augment(res.game, {}, {}, ev), InvalidArgument);
}

}  // namespace
}  // namespace mro
