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

#include "mro/best_response.hpp"
#include "mro/cyber_env.hpp"
#include "mro/decision_problem.hpp"
#include "mro/evaluation.hpp"
#include "test_util.hpp"

namespace mro::cyber {
namespace {

// Hosts 0 -> 1, host 1 high-value, exploits always succeed.
NetworkTopology chain2() {
   NetworkTopology t;
   t.host_count = 2;
   t.subnet_of = {0, 1};
   t.edges = {{0, 1}};
   t.high_value = {1};
   t.exploit_success_prob = {1.0, 1.0};
   return t;
}

CyberParams params(std::size_t horizon) {
   CyberParams p;
   p.horizon = horizon;
   return p;
}

struct Played {
   double blue_return = 0.0;
   std::size_t final_state = 0;
};

// Plays fixed action sequences through a deterministic game.
Played play(const CyberGame& cg, const std::vector< std::size_t >& blue, const std::vector< std::size_t >& red) {
   Played out;
   for(std::size_t t = 0; t < blue.size(); ++t) {
      const auto outs = cg.game().outcomes(out.final_state, blue[t], red[t]);
      EXPECT_EQ(outs.size(), 1u);
      out.blue_return += outs[0].reward;
      out.final_state = outs[0].next;
   }
   return out;
}

constexpr std::size_t B(BlueVerb v, std::size_t h) { return blue_action(v, h); }
constexpr std::size_t R(RedVerb v, std::size_t h) { return red_action(v, h); }

TEST(CyberDynamics, UndefendedImpactCostsPenaltyPerStep) {
   const auto cg = build_game(chain2(), params(4));
   const auto r = play(cg, {kSleep, kSleep, kSleep, kSleep},
                       {R(RedVerb::kExploit, 1), R(RedVerb::kEscalate, 1), R(RedVerb::kImpact, 1), R(RedVerb::kImpact, 1)});
   EXPECT_DOUBLE_EQ(r.blue_return, -20.0);
   EXPECT_TRUE(cg.is_terminal(r.final_state));
   EXPECT_EQ(cg.config_of(r.final_state).level[1], Level::kRoot);
}

TEST(CyberDynamics, RestoreBeatsSameStepEscalation) {
   const auto cg = build_game(chain2(), params(3));
   const auto r = play(cg, {kSleep, B(BlueVerb::kRestore, 1), kSleep},
                       {R(RedVerb::kExploit, 1), R(RedVerb::kEscalate, 1), R(RedVerb::kImpact, 1)});
   EXPECT_DOUBLE_EQ(r.blue_return, -1.0);
   EXPECT_EQ(cg.config_of(r.final_state).level[1], Level::kClean);
}

TEST(CyberDynamics, SameStepEscalationBeatsRemove) {
   const auto cg = build_game(chain2(), params(3));
   const auto r = play(cg, {kSleep, B(BlueVerb::kRemove, 1), kSleep},
                       {R(RedVerb::kExploit, 1), R(RedVerb::kEscalate, 1), R(RedVerb::kImpact, 1)});
   EXPECT_DOUBLE_EQ(r.blue_return, -10.0);
   const auto q = play(cg, {kSleep, B(BlueVerb::kRemove, 1), kSleep},
                       {R(RedVerb::kExploit, 1), kSleep, R(RedVerb::kEscalate, 1)});
   EXPECT_DOUBLE_EQ(q.blue_return, 0.0);
   EXPECT_EQ(cg.config_of(q.final_state).level[1], Level::kClean);
}

TEST(CyberDynamics, DecoyAbsorbsOneExploit) {
   const auto cg = build_game(chain2(), params(3));
   // The burned decoy cannot be re-armed in the same step, so the next exploit lands.
   const auto r = play(cg, {B(BlueVerb::kDecoy, 1), B(BlueVerb::kDecoy, 1), kSleep},
                       {R(RedVerb::kScan, 1), R(RedVerb::kExploit, 1), R(RedVerb::kExploit, 1)});
   EXPECT_DOUBLE_EQ(r.blue_return, 1.0);
   const auto c = cg.config_of(r.final_state);
   EXPECT_EQ(c.level[1], Level::kUser);
   EXPECT_FALSE(c.decoy[1]);
}

TEST(CyberDynamics, ExploitNeedsReachability) {
   const auto cg = build_game(chain2(), params(2));
   // Restoring the entry host cuts the only path into host 1.
   const auto r = play(cg, {B(BlueVerb::kRestore, 0), kSleep}, {kSleep, R(RedVerb::kExploit, 1)});
   EXPECT_DOUBLE_EQ(r.blue_return, -1.0);
   EXPECT_EQ(cg.config_of(r.final_state).level[1], Level::kClean);
}

TEST(CyberDynamics, ImpactOnlyOnHighValueRoot) {
   auto t = chain2();
   t.high_value = {0};
   const auto cg = build_game(t, params(3));
   const auto r = play(cg, {kSleep, kSleep, kSleep},
                       {R(RedVerb::kExploit, 1), R(RedVerb::kEscalate, 1), R(RedVerb::kImpact, 1)});
   EXPECT_DOUBLE_EQ(r.blue_return, 0.0);
}

TEST(CyberDynamics, StochasticExploitSplitsMass) {
   auto t = chain2();
   t.exploit_success_prob = {1.0, 0.3};
   const auto cg = build_game(t, params(2));
   const auto outs = cg.game().outcomes(0, kSleep, R(RedVerb::kExploit, 1));
   ASSERT_EQ(outs.size(), 2u);
   double success = 0.0;
   for(const auto& o : outs)
      if(cg.config_of(o.next).level[1] == Level::kUser) success = o.probability;
   EXPECT_NEAR(success, 0.3, 1e-15);
}

TEST(CyberGame, Structure) {
   std::size_t tiny_states = 0;
   for(const char* preset : {"tiny", "small"}) {
      const auto cg = build_game(default_topology(preset), default_params(preset));
      EXPECT_LE(cg.state_count(), cg.params().state_cap);
      if(tiny_states) {
         EXPECT_GT(cg.state_count(), tiny_states);
      }
      tiny_states = cg.state_count();
      const auto& g = cg.game();
      const std::size_t na = action_count(cg.topology().host_count);
      EXPECT_EQ(g.action_count(Player::kBlue), na);
      EXPECT_EQ(g.action_count(Player::kRed), na);
      EXPECT_EQ(cg.step_of(0), 0u);
      const auto start = cg.config_of(0);
      EXPECT_NE(start.level[cg.topology().red_entry_host], Level::kClean);
      for(std::size_t s = 0; s < g.state_count(); ++s) {
         EXPECT_EQ(cg.index_of(cg.step_of(s), cg.config_of(s)), s);
         for(std::size_t b = 0; b < na; ++b)
            for(std::size_t r = 0; r < na; ++r) {
               double sum = 0.0;
               for(const auto& o : g.outcomes(s, b, r)) {
                  sum += o.probability;
                  if(!cg.is_terminal(s)) EXPECT_EQ(cg.step_of(o.next), cg.step_of(s) + 1);
                  else EXPECT_EQ(o.reward, 0.0);
               }
               EXPECT_NEAR(sum, 1.0, 1e-12);
            }
      }
   }
}

TEST(CyberGame, ActionNamesAndCounts) {
   EXPECT_EQ(action_count(3), 13u);
   EXPECT_EQ(action_name(Player::kBlue, kSleep), "sleep");
   EXPECT_EQ(action_name(Player::kRed, red_action(RedVerb::kExploit, 1)), "exploit(1)");
   EXPECT_EQ(action_name(Player::kBlue, blue_action(BlueVerb::kDecoy, 2)), "decoy(2)");
}

TEST(CyberGame, Validation) {
   auto t = chain2();
   t.red_entry_host = 5;
   EXPECT_THROW(build_game(t, params(2)), Error);
   t = chain2();
   t.high_value.clear();
   EXPECT_THROW(build_game(t, params(2)), Error);
   t = chain2();
   t.exploit_success_prob[1] = 0.0;
   EXPECT_THROW(build_game(t, params(2)), Error);
   t = chain2();
   t.edges.push_back({0, 9});
   EXPECT_THROW(build_game(t, params(2)), Error);
   auto p = default_params("small");
   p.state_cap = 100;
   EXPECT_THROW(build_game(default_topology("small"), p), InvalidArgument);
   EXPECT_THROW(default_topology("huge"), InvalidArgument);
}

TabularPolicy sleep_policy(const CyberGame& cg, Player p) {
   const std::vector< std::size_t > choice(cg.state_count(), kSleep);
   return TabularPolicy::deterministic(p, action_count(cg.topology().host_count), choice);
}

double best_response_value(const CyberGame& cg, Player responder, const TabularPolicy& opponent_policy) {
   const std::vector< const TabularPolicy* > ptrs{&opponent_policy};
   const auto br = exact_best_response(
      induce_decision_problem(cg.game(), Mixture(opponent(responder), {1.0}), ptrs, responder));
   return br.value_function.values[0];
}

// With a scripted open-loop Red and deterministic dynamics, the best closed-loop
// response equals the best open-loop action sequence.
TEST(CyberOracle, ValueIterationMatchesOpenLoopEnumeration) {
   auto t = default_topology("tiny");
   t.exploit_success_prob = {1.0, 1.0, 1.0};
   const std::size_t h = 3;
   const auto cg = build_game(t, params(h));
   const std::size_t na = action_count(3);
   Rng rng(5);
   for(int trial = 0; trial < 4; ++trial) {
      std::vector< std::size_t > script(h);
      for(auto& a : script) a = rng.below(na);
      if(trial == 0) script = {R(RedVerb::kExploit, 1), R(RedVerb::kExploit, 2), R(RedVerb::kEscalate, 2)};
      std::vector< std::size_t > choice(cg.state_count());
      for(std::size_t s = 0; s < cg.state_count(); ++s) choice[s] = cg.is_terminal(s) ? kSleep : script[cg.step_of(s)];
      const auto red = TabularPolicy::deterministic(Player::kRed, na, choice);

      double best = -1e300;
      std::vector< std::size_t > seq(h, 0);
      for(std::size_t code = 0; code < na * na * na; ++code) {
         seq = {code % na, (code / na) % na, code / (na * na)};
         best = std::max(best, play(cg, seq, script).blue_return);
      }
      EXPECT_NEAR(best_response_value(cg, Player::kBlue, red), best, 1e-9);
   }
}

TEST(CyberOracle, MonotoneThreat) {
   const auto cg = build_game(default_topology("tiny"), default_params("tiny"));
   const double v = -best_response_value(cg, Player::kRed, sleep_policy(cg, Player::kBlue));
   EXPECT_LT(v, 0.0);
   // Three exploits/escalations reach root on host 2 by step 4 at the earliest.
   EXPECT_GT(v, -10.0 * (default_params("tiny").horizon - 3));

   // No path into the high-value host: nothing to lose.
   auto t = default_topology("tiny");
   t.edges = {{0, 1}};
   const auto cut = build_game(t, params(6));
   EXPECT_LE(-best_response_value(cut, Player::kRed, sleep_policy(cut, Player::kBlue)), 0.0);
   EXPECT_NEAR(-best_response_value(cut, Player::kRed, sleep_policy(cut, Player::kBlue)), 0.0, 1e-12);
}

TEST(CyberOracle, ContainmentBeatsSleeping) {
   const auto cg = build_game(default_topology("tiny"), params(8));
   const std::size_t na = action_count(3);
   Rng rng(6);
   for(int t = 0; t < 5; ++t) {
      const auto red = testing::random_policy(rng, Player::kRed, cg.state_count(), na);
      const double br = best_response_value(cg, Player::kBlue, red);
      const double sleep = evaluate_exact(cg.game(), sleep_policy(cg, Player::kBlue), red).mean_gain_blue;
      EXPECT_GE(br, sleep - 1e-9);
   }
}

TEST(CyberGame, FalseNegativeObserver) {
   const auto cg = build_game(chain2(), params(3));
   Rng rng(1);
   const auto never = cg.false_negative_observer(0.0);
   for(std::size_t s = 0; s < cg.state_count(); ++s) EXPECT_EQ(never(s, rng), s);
   const auto always = cg.false_negative_observer(1.0);
   for(std::size_t s = 0; s < cg.state_count(); ++s) {
      const auto o = always(s, rng);
      EXPECT_EQ(cg.step_of(o), cg.step_of(s));
   }
}

TEST(MatrixPresets, OneStepGameMatchesMatrix) {
   const auto a = rock_paper_scissors();
   const auto g = one_step_matrix_game(a);
   for(std::size_t i = 0; i < 3; ++i)
      for(std::size_t j = 0; j < 3; ++j) {
         const std::vector< std::size_t > ci{i}, cj{j};
         EXPECT_EQ(evaluate_exact(g, TabularPolicy::deterministic(Player::kBlue, 3, ci),
                                  TabularPolicy::deterministic(Player::kRed, 3, cj))
                      .mean_gain_blue,
                   a(static_cast< Eigen::Index >(i), static_cast< Eigen::Index >(j)));
      }
   EXPECT_EQ(matrix_preset("matching_pennies"), matching_pennies());
   EXPECT_THROW(matrix_preset("chess"), Error);
}

}  // namespace
}  // namespace mro::cyber
