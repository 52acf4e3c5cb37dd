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

#ifndef MRO_DECISION_PROBLEM_HPP
#define MRO_DECISION_PROBLEM_HPP

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "mro/core.hpp"
#include "mro/markov_game.hpp"
#include "mro/policy.hpp"

namespace mro {

/// Single-player MDP. Rewards are from `player`'s perspective and are the
/// expected reward conditioned on (s, a, s').
class DecisionProblem {
  public:
   struct Entry {
      std::size_t state;
      std::size_t action;
      std::size_t next;
      double probability;
      double reward;
   };

   DecisionProblem(Player player, std::size_t state_count, std::size_t action_count, std::vector< Entry > entries,
                   double discount, Horizon horizon, std::vector< double > initial)
       : player_(player),
         state_count_(state_count),
         action_count_(action_count),
         discount_(discount),
         horizon_(horizon),
         initial_(std::move(initial))
   {
      if(state_count_ == 0 || action_count_ == 0) throw InvalidArgument("decision problem must be nonempty");
      if(!(discount_ > 0.0 && discount_ <= 1.0)) throw InvalidArgument("discount must lie in (0, 1]");
      if(!horizon_.is_finite() && discount_ >= 1.0)
         throw UnsupportedConfiguration("discounted-infinite horizon requires discount < 1");
      if(initial_.size() != state_count_)
         throw DimensionMismatch("initial distribution length", 0, state_count_, initial_.size());
      std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
         if(a.state != b.state) return a.state < b.state;
         if(a.action != b.action) return a.action < b.action;
         return a.next < b.next;
      });
      offsets_.assign(state_count_ * action_count_ + 1, 0);
      for(const auto& e : entries) {
         if(e.state >= state_count_ || e.next >= state_count_)
            throw DimensionMismatch("decision problem state out of range", e.state, state_count_, e.next);
         if(e.action >= action_count_)
            throw DimensionMismatch("decision problem action out of range", e.state, action_count_, e.action);
         ++offsets_[e.state * action_count_ + e.action + 1];
         outcomes_.push_back({e.next, e.probability, e.reward});
      }
      for(std::size_t i = 1; i < offsets_.size(); ++i) offsets_[i] += offsets_[i - 1];
      for(std::size_t j = 0; j + 1 < offsets_.size(); ++j) {
         double sum = 0.0;
         for(auto k = offsets_[j]; k < offsets_[j + 1]; ++k) sum += outcomes_[k].probability;
         if(std::abs(sum - 1.0) > 1e-9)
            throw InvalidArgument("decision problem row " + std::to_string(j) + " sums to " + std::to_string(sum));
      }
   }

   Player player() const { return player_; }
   std::size_t state_count() const { return state_count_; }
   std::size_t action_count() const { return action_count_; }
   // Discount of the objective an exact solver optimizes.
   double discount() const { return discount_; }
   const Horizon& horizon() const { return horizon_; }
   std::span< const double > initial_distribution() const { return initial_; }

   std::span< const Outcome > outcomes(std::size_t s, std::size_t a) const {
      const auto j = s * action_count_ + a;
      return {outcomes_.data() + offsets_[j], offsets_[j + 1] - offsets_[j]};
   }

  private:
   Player player_;
   std::size_t state_count_;
   std::size_t action_count_;
   double discount_;
   Horizon horizon_;
   std::vector< double > initial_;
   std::vector< std::size_t > offsets_;
   std::vector< Outcome > outcomes_;
};

/// Opponent action distribution at state s: sum_k weight_k * pi_k(s).
inline std::vector< double > folded_opponent_row(const Mixture& mixture,
                                                 std::span< const TabularPolicy* const > policies, std::size_t s) {
   std::vector< double > row(policies.front()->action_count(), 0.0);
   for(std::size_t k = 0; k < policies.size(); ++k) {
      if(mixture[k] == 0.0) continue;
      auto pk = policies[k]->row(s);
      for(std::size_t a = 0; a < row.size(); ++a) row[a] += mixture[k] * pk[a];
   }
   return row;
}

/// Builds the decision problem faced by `player` when the opponent plays the
/// behavioral fold of `opponent_mixture`. The fold coincides with
/// per-episode policy sampling for singleton mixtures and one-step games;
/// otherwise it is an approximation.
inline DecisionProblem induce_decision_problem(const MarkovGame& game, const Mixture& opponent_mixture,
                                               std::span< const TabularPolicy* const > opponent_policies,
                                               Player player) {
   if(opponent_policies.empty()) throw InvalidArgument("empty opponent mixture");
   if(opponent_mixture.size() != opponent_policies.size())
      throw DimensionMismatch("mixture/policy length mismatch", 0, opponent_policies.size(), opponent_mixture.size());
   const Player opp = opponent(player);
   for(std::size_t k = 0; k < opponent_policies.size(); ++k) {
      const auto& p = *opponent_policies[k];
      if(p.player() != opp) throw InvalidArgument("opponent policy " + std::to_string(k) + " belongs to the learner");
      if(p.state_count() != game.state_count())
         throw DimensionMismatch("opponent policy state count", k, game.state_count(), p.state_count());
      if(p.action_count() != game.action_count(opp))
         throw DimensionMismatch("opponent policy action count", k, game.action_count(opp), p.action_count());
   }

   const std::size_t n = game.state_count();
   const std::size_t own_actions = game.action_count(player);
   std::vector< DecisionProblem::Entry > entries;
   std::vector< double > mass(n, 0.0), reward_mass(n, 0.0);
   std::vector< std::size_t > touched;
   for(std::size_t s = 0; s < n; ++s) {
      const auto opp_row = folded_opponent_row(opponent_mixture, opponent_policies, s);
      for(std::size_t a = 0; a < own_actions; ++a) {
         for(std::size_t b = 0; b < opp_row.size(); ++b) {
            if(opp_row[b] == 0.0) continue;
            const auto outs = player == Player::kBlue ? game.outcomes(s, a, b) : game.outcomes(s, b, a);
            for(const auto& o : outs) {
               const double m = opp_row[b] * o.probability;
               if(m == 0.0) continue;
               if(mass[o.next] == 0.0) touched.push_back(o.next);
               mass[o.next] += m;
               reward_mass[o.next] += m * signed_gain(player, o.reward);
            }
         }
         std::sort(touched.begin(), touched.end());
         for(auto t : touched) {
            entries.push_back({s, a, t, mass[t], reward_mass[t] / mass[t]});
            mass[t] = 0.0;
            reward_mass[t] = 0.0;
         }
         touched.clear();
      }
   }
   return DecisionProblem(player, n, own_actions, std::move(entries), game.evaluation_discount(), game.horizon(),
                          {game.initial_distribution().begin(), game.initial_distribution().end()});
}

inline DecisionProblem induce_decision_problem(const MarkovGame& game, const Mixture& opponent_mixture,
                                               const std::vector< TabularPolicy >& opponent_policies,
                                               Player player) {
   std::vector< const TabularPolicy* > ptrs;
   for(const auto& p : opponent_policies) ptrs.push_back(&p);
   return induce_decision_problem(game, opponent_mixture, ptrs, player);
}

}  // namespace mro

#endif  // MRO_DECISION_PROBLEM_HPP
