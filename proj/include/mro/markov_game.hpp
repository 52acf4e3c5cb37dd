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

#ifndef MRO_MARKOV_GAME_HPP
#define MRO_MARKOV_GAME_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <iterator>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "mro/core.hpp"

namespace mro {

class Horizon {
  public:
   static Horizon finite(std::size_t steps) { return Horizon(steps); }
   static Horizon discounted_infinite() { return Horizon(std::nullopt); }

   bool is_finite() const { return steps_.has_value(); }
   std::size_t steps() const { return steps_.value(); }

   bool operator==(const Horizon&) const = default;

  private:
   explicit Horizon(std::optional< std::size_t > steps) : steps_(steps) {}
   std::optional< std::size_t > steps_;
};

// One successor of a (state, joint action) pair; reward is Blue's.
struct Outcome {
   std::size_t next;
   double probability;
   double reward;
};

/// Finite two-player zero-sum Markov game with sparse transitions.
///
/// Transitions and rewards are stored per (state, blue action, red action) as
/// a compact successor list. Red's reward is the negation of Blue's, so only
/// Blue's reward is stored. `discount` is the learning discount; evaluation of
/// finite-horizon games is undiscounted unless `discount_evaluation` is set.
class MarkovGame {
  public:
   struct TransitionEntry {
      std::size_t state;
      std::size_t blue_action;
      std::size_t red_action;
      std::size_t next;
      double probability;
   };
   struct RewardEntry {
      std::size_t state;
      std::size_t blue_action;
      std::size_t red_action;
      std::size_t next;
      double reward;
   };

   class Builder {
     public:
      Builder(std::size_t state_count, std::size_t blue_actions, std::size_t red_actions)
          : state_count_(state_count), action_counts_{blue_actions, red_actions}
      {
      }

      Builder& transition(std::size_t s, std::size_t ab, std::size_t ar, std::size_t next, double p, double reward = 0.0) {
         transitions_.push_back({s, ab, ar, next, p});
         if(reward != 0.0) rewards_.push_back({s, ab, ar, next, reward});
         return *this;
      }
      Builder& reward(std::size_t s, std::size_t ab, std::size_t ar, std::size_t next, double r) {
         rewards_.push_back({s, ab, ar, next, r});
         return *this;
      }
      Builder& discount(double d) {
         discount_ = d;
         return *this;
      }
      Builder& horizon(Horizon h) {
         horizon_ = h;
         return *this;
      }
      Builder& discount_evaluation(bool on) {
         discount_evaluation_ = on;
         return *this;
      }
      Builder& initial(std::vector< double > dist) {
         initial_ = std::move(dist);
         return *this;
      }

      MarkovGame build() && {
         if(initial_.empty()) {
            initial_.assign(state_count_, 0.0);
            if(state_count_ > 0) initial_[0] = 1.0;
         }
         return MarkovGame(
            state_count_, action_counts_, transitions_, rewards_, discount_, horizon_, discount_evaluation_, std::move(initial_));
      }

     private:
      std::size_t state_count_;
      std::array< std::size_t, 2 > action_counts_;
      std::vector< TransitionEntry > transitions_;
      std::vector< RewardEntry > rewards_;
      double discount_ = 1.0;
      Horizon horizon_ = Horizon::finite(1);
      bool discount_evaluation_ = false;
      std::vector< double > initial_;
   };

   MarkovGame(
      std::size_t state_count,
      std::array< std::size_t, 2 > action_counts,
      std::span< const TransitionEntry > transitions,
      std::span< const RewardEntry > rewards,
      double discount,
      Horizon horizon,
      bool discount_evaluation,
      std::vector< double > initial)
       : state_count_(state_count),
         action_counts_(action_counts),
         discount_(discount),
         horizon_(horizon),
         discount_evaluation_(discount_evaluation),
         initial_(std::move(initial))
   {
      if(state_count_ == 0) throw InvalidArgument("game must have at least one state");
      if(action_counts_[0] == 0 || action_counts_[1] == 0)
         throw InvalidArgument("each player needs at least one action");
      if(!(discount_ > 0.0 && discount_ <= 1.0)) throw InvalidArgument("discount must lie in (0, 1]");
      if(!horizon_.is_finite() && discount_ >= 1.0)
         throw UnsupportedConfiguration("discounted-infinite horizon requires discount < 1");
      if(horizon_.is_finite() && horizon_.steps() == 0) throw InvalidArgument("finite horizon must be >= 1 step");
      if(initial_.size() != state_count_)
         throw DimensionMismatch("initial distribution length", 0, state_count_, initial_.size());
      if(!is_distribution(initial_)) throw InvalidArgument("initial distribution must be a probability vector");

      const std::size_t joint = state_count_ * action_counts_[0] * action_counts_[1];
      std::vector< std::size_t > counts(joint + 1, 0);
      for(const auto& t : transitions) {
         check_indices(t.state, t.blue_action, t.red_action, t.next, "transition");
         if(!(t.probability >= 0.0) || !std::isfinite(t.probability))
            throw InvalidArgument("transition probability must be finite and nonnegative");
         ++counts[joint_index(t.state, t.blue_action, t.red_action) + 1];
      }
      for(std::size_t i = 0; i < joint; ++i) counts[i + 1] += counts[i];
      offsets_ = counts;
      outcomes_.resize(transitions.size());
      std::vector< std::size_t > cursor(offsets_.begin(), offsets_.end() - 1);
      for(const auto& t : transitions) {
         auto j = joint_index(t.state, t.blue_action, t.red_action);
         outcomes_[cursor[j]++] = Outcome{t.next, t.probability, 0.0};
      }
      for(std::size_t j = 0; j < joint; ++j) {
         auto first = outcomes_.begin() + static_cast< std::ptrdiff_t >(offsets_[j]);
         auto last = outcomes_.begin() + static_cast< std::ptrdiff_t >(offsets_[j + 1]);
         std::sort(first, last, [](const Outcome& a, const Outcome& b) { return a.next < b.next; });
         double sum = 0.0;
         for(auto it = first; it != last; ++it) {
            if(it != first && std::prev(it)->next == it->next)
               throw InvalidArgument("duplicate transition entry at joint index " + std::to_string(j));
            sum += it->probability;
         }
         if(std::abs(sum - 1.0) > kProbabilityTolerance) {
            auto [s, ab, ar] = unpack(j);
            throw InvalidArgument(
               "transition row (" + std::to_string(s) + ", " + std::to_string(ab) + ", " + std::to_string(ar)
               + ") sums to " + std::to_string(sum));
         }
      }
      for(const auto& r : rewards) {
         check_indices(r.state, r.blue_action, r.red_action, r.next, "reward");
         if(!std::isfinite(r.reward)) throw InvalidArgument("rewards must be finite");
         auto j = joint_index(r.state, r.blue_action, r.red_action);
         auto row = mutable_outcomes(j);
         auto it = std::lower_bound(
            row.begin(), row.end(), r.next, [](const Outcome& o, std::size_t n) { return o.next < n; });
         if(it == row.end() || it->next != r.next)
            throw InvalidArgument("reward entry references a transition with no probability entry");
         it->reward += r.reward;
      }
      for(const auto& o : outcomes_) max_abs_reward_ = std::max(max_abs_reward_, std::abs(o.reward));
   }

   std::size_t state_count() const { return state_count_; }
   std::size_t action_count(Player p) const { return action_counts_[static_cast< std::size_t >(p)]; }
   double discount() const { return discount_; }
   const Horizon& horizon() const { return horizon_; }
   bool discount_evaluation() const { return discount_evaluation_; }
   std::span< const double > initial_distribution() const { return initial_; }
   double max_abs_reward() const { return max_abs_reward_; }

   // Discount applied to returns when measuring gains.
   double evaluation_discount() const {
      if(!horizon_.is_finite() || discount_evaluation_) return discount_;
      return 1.0;
   }

   std::span< const Outcome > outcomes(std::size_t s, std::size_t blue_action, std::size_t red_action) const {
      auto j = joint_index(s, blue_action, red_action);
      return {outcomes_.data() + offsets_[j], offsets_[j + 1] - offsets_[j]};
   }

   // Sparse listings in the serialization layout, ordered by (s, aB, aR, s').
   std::vector< TransitionEntry > transition_entries() const {
      std::vector< TransitionEntry > out;
      out.reserve(outcomes_.size());
      for_each_outcome([&](std::size_t s, std::size_t ab, std::size_t ar, const Outcome& o) {
         out.push_back({s, ab, ar, o.next, o.probability});
      });
      return out;
   }
   std::vector< RewardEntry > reward_entries() const {
      std::vector< RewardEntry > out;
      for_each_outcome([&](std::size_t s, std::size_t ab, std::size_t ar, const Outcome& o) {
         if(o.reward != 0.0) out.push_back({s, ab, ar, o.next, o.reward});
      });
      return out;
   }

   template < typename Fn >
   void for_each_outcome(Fn&& fn) const {
      for(std::size_t s = 0; s < state_count_; ++s)
         for(std::size_t ab = 0; ab < action_counts_[0]; ++ab)
            for(std::size_t ar = 0; ar < action_counts_[1]; ++ar)
               for(const auto& o : outcomes(s, ab, ar)) fn(s, ab, ar, o);
   }

  private:
   std::size_t joint_index(std::size_t s, std::size_t ab, std::size_t ar) const {
      return (s * action_counts_[0] + ab) * action_counts_[1] + ar;
   }
   std::tuple< std::size_t, std::size_t, std::size_t > unpack(std::size_t j) const {
      std::size_t ar = j % action_counts_[1];
      j /= action_counts_[1];
      return {j / action_counts_[0], j % action_counts_[0], ar};
   }
   std::span< Outcome > mutable_outcomes(std::size_t j) {
      return {outcomes_.data() + offsets_[j], offsets_[j + 1] - offsets_[j]};
   }
   void check_indices(std::size_t s, std::size_t ab, std::size_t ar, std::size_t next, const char* what) const {
      if(s >= state_count_) throw DimensionMismatch(std::string(what) + " state out of range", s, state_count_, s);
      if(ab >= action_counts_[0])
         throw DimensionMismatch(std::string(what) + " blue action out of range", s, action_counts_[0], ab);
      if(ar >= action_counts_[1])
         throw DimensionMismatch(std::string(what) + " red action out of range", s, action_counts_[1], ar);
      if(next >= state_count_)
         throw DimensionMismatch(std::string(what) + " successor out of range", s, state_count_, next);
   }

   std::size_t state_count_;
   std::array< std::size_t, 2 > action_counts_;
   double discount_;
   Horizon horizon_;
   bool discount_evaluation_;
   std::vector< double > initial_;
   std::vector< std::size_t > offsets_;
   std::vector< Outcome > outcomes_;
   double max_abs_reward_ = 0.0;
};

}  // namespace mro

#endif  // MRO_MARKOV_GAME_HPP
