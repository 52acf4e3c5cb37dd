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

#ifndef MRO_Q_LEARNING_HPP
#define MRO_Q_LEARNING_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "mro/best_response.hpp"
#include "mro/evaluation.hpp"
#include "mro/markov_game.hpp"
#include "mro/policy.hpp"
#include "mro/shaping.hpp"

namespace mro {

struct ExplorationSchedule {
   double start = 1.0;
   double end = 0.05;
   // Fraction of the step budget over which epsilon anneals linearly.
   double anneal_fraction = 0.8;

   double at(std::size_t step, std::size_t budget) const {
      const double horizon = anneal_fraction * static_cast< double >(budget);
      if(horizon <= 0.0) return end;
      const double frac = std::min(1.0, static_cast< double >(step) / horizon);
      return start + (end - start) * frac;
   }
};

// alpha = 1 / (1 + visits(s, a))^exponent
struct LearningRateSchedule {
   double exponent = 0.6;
   double at(std::size_t visits) const { return 1.0 / std::pow(1.0 + static_cast< double >(visits), exponent); }
};

struct QLearningConfig {
   std::size_t step_budget = 20'000;
   LearningRateSchedule learning_rate{};
   ExplorationSchedule exploration{};
   std::size_t checkpoints = 20;
   Evaluator checkpoint_evaluator = Evaluator::monte_carlo(100, 0);
   // Episode cap for discounted-infinite games.
   std::size_t max_episode_length = 200;
   // Preference given to a warm-start policy's chosen action.
   double init_preference = 1e-3;
   std::uint64_t seed = 0;
   ShapingConfig shaping{};

   void validate() const {
      if(step_budget == 0) throw InvalidArgument("q-learning step budget must be >= 1");
      if(checkpoints == 0) throw InvalidArgument("q-learning needs at least one checkpoint");
      shaping.validate();
   }
};

struct CurvePoint {
   std::size_t step;
   double greedy_gain;
   bool operator==(const CurvePoint&) const = default;
};

struct QLearningInit {
   const TabularPolicy* policy = nullptr;
   const ValueFunctionTable* values = nullptr;
};

// Maps a true state to the state index the learner observes.
using ObservationModel = std::function< std::size_t(std::size_t state, Rng& rng) >;

struct QLearningResult {
   TabularPolicy policy;
   ValueFunctionTable value_function;  // max_a Q(s, a), learner's perspective
   std::vector< CurvePoint > learning_curve;
   std::size_t best_checkpoint = 0;
   std::vector< double > q;
};

/// Tabular Q-learning against an opponent mixture with per-episode policy
/// sampling. Rewards pass through potential-based shaping when enabled; the
/// potential of the post-terminal state is taken as zero. The greedy policy is
/// evaluated at each checkpoint and the best one is returned.
inline QLearningResult q_learning_response(const MarkovGame& game, Player player, const Mixture& opponent_mixture,
                                           std::span< const TabularPolicy* const > opponent_policies,
                                           const QLearningConfig& cfg, QLearningInit init = {},
                                           std::span< const double > potential = {},
                                           const ObservationModel& observe = {}, PolicyMetadata md = {}) {
   cfg.validate();
   if(opponent_policies.empty()) throw InvalidArgument("empty opponent mixture");
   if(opponent_mixture.size() != opponent_policies.size())
      throw DimensionMismatch("mixture/policy length mismatch", 0, opponent_policies.size(), opponent_mixture.size());
   const std::size_t n = game.state_count();
   const std::size_t na = game.action_count(player);
   const bool shaped = cfg.shaping.active();
   if(shaped && potential.size() != n) throw DimensionMismatch("shaping potential length", 0, n, potential.size());
   if(init.policy) {
      if(init.policy->state_count() != n || init.policy->action_count() != na)
         throw DimensionMismatch("warm-start policy shape", 0, n * na,
                                 init.policy->state_count() * init.policy->action_count());
   }
   if(init.values && init.values->size() != n)
      throw DimensionMismatch("warm-start value table length", 0, n, init.values->size());

   std::vector< double > q(n * na, 0.0);
   if(init.policy) {
      for(std::size_t s = 0; s < n; ++s) {
         const double base = init.values ? init.values->values[s] : 0.0;
         const auto row = init.policy->row(s);
         const auto best = static_cast< std::size_t >(std::max_element(row.begin(), row.end()) - row.begin());
         for(std::size_t a = 0; a < na; ++a) q[s * na + a] = base + (a == best ? cfg.init_preference : 0.0);
      }
   }
   std::vector< std::size_t > visits(n * na, 0);

   const bool finite = game.horizon().is_finite();
   const std::size_t episode_length = finite ? game.horizon().steps() : cfg.max_episode_length;
   const double gamma = game.discount();

   auto greedy = [&](std::size_t s) {
      std::size_t best = 0;
      for(std::size_t a = 1; a < na; ++a)
         if(q[s * na + a] > q[s * na + best]) best = a;
      return best;
   };
   auto max_q = [&](std::size_t s) {
      return *std::max_element(q.begin() + static_cast< std::ptrdiff_t >(s * na),
                               q.begin() + static_cast< std::ptrdiff_t >((s + 1) * na));
   };
   auto snapshot = [&] {
      std::vector< std::size_t > choice(n);
      for(std::size_t s = 0; s < n; ++s) choice[s] = greedy(s);
      PolicyMetadata m = md;
      m.shaped = shaped;
      return TabularPolicy::deterministic(player, na, choice, std::move(m));
   };

   Rng rng(derive_seed(cfg.seed, hash_string("q-learning")));
   const std::size_t interval = std::max< std::size_t >(1, cfg.step_budget / cfg.checkpoints);

   std::vector< CurvePoint > curve;
   std::optional< TabularPolicy > best_policy;
   std::vector< double > best_q;
   double best_gain = -std::numeric_limits< double >::infinity();
   std::size_t best_index = 0;

   auto checkpoint = [&](std::size_t step) {
      auto policy = snapshot();
      Evaluator ev = cfg.checkpoint_evaluator;
      ev.base_seed = derive_seed(cfg.seed, hash_string("checkpoint"), step);
      const double gain = gain_against(game, ev, policy, opponent_mixture, opponent_policies).gain;
      curve.push_back({step, gain});
      if(gain > best_gain) {
         best_gain = gain;
         best_policy = std::move(policy);
         best_q = q;
         best_index = curve.size() - 1;
      }
   };

   std::size_t step = 0;
   while(step < cfg.step_budget) {
      const auto& opp_policy = *opponent_policies[rng.categorical(opponent_mixture.weights())];
      std::size_t s = rng.categorical(game.initial_distribution());
      std::size_t obs = observe ? observe(s, rng) : s;
      for(std::size_t t = 0; t < episode_length && step < cfg.step_budget; ++t) {
         const double eps = cfg.exploration.at(step, cfg.step_budget);
         const std::size_t a = rng.uniform() < eps ? rng.below(na) : greedy(obs);
         const std::size_t b = rng.categorical(opp_policy.row(s));
         const auto outs = player == Player::kBlue ? game.outcomes(s, a, b) : game.outcomes(s, b, a);
         const auto& o = outs[sample_outcome(rng, outs)];
         const bool terminal = finite && t + 1 == episode_length;
         const std::size_t next_obs = observe ? observe(o.next, rng) : o.next;

         double r = signed_gain(player, o.reward);
         if(shaped) {
            const double phi_next = terminal ? 0.0 : potential[next_obs];
            r += cfg.shaping.tau * (cfg.shaping.gamma_phi * phi_next - potential[obs]);
         }
         const double target = r + (terminal ? 0.0 : gamma * max_q(next_obs));
         auto& cell = q[obs * na + a];
         cell += cfg.learning_rate.at(visits[obs * na + a]++) * (target - cell);

         s = o.next;
         obs = next_obs;
         ++step;
         if(step % interval == 0 || step == cfg.step_budget) checkpoint(step);
      }
   }

   ValueFunctionTable vf{std::vector< double >(n), {md.oracle, md.iteration}};
   for(std::size_t s = 0; s < n; ++s) {
      vf.values[s] = *std::max_element(best_q.begin() + static_cast< std::ptrdiff_t >(s * na),
                                       best_q.begin() + static_cast< std::ptrdiff_t >((s + 1) * na));
   }
   return {std::move(*best_policy), std::move(vf), std::move(curve), best_index, std::move(best_q)};
}

inline QLearningResult q_learning_response(const MarkovGame& game, Player player, const Mixture& opponent_mixture,
                                           const std::vector< TabularPolicy >& opponent_policies,
                                           const QLearningConfig& cfg, QLearningInit init = {},
                                           std::span< const double > potential = {},
                                           const ObservationModel& observe = {}, PolicyMetadata md = {}) {
   std::vector< const TabularPolicy* > ptrs;
   for(const auto& p : opponent_policies) ptrs.push_back(&p);
   return q_learning_response(game, player, opponent_mixture, ptrs, cfg, init, potential, observe, std::move(md));
}

}  // namespace mro

#endif  // MRO_Q_LEARNING_HPP
