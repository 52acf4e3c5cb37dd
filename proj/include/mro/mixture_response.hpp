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

// Best response to an opponent mixture played with per-episode sampling.
//
// The behavioral fold gives the optimal response when the mixture is a single
// policy or the game lasts one step. Otherwise the opponent's identity is
// correlated across a whole episode and the folded problem can mislead. The
// response here starts from the better of the fold's answer and the best
// incumbent policy, then runs policy improvement on the true objective
//
//    G(pi) = sum_k mu_k G(pi, rho_k),
//
// switching each state to the action maximising the occupancy-weighted
// per-opponent action values. A switch is kept only if exact evaluation
// confirms a gain; when switching every state at once fails, the single most
// promising switch is tried instead.

#ifndef MRO_MIXTURE_RESPONSE_HPP
#define MRO_MIXTURE_RESPONSE_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mro/best_response.hpp"
#include "mro/decision_problem.hpp"
#include "mro/evaluation.hpp"
#include "mro/markov_game.hpp"
#include "mro/policy.hpp"

namespace mro {

/// Exact gain of `policy` against a mixture under per-episode sampling.
inline double exact_mixture_gain(const MarkovGame& game, const TabularPolicy& policy, const Mixture& opponent_mixture,
                                 std::span< const TabularPolicy* const > opponent_policies) {
   return gain_against(game, Evaluator::exact(), policy, opponent_mixture, opponent_policies).gain;
}

namespace detail {

struct MixtureScores {
   std::vector< double > score;  // [state][action], occupancy-weighted action values
   std::vector< double > value;  // mixture-weighted state values of the current policy
};

// Per-opponent occupancies and action values of the deterministic policy
// `choice`, combined over the mixture.
inline MixtureScores mixture_scores(const MarkovGame& game, Player player, std::span< const std::size_t > choice,
                                    const Mixture& mixture, std::span< const TabularPolicy* const > opponents) {
   const std::size_t n = game.state_count();
   const std::size_t na = game.action_count(player);
   const double gamma = game.evaluation_discount();
   MixtureScores out{std::vector< double >(n * na, 0.0), std::vector< double >(n, 0.0)};

   auto outcomes = [&](std::size_t s, std::size_t a, std::size_t b) {
      return player == Player::kBlue ? game.outcomes(s, a, b) : game.outcomes(s, b, a);
   };
   // Expected one-step return of own action a at s given next-state values v.
   auto q_value = [&](const TabularPolicy& opp, std::size_t s, std::size_t a, const std::vector< double >& v) {
      double acc = 0.0;
      const auto row = opp.row(s);
      for(std::size_t b = 0; b < row.size(); ++b) {
         if(row[b] == 0.0) continue;
         for(const auto& o : outcomes(s, a, b))
            acc += row[b] * o.probability * (signed_gain(player, o.reward) + gamma * v[o.next]);
      }
      return acc;
   };
   auto propagate = [&](const TabularPolicy& opp, const std::vector< double >& d) {
      std::vector< double > next(n, 0.0);
      for(std::size_t s = 0; s < n; ++s) {
         if(d[s] == 0.0) continue;
         const auto row = opp.row(s);
         for(std::size_t b = 0; b < row.size(); ++b) {
            if(row[b] == 0.0) continue;
            for(const auto& o : outcomes(s, choice[s], b)) next[o.next] += d[s] * row[b] * o.probability;
         }
      }
      return next;
   };

   for(std::size_t k = 0; k < opponents.size(); ++k) {
      const double w = mixture[k];
      if(w == 0.0) continue;
      const auto& opp = *opponents[k];
      std::vector< double > d0(game.initial_distribution().begin(), game.initial_distribution().end());

      if(game.horizon().is_finite()) {
         const std::size_t h = game.horizon().steps();
         // values[t] = value with h - t steps to go.
         std::vector< std::vector< double > > values(h + 1, std::vector< double >(n, 0.0));
         for(std::size_t t = h; t-- > 0;)
            for(std::size_t s = 0; s < n; ++s) values[t][s] = q_value(opp, s, choice[s], values[t + 1]);
         std::vector< double > d = d0;
         double discount = 1.0;
         for(std::size_t t = 0; t < h; ++t) {
            for(std::size_t s = 0; s < n; ++s) {
               if(d[s] == 0.0) continue;
               for(std::size_t a = 0; a < na; ++a)
                  out.score[s * na + a] += w * discount * d[s] * q_value(opp, s, a, values[t + 1]);
            }
            if(t + 1 < h) d = propagate(opp, d);
            discount *= gamma;
         }
         for(std::size_t s = 0; s < n; ++s) out.value[s] += w * values[0][s];
      } else {
         std::vector< std::size_t > own(choice.begin(), choice.end());
         const auto policy = TabularPolicy::deterministic(player, na, own);
         const auto chain = player == Player::kBlue ? build_joint_chain(game, policy, opp)
                                                    : build_joint_chain(game, opp, policy);
         auto v = solve_discounted(chain, gamma);
         if(player == Player::kRed)
            for(auto& x : v) x = -x;
         // Discounted occupancy: sum_t gamma^t d_t, truncated at double resolution.
         std::vector< double > occupancy(n, 0.0), d = d0;
         const std::size_t length = truncation_length(gamma);
         double discount = 1.0;
         for(std::size_t t = 0; t < length; ++t) {
            for(std::size_t s = 0; s < n; ++s) occupancy[s] += discount * d[s];
            d = propagate(opp, d);
            discount *= gamma;
         }
         for(std::size_t s = 0; s < n; ++s) {
            if(occupancy[s] == 0.0) continue;
            for(std::size_t a = 0; a < na; ++a) out.score[s * na + a] += w * occupancy[s] * q_value(opp, s, a, v);
         }
         for(std::size_t s = 0; s < n; ++s) out.value[s] += w * v[s];
      }
   }
   return out;
}

inline std::vector< std::size_t > modal_actions(const TabularPolicy& p) {
   std::vector< std::size_t > choice(p.state_count());
   for(std::size_t s = 0; s < p.state_count(); ++s) {
      const auto row = p.row(s);
      choice[s] = static_cast< std::size_t >(std::max_element(row.begin(), row.end()) - row.begin());
   }
   return choice;
}

}  // namespace detail

struct MixtureResponseOptions {
   ExactSolveOptions exact{};
   std::size_t max_rounds = 200;
   // Relative slack an action must clear to replace the current one.
   double switch_tolerance = 1e-9;
};

struct MixtureResponse {
   TabularPolicy policy;
   ValueFunctionTable value_function;
   double gain = 0.0;
   std::size_t rounds = 0;
   std::string start;  // "fold" or "incumbent:<i>"
   // True when the value table carries the shaped rewards of the fold solve.
   bool value_function_shaped = false;
};

/// Response to `opponent_mixture`. `incumbents` are the responder's existing
/// policies; the result never scores below the best of them.
inline MixtureResponse mixture_best_response(const MarkovGame& game, Player player, const Mixture& opponent_mixture,
                                             std::span< const TabularPolicy* const > opponent_policies,
                                             std::span< const TabularPolicy* const > incumbents = {},
                                             const MixtureResponseOptions& opts = {}, PolicyMetadata md = {}) {
   const auto problem = induce_decision_problem(game, opponent_mixture, opponent_policies, player);
   auto fold = exact_best_response(problem, opts.exact, md);
   md.shaped = opts.exact.shaping.active();
   const std::size_t na = game.action_count(player);
   const std::size_t n = game.state_count();

   auto gain_of = [&](const TabularPolicy& p) {
      return exact_mixture_gain(game, p, opponent_mixture, opponent_policies);
   };

   // Policy improvement from a deterministic start.
   auto improve = [&](std::vector< std::size_t > choice, double gain, std::size_t& rounds) {
      for(rounds = 0; rounds < opts.max_rounds; ++rounds) {
         const auto sc = detail::mixture_scores(game, player, choice, opponent_mixture, opponent_policies);
         std::vector< std::size_t > next = choice;
         std::size_t best_state = n;
         double best_delta = 0.0;
         for(std::size_t s = 0; s < n; ++s) {
            const double* row = sc.score.data() + s * na;
            const std::size_t a = static_cast< std::size_t >(std::max_element(row, row + na) - row);
            const double current = row[choice[s]];
            const double delta = row[a] - current;
            if(delta > opts.switch_tolerance * std::max(1.0, std::abs(current))) {
               next[s] = a;
               if(delta > best_delta) {
                  best_delta = delta;
                  best_state = s;
               }
            }
         }
         if(best_state == n) break;
         const auto accept = [&](const std::vector< std::size_t >& cand) {
            const double g = gain_of(TabularPolicy::deterministic(player, na, cand));
            if(g > gain + 1e-12 * std::max(1.0, std::abs(gain))) {
               choice = cand;
               gain = g;
               return true;
            }
            return false;
         };
         if(accept(next)) continue;
         std::vector< std::size_t > single = choice;
         single[best_state] = next[best_state];
         if(!accept(single)) break;
      }
      return std::make_pair(std::move(choice), gain);
   };

   std::size_t rounds = 0;
   auto [choice, gain] = improve(detail::modal_actions(fold.policy), gain_of(fold.policy), rounds);
   std::string start = "fold";

   std::optional< std::size_t > best_incumbent;
   double incumbent_gain = 0.0;
   for(std::size_t i = 0; i < incumbents.size(); ++i) {
      const double g = gain_of(*incumbents[i]);
      if(!best_incumbent || g > incumbent_gain) {
         best_incumbent = i;
         incumbent_gain = g;
      }
   }

   std::optional< TabularPolicy > stochastic_incumbent;
   if(best_incumbent && incumbent_gain > gain + 1e-12 * std::max(1.0, std::abs(gain))) {
      const auto& inc = *incumbents[*best_incumbent];
      start = "incumbent:" + std::to_string(*best_incumbent);
      if(inc.is_deterministic()) {
         std::size_t r = 0;
         std::tie(choice, gain) = improve(detail::modal_actions(inc), incumbent_gain, r);
         rounds += r;
      } else {
         stochastic_incumbent = inc;
         gain = incumbent_gain;
      }
   }

   TabularPolicy policy = stochastic_incumbent ? *stochastic_incumbent
                                               : TabularPolicy::deterministic(player, na, choice, md);
   if(stochastic_incumbent) policy.metadata() = md;
   std::vector< std::size_t > final_choice = detail::modal_actions(policy);
   ValueFunctionTable vf{fold.value_function.values, {md.oracle, md.iteration}};
   bool shaped_vf = md.shaped;
   if(!stochastic_incumbent && !(start == "fold" && rounds == 0)) {
      vf.values = detail::mixture_scores(game, player, final_choice, opponent_mixture, opponent_policies).value;
      shaped_vf = false;
   }
   return {std::move(policy), std::move(vf), gain, rounds, std::move(start), shaped_vf};
}

}  // namespace mro

#endif  // MRO_MIXTURE_RESPONSE_HPP
