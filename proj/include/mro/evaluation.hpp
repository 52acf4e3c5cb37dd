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

#ifndef MRO_EVALUATION_HPP
#define MRO_EVALUATION_HPP

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mro/core.hpp"
#include "mro/markov_game.hpp"
#include "mro/policy.hpp"

namespace mro {

struct EvaluationResult {
   double mean_gain_blue = 0.0;
   double std_error = 0.0;
   std::size_t episode_count = 0;
   std::uint64_t seed = 0;
   bool exact = true;

   double gain(Player p) const { return signed_gain(p, mean_gain_blue); }
   double mean_gain_red() const { return -mean_gain_blue; }
   bool operator==(const EvaluationResult&) const = default;
};

inline void check_policy_shape(const MarkovGame& game, const TabularPolicy& policy, Player expected) {
   const std::string who = std::string(to_string(expected)) + " policy '" + policy.id() + "'";
   if(policy.player() != expected) throw InvalidArgument(who + " is tagged for the wrong player");
   if(policy.state_count() != game.state_count())
      throw DimensionMismatch(who + " state count", static_cast< std::size_t >(expected), game.state_count(),
                              policy.state_count());
   if(policy.action_count() != game.action_count(expected))
      throw DimensionMismatch(who + " action count", static_cast< std::size_t >(expected),
                              game.action_count(expected), policy.action_count());
}

inline std::size_t sample_outcome(Rng& rng, std::span< const Outcome > outcomes) {
   double u = rng.uniform();
   for(std::size_t i = 0; i < outcomes.size(); ++i) {
      if(u < outcomes[i].probability) return i;
      u -= outcomes[i].probability;
   }
   // Rounding residue: fall back to the last successor with positive mass.
   for(std::size_t i = outcomes.size(); i-- > 0;)
      if(outcomes[i].probability > 0.0) return i;
   return 0;
}

namespace detail {

// Markov chain induced by a joint policy: sparse successor rows plus the
// expected one-step Blue reward per state.
struct JointChain {
   std::vector< std::size_t > offsets;
   std::vector< std::pair< std::size_t, double > > successors;
   std::vector< double > reward;
};

inline JointChain build_joint_chain(const MarkovGame& game, const TabularPolicy& blue, const TabularPolicy& red) {
   const std::size_t n = game.state_count();
   JointChain chain;
   chain.offsets.reserve(n + 1);
   chain.offsets.push_back(0);
   chain.reward.assign(n, 0.0);
   std::vector< double > scratch(n, 0.0);
   std::vector< std::size_t > touched;
   for(std::size_t s = 0; s < n; ++s) {
      auto pb = blue.row(s);
      auto pr = red.row(s);
      double r = 0.0;
      for(std::size_t ab = 0; ab < pb.size(); ++ab) {
         if(pb[ab] == 0.0) continue;
         for(std::size_t ar = 0; ar < pr.size(); ++ar) {
            if(pr[ar] == 0.0) continue;
            const double w = pb[ab] * pr[ar];
            for(const auto& o : game.outcomes(s, ab, ar)) {
               const double mass = w * o.probability;
               if(mass == 0.0) continue;
               if(scratch[o.next] == 0.0) touched.push_back(o.next);
               scratch[o.next] += mass;
               r += mass * o.reward;
            }
         }
      }
      std::sort(touched.begin(), touched.end());
      for(auto t : touched) {
         chain.successors.emplace_back(t, scratch[t]);
         scratch[t] = 0.0;
      }
      touched.clear();
      chain.offsets.push_back(chain.successors.size());
      chain.reward[s] = r;
   }
   return chain;
}

// Solves V = r + gamma * P V for a discounted chain.
inline std::vector< double > solve_discounted(const JointChain& chain, double gamma) {
   const auto n = static_cast< Eigen::Index >(chain.reward.size());
   std::vector< Eigen::Triplet< double > > triplets;
   triplets.reserve(chain.successors.size() + chain.reward.size());
   for(Eigen::Index s = 0; s < n; ++s) {
      triplets.emplace_back(s, s, 1.0);
      for(auto k = chain.offsets[s]; k < chain.offsets[s + 1]; ++k) {
         const auto& [next, p] = chain.successors[k];
         triplets.emplace_back(s, static_cast< Eigen::Index >(next), -gamma * p);
      }
   }
   Eigen::SparseMatrix< double > system(n, n);
   system.setFromTriplets(triplets.begin(), triplets.end());
   system.makeCompressed();
   Eigen::SparseLU< Eigen::SparseMatrix< double > > lu;
   lu.compute(system);
   if(lu.info() != Eigen::Success) throw Error("policy evaluation system could not be factorized");
   Eigen::VectorXd rhs = Eigen::Map< const Eigen::VectorXd >(chain.reward.data(), n);
   Eigen::VectorXd v = lu.solve(rhs);
   // One step of iterative refinement keeps the residual near machine precision.
   Eigen::VectorXd residual = rhs - system * v;
   v += lu.solve(residual);
   return {v.data(), v.data() + n};
}

inline std::vector< double > backward_induction(const JointChain& chain, double gamma, std::size_t steps) {
   const std::size_t n = chain.reward.size();
   std::vector< double > v(n, 0.0), next(n, 0.0);
   for(std::size_t k = 0; k < steps; ++k) {
      for(std::size_t s = 0; s < n; ++s) {
         double acc = 0.0;
         for(auto i = chain.offsets[s]; i < chain.offsets[s + 1]; ++i)
            acc += chain.successors[i].second * v[chain.successors[i].first];
         next[s] = chain.reward[s] + gamma * acc;
      }
      std::swap(v, next);
   }
   return v;
}

// Rollout length beyond which discounted tails fall under double resolution.
inline std::size_t truncation_length(double gamma) {
   return static_cast< std::size_t >(std::ceil(std::log(1e-16 * (1.0 - gamma)) / std::log(gamma)));
}

}  // namespace detail

/// Exact expected Blue return of the joint policy from the initial distribution.
inline EvaluationResult evaluate_exact(const MarkovGame& game, const TabularPolicy& blue, const TabularPolicy& red) {
   check_policy_shape(game, blue, Player::kBlue);
   check_policy_shape(game, red, Player::kRed);
   if(!game.horizon().is_finite() && game.discount() >= 1.0)
      throw UnsupportedConfiguration("discounted-infinite evaluation requires discount < 1");
   const auto chain = detail::build_joint_chain(game, blue, red);
   const double gamma = game.evaluation_discount();
   const auto values = game.horizon().is_finite() ? detail::backward_induction(chain, gamma, game.horizon().steps())
                                                  : detail::solve_discounted(chain, gamma);
   EvaluationResult result;
   result.mean_gain_blue = dot(game.initial_distribution(), values);
   result.exact = true;
   return result;
}

/// Sample mean and standard error of Blue's return over seeded rollouts.
/// Episode e draws every random choice from the stream derive_seed(seed, e).
inline EvaluationResult evaluate_monte_carlo(const MarkovGame& game, const TabularPolicy& blue,
                                             const TabularPolicy& red, std::size_t episodes, std::uint64_t seed) {
   if(episodes == 0) throw InvalidArgument("monte carlo evaluation needs at least one episode");
   check_policy_shape(game, blue, Player::kBlue);
   check_policy_shape(game, red, Player::kRed);
   const double gamma = game.evaluation_discount();
   const std::size_t length
      = game.horizon().is_finite() ? game.horizon().steps() : detail::truncation_length(gamma);

   std::vector< double > returns(episodes, 0.0);
   parallel_for(episodes, [&](std::size_t e) {
      Rng rng(derive_seed(seed, e));
      std::size_t s = rng.categorical(game.initial_distribution());
      double ret = 0.0;
      double weight = 1.0;
      for(std::size_t t = 0; t < length; ++t) {
         const std::size_t ab = rng.categorical(blue.row(s));
         const std::size_t ar = rng.categorical(red.row(s));
         const auto outs = game.outcomes(s, ab, ar);
         const auto& o = outs[sample_outcome(rng, outs)];
         ret += weight * o.reward;
         weight *= gamma;
         s = o.next;
      }
      returns[e] = ret;
   });

   double mean = 0.0;
   for(double r : returns) mean += r;
   mean /= static_cast< double >(episodes);
   double var = 0.0;
   for(double r : returns) var += (r - mean) * (r - mean);
   EvaluationResult result;
   result.mean_gain_blue = mean;
   result.std_error
      = episodes > 1 ? std::sqrt(var / static_cast< double >(episodes - 1) / static_cast< double >(episodes)) : 0.0;
   result.episode_count = episodes;
   result.seed = seed;
   result.exact = false;
   return result;
}

/// Evaluator used for empirical-game cells and response gains.
struct Evaluator {
   enum class Kind { kExact, kMonteCarlo };

   Kind kind = Kind::kExact;
   std::size_t episodes = 100;
   std::uint64_t base_seed = 0;

   static Evaluator exact() { return {}; }
   static Evaluator monte_carlo(std::size_t episodes, std::uint64_t base_seed) {
      return {Kind::kMonteCarlo, episodes, base_seed};
   }

   bool is_exact() const { return kind == Kind::kExact; }

   // Deterministic per-pair seed.
   std::uint64_t cell_seed(const std::string& blue_id, const std::string& red_id) const {
      return derive_seed(base_seed, hash_string(blue_id), hash_string(red_id));
   }

   EvaluationResult operator()(const MarkovGame& game, const TabularPolicy& blue, const TabularPolicy& red) const {
      if(is_exact()) return evaluate_exact(game, blue, red);
      return evaluate_monte_carlo(game, blue, red, episodes, cell_seed(blue.id(), red.id()));
   }

   bool operator==(const Evaluator&) const = default;
};


struct MixtureGain {
   double gain = 0.0;       // from the responding player's perspective
   double std_error = 0.0;  // zero for exact evaluation
};

/// Gain of `policy` against an opponent mixture under per-episode policy
/// sampling: the mixture-weighted average of pairwise evaluations.
inline MixtureGain gain_against(const MarkovGame& game, const Evaluator& evaluator, const TabularPolicy& policy,
                                const Mixture& opponent_mixture,
                                std::span< const TabularPolicy* const > opponent_policies) {
   if(opponent_mixture.size() != opponent_policies.size())
      throw DimensionMismatch("mixture/policy length mismatch", 0, opponent_policies.size(), opponent_mixture.size());
   const Player p = policy.player();
   MixtureGain out;
   double var = 0.0;
   for(std::size_t k = 0; k < opponent_policies.size(); ++k) {
      const double w = opponent_mixture[k];
      if(w == 0.0) continue;
      const auto r = p == Player::kBlue ? evaluator(game, policy, *opponent_policies[k])
                                        : evaluator(game, *opponent_policies[k], policy);
      out.gain += w * r.gain(p);
      var += w * w * r.std_error * r.std_error;
   }
   out.std_error = std::sqrt(var);
   return out;
}

}  // namespace mro

#endif  // MRO_EVALUATION_HPP
