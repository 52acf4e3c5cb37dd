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

// Approximate double oracle (one oracle per player) and multiple response
// oracles (several per player) over an empirical game.
//
// Each iteration: every oracle responds to the opposing solved mixture, the
// best response per player is selected, and the exploitability
//
//    E = [G_Blue(best_blue, mu_Red) - v] + [G_Red(mu_Blue, best_red) + v]
//
// is compared against epsilon. In a zero-sum game the v terms cancel, so this
// is the same number as the plain sum of the two response gains. If E is
// above the threshold, all non-duplicate responses join the empirical game and
// it is re-solved.

#ifndef MRO_MRO_LOOP_HPP
#define MRO_MRO_LOOP_HPP

#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mro/best_response.hpp"
#include "mro/decision_problem.hpp"
#include "mro/empirical_game.hpp"
#include "mro/mixture_response.hpp"
#include "mro/evaluation.hpp"
#include "mro/ptm.hpp"
#include "mro/q_learning.hpp"
#include "mro/zero_sum.hpp"

namespace mro {

struct PtmConfig {
   double epsilon = 1.0;
   double decay = 0.9;
   // Registry position of the generalist used on the exploratory branch.
   std::optional< std::size_t > generalist;

   bool operator==(const PtmConfig&) const = default;
};

struct OracleConfig {
   enum class Kind { kExact, kQLearning, kRandom };

   Kind kind = Kind::kExact;
   std::string name;  // label in traces; defaults to the kind
   // kExact
   double vi_tolerance = 1e-10;
   double tie_tolerance = 1e-9;
   // Refine the folded solve against the true mixture objective and never fall
   // below the best incumbent policy.
   bool mixture_improvement = true;
   // kQLearning
   QLearningConfig q_learning{};
   // Both learning kinds.
   ShapingConfig shaping{};
   std::optional< PtmConfig > ptm;

   static OracleConfig exact() { return {}; }
   static OracleConfig q(QLearningConfig cfg) {
      OracleConfig o;
      o.kind = Kind::kQLearning;
      o.q_learning = std::move(cfg);
      return o;
   }
   static OracleConfig random() {
      OracleConfig o;
      o.kind = Kind::kRandom;
      return o;
   }

   std::string label() const {
      if(!name.empty()) return name;
      switch(kind) {
         case Kind::kExact: return "exact";
         case Kind::kQLearning: return "qlearning";
         case Kind::kRandom: return "random";
      }
      return "?";
   }

   void validate() const {
      shaping.validate();
      if(kind == Kind::kExact) {
         if(!(vi_tolerance > 0.0)) throw InvalidArgument("oracle vi_tolerance must be positive");
         if(ptm) throw InvalidArgument("ptm initialisation applies to q-learning oracles only");
      }
      if(kind == Kind::kQLearning) q_learning.validate();
      if(kind == Kind::kRandom && (shaping.active() || ptm))
         throw InvalidArgument("the random oracle takes no shaping or ptm settings");
      if(ptm) PtmSampler(ptm->epsilon, ptm->decay);  // validates
   }
};

struct LoopConfig {
   double epsilon = 1e-6;
   std::size_t max_iterations = 50;
   std::vector< OracleConfig > blue_oracles{OracleConfig::exact()};
   std::vector< OracleConfig > red_oracles{OracleConfig::exact()};
   Evaluator evaluator = Evaluator::exact();
   std::uint64_t seed = 0;
   // Starting policies; uniform random when absent.
   std::optional< TabularPolicy > initial_blue;
   std::optional< TabularPolicy > initial_red;
   // Output location used by the command-line driver.
   std::string record_path;

   void validate() const {
      if(!(epsilon >= 0.0)) throw InvalidArgument("epsilon must be >= 0");
      if(max_iterations == 0) throw InvalidArgument("max_iterations must be >= 1");
      if(blue_oracles.empty()) throw InvalidArgument("blue oracle list must be nonempty");
      if(red_oracles.empty()) throw InvalidArgument("red oracle list must be nonempty");
      for(const auto& o : blue_oracles) o.validate();
      for(const auto& o : red_oracles) o.validate();
      if(evaluator.kind == Evaluator::Kind::kMonteCarlo && evaluator.episodes == 0)
         throw InvalidArgument("monte carlo evaluator needs at least one episode");
   }
};

struct OracleOutcome {
   std::string oracle;
   std::string policy_id;
   double gain = 0.0;
   double std_error = 0.0;
   std::string ptm_choice;  // empty when the oracle has no sampler
   bool added = false;      // false for duplicates and on the terminal iteration

   bool operator==(const OracleOutcome&) const = default;
};

enum class TerminationReason { kEpsilonRbne, kMaxIterations };

inline const char* to_string(TerminationReason r) {
   return r == TerminationReason::kEpsilonRbne ? "epsilon-rbne" : "max_iterations";
}

struct IterationRecord {
   std::size_t iteration = 0;
   std::vector< OracleOutcome > blue;
   std::vector< OracleOutcome > red;
   std::size_t best_blue = 0;
   std::size_t best_red = 0;
   double best_gain_blue = 0.0;
   double best_gain_red = 0.0;
   double value = 0.0;  // solved value of the mixtures being tested
   double exploitability = 0.0;
   double threshold = 0.0;  // epsilon, widened by evaluation noise
   std::vector< double > blue_mixture;
   std::vector< double > red_mixture;
   std::size_t new_cells = 0;        // evaluator calls made by this iteration's augmentation
   std::size_t predicted_cells = 0;  // closed form for the same augmentation
   std::size_t cumulative_evaluations = 0;
   std::size_t added_blue = 0;
   std::size_t added_red = 0;
   // Solved values after augmentation; absent on the terminal iteration.
   std::optional< double > value_after;
   std::optional< double > value_red_only;   // only the new Red policies added
   std::optional< double > value_blue_only;  // only the new Blue policies added
   std::optional< double > epsilon_ptm_blue;
   std::optional< double > epsilon_ptm_red;

   bool operator==(const IterationRecord&) const = default;
};

struct RunTrace {
   std::vector< IterationRecord > records;
   EmpiricalGame game;
   SolveResult solution;
   TerminationReason reason = TerminationReason::kMaxIterations;
};

/// Summed improvements of the two responses over the solved value.
inline double exploitability_from_gains(double best_gain_blue, double best_gain_red, double value) {
   return (best_gain_blue - value) + (best_gain_red - (-value));
}

/// Exploitability of the solved mixtures of `eg` given one response per player.
inline double exploitability(const MarkovGame& game, const EmpiricalGame& eg, const SolveResult& mixtures,
                             const TabularPolicy& best_blue, const TabularPolicy& best_red,
                             const Evaluator& evaluator) {
   if(eg.evaluator && !(*eg.evaluator == evaluator))
      throw ConfigError("evaluator", "responses must be evaluated with the evaluator used for the payoff matrix");
   const auto blue_ptrs = eg.policies(Player::kBlue);
   const auto red_ptrs = eg.policies(Player::kRed);
   const double gb = gain_against(game, evaluator, best_blue, mixtures.red, red_ptrs).gain;
   const double gr = gain_against(game, evaluator, best_red, mixtures.blue, blue_ptrs).gain;
   return exploitability_from_gains(gb, gr, mixtures.value);
}

/// Index of the maximal gain; the earliest position wins ties.
inline std::size_t select_best(std::span< const double > gains) {
   if(gains.empty()) throw InvalidArgument("select_best needs at least one response");
   std::size_t best = 0;
   for(std::size_t i = 1; i < gains.size(); ++i)
      if(gains[i] > gains[best]) best = i;
   return best;
}

template < typename T >
std::pair< T, double > select_best(const std::vector< std::pair< T, double > >& responses) {
   std::vector< double > gains;
   for(const auto& r : responses) gains.push_back(r.second);
   return responses[select_best(gains)];
}

namespace detail {

struct OracleResponse {
   TabularPolicy policy;
   std::optional< ValueFunctionTable > value_function;
   std::string ptm_choice;
};

// Shaping potential for `player`: its own registry value functions weighted
// by its current mixture. Policies without a value function contribute zero.
inline std::vector< double > registry_potential(const EmpiricalGame& eg, Player player, const Mixture& own,
                                                const ShapingConfig& shaping, std::size_t states) {
   const auto& reg = eg.registry(player);
   auto table = [&](std::size_t k) {
      return reg[k].value_function ? *reg[k].value_function
                                   : ValueFunctionTable{std::vector< double >(states, 0.0), {}};
   };
   if(shaping.mode == ShapingConfig::Mode::kSingle) {
      if(shaping.single_index >= reg.size())
         throw InvalidArgument("shaping single_index " + std::to_string(shaping.single_index)
                               + " is outside the registry");
      return zscore_normalize(table(shaping.single_index)).values;
   }
   std::vector< ValueFunctionTable > vfs;
   for(std::size_t k = 0; k < reg.size(); ++k) vfs.push_back(table(k));
   return ensemble_potential_table(vfs, own.weights());
}

// Adds tau * phi back so stored tables are in unshaped reward units.
inline ValueFunctionTable unshape(ValueFunctionTable vf, const ShapingConfig& shaping,
                                  std::span< const double > phi) {
   if(!shaping.active()) return vf;
   for(std::size_t s = 0; s < vf.values.size(); ++s) vf.values[s] += shaping.tau * phi[s];
   return vf;
}

struct OracleJob {
   Player player;
   std::size_t index;
   const OracleConfig* config;
   std::optional< PtmChoice > ptm;
};

inline OracleResponse run_oracle(const MarkovGame& game, const EmpiricalGame& eg, const SolveResult& sol,
                                 const OracleJob& job, std::size_t iteration, std::uint64_t seed) {
   const Player p = job.player;
   const auto& cfg = *job.config;
   const Mixture& own = p == Player::kBlue ? sol.blue : sol.red;
   const Mixture& opp = p == Player::kBlue ? sol.red : sol.blue;
   const auto opp_ptrs = eg.policies(opponent(p));
   const std::size_t n = game.state_count();

   PolicyMetadata md;
   md.id = std::string(to_string(p)) + "-" + std::to_string(iteration) + "-" + std::to_string(job.index) + "-"
           + cfg.label();
   md.oracle = cfg.label();
   md.iteration = static_cast< int >(iteration);
   const std::uint64_t stream = derive_seed(seed, hash_string("oracle"), iteration, static_cast< std::uint64_t >(p),
                                            job.index);

   std::vector< double > phi;
   if(cfg.shaping.active()) phi = registry_potential(eg, p, own, cfg.shaping, n);

   switch(cfg.kind) {
      case OracleConfig::Kind::kExact: {
         if(cfg.mixture_improvement) {
            MixtureResponseOptions opts;
            opts.exact.vi_tolerance = cfg.vi_tolerance;
            opts.exact.tie_tolerance = cfg.tie_tolerance;
            opts.exact.shaping = cfg.shaping;
            opts.exact.potential = phi;
            auto res = mixture_best_response(game, p, opp, opp_ptrs, eg.policies(p), opts, md);
            auto vf = res.value_function_shaped ? unshape(std::move(res.value_function), cfg.shaping, phi)
                                                : std::move(res.value_function);
            return {std::move(res.policy), std::move(vf), ""};
         }
         const auto problem = induce_decision_problem(game, opp, opp_ptrs, p);
         ExactSolveOptions opts;
         opts.vi_tolerance = cfg.vi_tolerance;
         opts.tie_tolerance = cfg.tie_tolerance;
         opts.shaping = cfg.shaping;
         opts.potential = phi;
         auto br = exact_best_response(problem, opts, md);
         return {std::move(br.policy), unshape(std::move(br.value_function), cfg.shaping, phi), ""};
      }
      case OracleConfig::Kind::kQLearning: {
         QLearningConfig q = cfg.q_learning;
         q.seed = stream;
         q.shaping = cfg.shaping;
         QLearningInit init;
         if(job.ptm && job.ptm->kind != PtmChoice::Kind::kFresh) {
            const auto& entry = eg.registry(p)[job.ptm->index];
            init.policy = &entry.policy;
            init.values = entry.value_function ? &*entry.value_function : nullptr;
            md.ptm_initialized = true;
         }
         auto res = q_learning_response(game, p, opp, opp_ptrs, q, init, phi, {}, md);
         return {std::move(res.policy), unshape(std::move(res.value_function), cfg.shaping, phi),
                 job.ptm ? job.ptm->describe() : ""};
      }
      case OracleConfig::Kind::kRandom: {
         Rng rng(stream);
         const std::size_t na = game.action_count(p);
         std::vector< std::size_t > choice(n);
         for(auto& c : choice) c = rng.below(na);
         return {TabularPolicy::deterministic(p, na, choice, md), std::nullopt, ""};
      }
   }
   throw Error("unknown oracle kind");
}

inline bool is_duplicate(const TabularPolicy& candidate, const std::vector< RegistryEntry >& registry,
                         const std::vector< RegistryEntry >& pending) {
   for(const auto& e : registry)
      if(candidate.same_table(e.policy, kProbabilityTolerance)) return true;
   for(const auto& e : pending)
      if(candidate.same_table(e.policy, kProbabilityTolerance)) return true;
   return false;
}

inline double solved_value(const PayoffMatrix& a) { return solve_zero_sum(a).value; }

}  // namespace detail

using IterationCallback = std::function< void(const IterationRecord&) >;

/// Multiple response oracles: every configured oracle of both players responds
/// each iteration and all non-duplicate responses augment the empirical game.
inline RunTrace run_mro(const MarkovGame& game, const LoopConfig& cfg, const IterationCallback& on_iteration = {}) {
   cfg.validate();
   const std::size_t n = game.state_count();

   auto initial = [&](Player p, const std::optional< TabularPolicy >& given) {
      PolicyMetadata md;
      md.id = std::string(to_string(p)) + "-initial";
      if(!given) return TabularPolicy::uniform(p, n, game.action_count(p), md);
      check_policy_shape(game, *given, p);
      TabularPolicy copy = *given;
      if(copy.id().empty()) copy.metadata().id = md.id;
      return copy;
   };

   std::atomic< std::size_t > cell_calls{0};
   const CellEvaluator evaluate = [&](const TabularPolicy& b, const TabularPolicy& r) {
      ++cell_calls;
      return cfg.evaluator(game, b, r);
   };

   EmpiricalGame eg;
   eg.evaluator = cfg.evaluator;
   eg = augment(std::move(eg), {{initial(Player::kBlue, cfg.initial_blue), std::nullopt}},
                {{initial(Player::kRed, cfg.initial_red), std::nullopt}}, evaluate)
           .game;
   SolveResult sol = solve_zero_sum(eg.payoff);

   // One sampler per oracle with ptm settings, persisting across iterations.
   std::vector< std::optional< PtmSampler > > blue_ptm, red_ptm;
   for(const auto& o : cfg.blue_oracles)
      blue_ptm.push_back(o.ptm ? std::optional< PtmSampler >(std::in_place, o.ptm->epsilon, o.ptm->decay,
                                                              o.ptm->generalist)
                               : std::nullopt);
   for(const auto& o : cfg.red_oracles)
      red_ptm.push_back(o.ptm ? std::optional< PtmSampler >(std::in_place, o.ptm->epsilon, o.ptm->decay,
                                                             o.ptm->generalist)
                              : std::nullopt);
   auto first_epsilon = [](const std::vector< std::optional< PtmSampler > >& ss) -> std::optional< double > {
      for(const auto& s : ss)
         if(s) return s->epsilon();
      return std::nullopt;
   };

   std::vector< IterationRecord > records;
   TerminationReason reason = TerminationReason::kMaxIterations;
   for(std::size_t it = 1; it <= cfg.max_iterations; ++it) {
      try {
         IterationRecord rec;
         rec.iteration = it;
         rec.value = sol.value;
         rec.blue_mixture.assign(sol.blue.weights().begin(), sol.blue.weights().end());
         rec.red_mixture.assign(sol.red.weights().begin(), sol.red.weights().end());
         rec.epsilon_ptm_blue = first_epsilon(blue_ptm);
         rec.epsilon_ptm_red = first_epsilon(red_ptm);

         // Warm-start choices are drawn serially so results do not depend on scheduling.
         std::vector< detail::OracleJob > jobs;
         auto plan = [&](Player p, const std::vector< OracleConfig >& oracles,
                         const std::vector< std::optional< PtmSampler > >& samplers) {
            for(std::size_t k = 0; k < oracles.size(); ++k) {
               detail::OracleJob job{p, k, &oracles[k], std::nullopt};
               if(samplers[k]) {
                  Rng rng(derive_seed(cfg.seed, hash_string("ptm"), it, static_cast< std::uint64_t >(p), k));
                  job.ptm = samplers[k]->sample(p == Player::kBlue ? sol.blue : sol.red, rng);
               }
               jobs.push_back(job);
            }
         };
         plan(Player::kBlue, cfg.blue_oracles, blue_ptm);
         plan(Player::kRed, cfg.red_oracles, red_ptm);

         std::vector< std::optional< detail::OracleResponse > > responses(jobs.size());
         std::vector< MixtureGain > gains(jobs.size());
         parallel_for(jobs.size(), [&](std::size_t j) {
            responses[j] = detail::run_oracle(game, eg, sol, jobs[j], it, cfg.seed);
            const Player p = jobs[j].player;
            gains[j] = gain_against(game, cfg.evaluator, responses[j]->policy, p == Player::kBlue ? sol.red : sol.blue,
                                    eg.policies(opponent(p)));
         });

         std::vector< double > blue_gains, red_gains;
         std::vector< double > blue_se, red_se;
         for(std::size_t j = 0; j < jobs.size(); ++j) {
            OracleOutcome out{jobs[j].config->label(), responses[j]->policy.id(), gains[j].gain, gains[j].std_error,
                              responses[j]->ptm_choice, false};
            if(jobs[j].player == Player::kBlue) {
               rec.blue.push_back(out);
               blue_gains.push_back(gains[j].gain);
               blue_se.push_back(gains[j].std_error);
            } else {
               rec.red.push_back(out);
               red_gains.push_back(gains[j].gain);
               red_se.push_back(gains[j].std_error);
            }
         }
         rec.best_blue = select_best(blue_gains);
         rec.best_red = select_best(red_gains);
         rec.best_gain_blue = blue_gains[rec.best_blue];
         rec.best_gain_red = red_gains[rec.best_red];
         rec.exploitability = exploitability_from_gains(rec.best_gain_blue, rec.best_gain_red, rec.value);
         rec.threshold = cfg.epsilon;
         if(!cfg.evaluator.is_exact()) {
            const double se_b = blue_se[rec.best_blue], se_r = red_se[rec.best_red];
            rec.threshold += 2.0 * std::sqrt(se_b * se_b + se_r * se_r);
         }

         for(auto& s : blue_ptm)
            if(s) s->decay();
         for(auto& s : red_ptm)
            if(s) s->decay();

         if(rec.exploitability <= rec.threshold) {
            rec.cumulative_evaluations = eg.total_evaluations();
            records.push_back(std::move(rec));
            reason = TerminationReason::kEpsilonRbne;
            if(on_iteration) on_iteration(records.back());
            break;
         }

         std::vector< RegistryEntry > new_blue, new_red;
         std::size_t jb = 0, jr = 0;
         for(std::size_t j = 0; j < jobs.size(); ++j) {
            const bool blue = jobs[j].player == Player::kBlue;
            auto& pending = blue ? new_blue : new_red;
            auto& out = blue ? rec.blue[jb++] : rec.red[jr++];
            if(detail::is_duplicate(responses[j]->policy, eg.registry(jobs[j].player), pending)) continue;
            out.added = true;
            pending.push_back({std::move(responses[j]->policy), std::move(responses[j]->value_function)});
         }
         rec.added_blue = new_blue.size();
         rec.added_red = new_red.size();

         if(!new_blue.empty() || !new_red.empty()) {
            const std::size_t rows = eg.size(Player::kBlue), cols = eg.size(Player::kRed);
            rec.predicted_cells = predicted_new_cells(new_blue.size(), new_red.size(), rows, cols);
            const std::size_t before = cell_calls.load();
            eg = augment(std::move(eg), std::move(new_blue), std::move(new_red), evaluate).game;
            rec.new_cells = cell_calls.load() - before;
            sol = solve_zero_sum(eg.payoff);
            rec.value_after = sol.value;
            const auto r = static_cast< Eigen::Index >(rows), c = static_cast< Eigen::Index >(cols);
            rec.value_red_only = rec.added_red ? detail::solved_value(eg.payoff.topLeftCorner(r, eg.payoff.cols()))
                                               : rec.value;
            rec.value_blue_only = rec.added_blue ? detail::solved_value(eg.payoff.topLeftCorner(eg.payoff.rows(), c))
                                                 : rec.value;
         } else {
            rec.value_after = rec.value_red_only = rec.value_blue_only = sol.value;
         }
         rec.cumulative_evaluations = eg.total_evaluations();
         records.push_back(std::move(rec));
         if(on_iteration) on_iteration(records.back());
      } catch(const Error& e) {
         throw Error("iteration " + std::to_string(it) + ": " + e.what());
      }
   }
   return {std::move(records), std::move(eg), std::move(sol), reason};
}

/// Approximate double oracle: a single oracle per player.
inline RunTrace run_ado(const MarkovGame& game, const OracleConfig& blue_oracle, const OracleConfig& red_oracle,
                        LoopConfig cfg, const IterationCallback& on_iteration = {}) {
   cfg.blue_oracles = {blue_oracle};
   cfg.red_oracles = {red_oracle};
   return run_mro(game, cfg, on_iteration);
}

}  // namespace mro

#endif  // MRO_MRO_LOOP_HPP
