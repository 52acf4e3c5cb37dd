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

// Desk-scale lateral-movement cyber-defence game.
//
// Each host carries a compromise level (clean, user, root), a decoy flag and a
// known-to-Red flag. Red starts with a user foothold on its entry host and
// knows the entry host and its direct neighbours. Both players act on the
// state at the start of a step. Restore beats any same-step Red change to the
// host; remove loses to a same-step escalation.
//
//   Blue  sleep | analyse(h) no-op | remove(h) user (at step start) -> clean
//         restore(h) any -> clean at a fixed cost | decoy(h) sets the decoy flag
//         (not on a host whose decoy Red burns in the same step)
//   Red   sleep | scan(h) marks a reachable host known
//         exploit(h) known, reachable, clean host -> user with the host's success
//                    probability; a decoy active at the start of the step
//                    absorbs the exploit instead,
//                    clears itself and pays Blue the decoy bonus
//         escalate(h) user -> root | impact(h) root on a high-value host costs
//                    Blue the impact penalty for that step
//
// A host is reachable when it is the entry host or has an incoming edge from a
// host Red holds at user level or above. The step counter is part of the
// enumerated state, so stationary tabular policies cover time-dependent play;
// states at step == horizon are absorbing with zero reward.

#ifndef MRO_CYBER_ENV_HPP
#define MRO_CYBER_ENV_HPP

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mro/core.hpp"
#include "mro/markov_game.hpp"
#include "mro/zero_sum.hpp"

namespace mro::cyber {

struct NetworkTopology {
   std::size_t host_count = 0;
   std::vector< int > subnet_of;
   std::vector< std::pair< std::size_t, std::size_t > > edges;  // directed (from, to)
   std::vector< std::size_t > high_value;
   std::vector< double > exploit_success_prob;
   std::size_t red_entry_host = 0;

   void validate() const {
      if(host_count == 0) throw InvalidArgument("topology needs at least one host");
      if(host_count > 16) throw InvalidArgument("topology supports at most 16 hosts");
      if(subnet_of.size() != host_count) throw DimensionMismatch("subnet_of length", 0, host_count, subnet_of.size());
      if(exploit_success_prob.size() != host_count)
         throw DimensionMismatch("exploit_success_prob length", 0, host_count, exploit_success_prob.size());
      if(red_entry_host >= host_count)
         throw DimensionMismatch("red_entry_host out of range", red_entry_host, host_count, red_entry_host);
      for(std::size_t i = 0; i < edges.size(); ++i)
         if(edges[i].first >= host_count || edges[i].second >= host_count)
            throw DimensionMismatch("edge references an unknown host", i, host_count,
                                    std::max(edges[i].first, edges[i].second));
      if(high_value.empty()) throw InvalidArgument("topology needs at least one high-value host");
      for(auto h : high_value)
         if(h >= host_count) throw DimensionMismatch("high-value host out of range", h, host_count, h);
      for(std::size_t h = 0; h < host_count; ++h) {
         const double p = exploit_success_prob[h];
         if(!(p > 0.0 && p <= 1.0))
            throw InvalidArgument("exploit success probability of host " + std::to_string(h) + " must lie in (0, 1]");
      }
   }

   bool is_high_value(std::size_t h) const {
      return std::find(high_value.begin(), high_value.end(), h) != high_value.end();
   }

   bool operator==(const NetworkTopology&) const = default;
};

// Reward magnitudes are desk-scale constants; only their orderings matter.
struct CyberParams {
   std::size_t horizon = 25;
   double discount = 0.95;  // learning discount; evaluation is undiscounted
   double impact_penalty = 10.0;
   double restore_cost = 1.0;
   double decoy_bonus = 1.0;
   std::size_t state_cap = 50'000;

   bool operator==(const CyberParams&) const = default;
};

enum class Level : std::uint8_t { kClean = 0, kUser = 1, kRoot = 2 };

struct CyberState {
   std::vector< Level > level;
   std::vector< bool > decoy;
   std::vector< bool > known;

   bool operator==(const CyberState&) const = default;
};

enum class BlueVerb { kAnalyse = 0, kRemove = 1, kRestore = 2, kDecoy = 3 };
enum class RedVerb { kScan = 0, kExploit = 1, kEscalate = 2, kImpact = 3 };

inline constexpr std::size_t kSleep = 0;

constexpr std::size_t action_count(std::size_t hosts) { return 1 + 4 * hosts; }
constexpr std::size_t blue_action(BlueVerb v, std::size_t host) { return 1 + 4 * host + static_cast< std::size_t >(v); }
constexpr std::size_t red_action(RedVerb v, std::size_t host) { return 1 + 4 * host + static_cast< std::size_t >(v); }

inline std::string action_name(Player p, std::size_t action) {
   if(action == kSleep) return "sleep";
   static const char* blue_verbs[] = {"analyse", "remove", "restore", "decoy"};
   static const char* red_verbs[] = {"scan", "exploit", "escalate", "impact"};
   const std::size_t host = (action - 1) / 4, verb = (action - 1) % 4;
   return std::string(p == Player::kBlue ? blue_verbs[verb] : red_verbs[verb]) + "(" + std::to_string(host) + ")";
}

namespace detail {

// Four bits per host: level (2), decoy (1), known (1).
using Packed = std::uint64_t;

inline Packed pack(const CyberState& c) {
   Packed out = 0;
   for(std::size_t h = 0; h < c.level.size(); ++h) {
      const Packed bits = static_cast< Packed >(c.level[h]) | (c.decoy[h] ? 4u : 0u) | (c.known[h] ? 8u : 0u);
      out |= bits << (4 * h);
   }
   return out;
}

inline CyberState unpack(Packed p, std::size_t hosts) {
   CyberState c{std::vector< Level >(hosts), std::vector< bool >(hosts), std::vector< bool >(hosts)};
   for(std::size_t h = 0; h < hosts; ++h) {
      const auto bits = (p >> (4 * h)) & 0xF;
      c.level[h] = static_cast< Level >(bits & 3);
      c.decoy[h] = (bits & 4) != 0;
      c.known[h] = (bits & 8) != 0;
   }
   return c;
}

struct Successor {
   Packed next;
   double probability;
   double reward;  // Blue's
};

class Dynamics {
  public:
   Dynamics(const NetworkTopology& topo, const CyberParams& params) : topo_(topo), params_(params) {}

   CyberState initial() const {
      const std::size_t n = topo_.host_count;
      CyberState c{std::vector< Level >(n, Level::kClean), std::vector< bool >(n, false), std::vector< bool >(n, false)};
      c.level[topo_.red_entry_host] = Level::kUser;
      c.known[topo_.red_entry_host] = true;
      for(const auto& [from, to] : topo_.edges)
         if(from == topo_.red_entry_host) c.known[to] = true;
      return c;
   }

   bool reachable(const CyberState& c, std::size_t h) const {
      if(h == topo_.red_entry_host) return true;
      for(const auto& [from, to] : topo_.edges)
         if(to == h && c.level[from] != Level::kClean) return true;
      return false;
   }

   // Both actions read the start-of-step state. Restore overrides whatever Red
   // did to the host in the same step; remove only clears a foothold that was
   // at user level and was not escalated in this step.
   std::vector< Successor > step(const CyberState& s, std::size_t blue, std::size_t red) const {
      CyberState c = s;
      double reward = 0.0;
      std::optional< std::size_t > exploit_target;
      std::optional< std::size_t > burned_decoy;
      if(red != kSleep) {
         const std::size_t h = (red - 1) / 4;
         switch(static_cast< RedVerb >((red - 1) % 4)) {
            case RedVerb::kScan:
               if(reachable(s, h)) c.known[h] = true;
               break;
            case RedVerb::kExploit:
               if(s.known[h] && s.level[h] == Level::kClean && reachable(s, h)) {
                  if(s.decoy[h]) {
                     c.decoy[h] = false;
                     burned_decoy = h;
                     reward += params_.decoy_bonus;
                  } else {
                     exploit_target = h;
                  }
               }
               break;
            case RedVerb::kEscalate:
               if(s.level[h] == Level::kUser) c.level[h] = Level::kRoot;
               break;
            case RedVerb::kImpact:
               if(s.level[h] == Level::kRoot && topo_.is_high_value(h)) reward -= params_.impact_penalty;
               break;
         }
      }
      auto apply_blue = [&](CyberState& x) {
         if(blue == kSleep) return;
         const std::size_t h = (blue - 1) / 4;
         switch(static_cast< BlueVerb >((blue - 1) % 4)) {
            case BlueVerb::kAnalyse: break;
            case BlueVerb::kRemove:
               // A same-step escalation outruns the removal.
               if(s.level[h] == Level::kUser && x.level[h] == Level::kUser) x.level[h] = Level::kClean;
               break;
            case BlueVerb::kRestore: x.level[h] = Level::kClean; break;
            case BlueVerb::kDecoy:
               // A decoy burned this step cannot be re-armed until the next.
               if(burned_decoy != h) x.decoy[h] = true;
               break;
         }
      };
      if(blue != kSleep && static_cast< BlueVerb >((blue - 1) % 4) == BlueVerb::kRestore) reward -= params_.restore_cost;

      if(!exploit_target) {
         apply_blue(c);
         return {{pack(c), 1.0, reward}};
      }
      const double p = topo_.exploit_success_prob[*exploit_target];
      CyberState success = c;
      success.level[*exploit_target] = Level::kUser;
      apply_blue(success);
      if(p >= 1.0) return {{pack(success), 1.0, reward}};
      apply_blue(c);
      return {{pack(c), 1.0 - p, reward}, {pack(success), p, reward}};
   }

  private:
   const NetworkTopology& topo_;
   const CyberParams& params_;
};

}  // namespace detail

/// A built cyber game: the Markov game plus the decoding of its state indices.
class CyberGame {
  public:
   const MarkovGame& game() const { return game_; }
   const NetworkTopology& topology() const { return topology_; }
   const CyberParams& params() const { return params_; }

   std::size_t state_count() const { return game_.state_count(); }
   std::size_t step_of(std::size_t state) const { return steps_[state]; }
   CyberState config_of(std::size_t state) const { return detail::unpack(packed_[state], topology_.host_count); }
   bool is_terminal(std::size_t state) const { return steps_[state] == params_.horizon; }

   // Index of (step, config); nullopt if that state is not reachable.
   std::optional< std::size_t > index_of(std::size_t step, const CyberState& c) const {
      auto it = index_.find(key(step, detail::pack(c)));
      if(it == index_.end()) return std::nullopt;
      return it->second;
   }

   // Blue observation channel for learning experiments: each compromised host
   // is reported clean with probability `false_negative`. Observed configs that
   // are not enumerated fall back to the true state.
   std::function< std::size_t(std::size_t, Rng&) > false_negative_observer(double false_negative) const {
      return [this, false_negative](std::size_t s, Rng& rng) {
         CyberState c = config_of(s);
         bool changed = false;
         for(auto& l : c.level) {
            if(l != Level::kClean && rng.uniform() < false_negative) {
               l = Level::kClean;
               changed = true;
            }
         }
         if(!changed) return s;
         return index_of(step_of(s), c).value_or(s);
      };
   }

  private:
   friend CyberGame build_game(const NetworkTopology&, const CyberParams&);

   static std::uint64_t key(std::size_t step, detail::Packed p) {
      return (static_cast< std::uint64_t >(step) << 56) ^ p;
   }

   CyberGame(MarkovGame game, NetworkTopology topo, CyberParams params, std::vector< std::size_t > steps,
             std::vector< detail::Packed > packed)
       : game_(std::move(game)),
         topology_(std::move(topo)),
         params_(params),
         steps_(std::move(steps)),
         packed_(std::move(packed))
   {
      for(std::size_t s = 0; s < steps_.size(); ++s) index_.emplace(key(steps_[s], packed_[s]), s);
   }

   MarkovGame game_;
   NetworkTopology topology_;
   CyberParams params_;
   std::vector< std::size_t > steps_;
   std::vector< detail::Packed > packed_;
   std::unordered_map< std::uint64_t, std::size_t > index_;
};

/// Enumerates every (step, config) reachable from the initial state under any
/// joint action and builds the corresponding zero-sum Markov game.
inline CyberGame build_game(const NetworkTopology& topology, const CyberParams& params) {
   topology.validate();
   if(params.horizon == 0) throw InvalidArgument("cyber horizon must be >= 1");
   if(params.horizon > 255) throw InvalidArgument("cyber horizon must be <= 255");
   const std::size_t actions = action_count(topology.host_count);
   const detail::Dynamics dynamics(topology, params);

   // Successor lists per config, shared by every layer.
   std::unordered_map< detail::Packed, std::vector< std::vector< detail::Successor > > > cache;
   auto successors = [&](detail::Packed p) -> const std::vector< std::vector< detail::Successor > >& {
      auto it = cache.find(p);
      if(it != cache.end()) return it->second;
      const auto c = detail::unpack(p, topology.host_count);
      std::vector< std::vector< detail::Successor > > table(actions * actions);
      for(std::size_t b = 0; b < actions; ++b)
         for(std::size_t r = 0; r < actions; ++r) table[b * actions + r] = dynamics.step(c, b, r);
      return cache.emplace(p, std::move(table)).first->second;
   };

   std::vector< std::vector< detail::Packed > > layers;
   layers.push_back({detail::pack(dynamics.initial())});
   std::size_t total = 1;
   for(std::size_t t = 0; t < params.horizon; ++t) {
      std::set< detail::Packed > next;
      for(auto p : layers.back())
         for(const auto& outs : successors(p))
            for(const auto& o : outs) next.insert(o.next);
      layers.emplace_back(next.begin(), next.end());
      total += layers.back().size();
   }
   if(total > params.state_cap)
      throw InvalidArgument("cyber game needs " + std::to_string(total) + " states, exceeding the cap of "
                            + std::to_string(params.state_cap));

   std::vector< std::size_t > steps;
   std::vector< detail::Packed > packed;
   std::vector< std::unordered_map< detail::Packed, std::size_t > > layer_index(layers.size());
   for(std::size_t t = 0; t < layers.size(); ++t) {
      for(auto p : layers[t]) {
         layer_index[t].emplace(p, steps.size());
         steps.push_back(t);
         packed.push_back(p);
      }
   }

   MarkovGame::Builder builder(total, actions, actions);
   for(std::size_t s = 0; s < total; ++s) {
      const std::size_t t = steps[s];
      if(t == params.horizon) {
         for(std::size_t b = 0; b < actions; ++b)
            for(std::size_t r = 0; r < actions; ++r) builder.transition(s, b, r, s, 1.0);
         continue;
      }
      const auto& table = successors(packed[s]);
      for(std::size_t b = 0; b < actions; ++b) {
         for(std::size_t r = 0; r < actions; ++r) {
            std::map< std::size_t, std::pair< double, double > > merged;  // next -> (p, p * reward)
            for(const auto& o : table[b * actions + r]) {
               auto& [p, pr] = merged[layer_index[t + 1].at(o.next)];
               p += o.probability;
               pr += o.probability * o.reward;
            }
            for(const auto& [next, acc] : merged) builder.transition(s, b, r, next, acc.first, acc.second / acc.first);
         }
      }
   }
   std::vector< double > initial(total, 0.0);
   initial[0] = 1.0;
   builder.discount(params.discount).horizon(Horizon::finite(params.horizon)).initial(std::move(initial));
   auto game = std::move(builder).build();
   return CyberGame(std::move(game), topology, params, std::move(steps), std::move(packed));
}

/// Built-in presets. `tiny`: three hosts in a chain across the user,
/// enterprise and operational subnets with the operational host high-value.
/// `small`: five hosts over the same three subnets with two high-value hosts.
inline NetworkTopology default_topology(const std::string& preset) {
   NetworkTopology t;
   if(preset == "tiny") {
      t.host_count = 3;
      t.subnet_of = {0, 1, 2};
      t.edges = {{0, 1}, {1, 2}};
      t.high_value = {2};
      t.exploit_success_prob = {1.0, 0.8, 0.6};
      t.red_entry_host = 0;
      return t;
   }
   if(preset == "small") {
      t.host_count = 5;
      t.subnet_of = {0, 0, 1, 1, 2};
      t.edges = {{0, 1}, {0, 2}, {1, 3}, {2, 3}, {2, 4}, {3, 4}};
      t.high_value = {3, 4};
      t.exploit_success_prob = {1.0, 0.9, 0.8, 0.7, 0.6};
      t.red_entry_host = 0;
      return t;
   }
   throw InvalidArgument("unknown topology preset '" + preset + "'");
}

/// Default parameters shipped with each preset. Horizons are shortened so
/// that exact double-oracle runs finish in seconds.
inline CyberParams default_params(const std::string& preset) {
   CyberParams p;
   if(preset == "tiny") p.horizon = 15;
   else if(preset == "small") p.horizon = 8;
   else if(preset != "tiny") throw InvalidArgument("unknown topology preset '" + preset + "'");
   return p;
}

}  // namespace mro::cyber

namespace mro {

/// Single-state, one-step game whose Blue reward is payoff(a_blue, a_red).
inline MarkovGame one_step_matrix_game(const PayoffMatrix& payoff) {
   check_payoff(payoff);
   const auto rows = static_cast< std::size_t >(payoff.rows());
   const auto cols = static_cast< std::size_t >(payoff.cols());
   MarkovGame::Builder builder(1, rows, cols);
   for(std::size_t i = 0; i < rows; ++i)
      for(std::size_t j = 0; j < cols; ++j)
         builder.transition(0, i, j, 0, 1.0, payoff(static_cast< Eigen::Index >(i), static_cast< Eigen::Index >(j)));
   builder.horizon(Horizon::finite(1));
   return std::move(builder).build();
}

inline PayoffMatrix rock_paper_scissors() {
   PayoffMatrix a(3, 3);
   a << 0, -1, 1, 1, 0, -1, -1, 1, 0;
   return a;
}

inline PayoffMatrix matching_pennies() {
   PayoffMatrix a(2, 2);
   a << 1, -1, -1, 1;
   return a;
}

/// Named normal-form presets: "rps", "matching_pennies".
inline PayoffMatrix matrix_preset(const std::string& name) {
   if(name == "rps") return rock_paper_scissors();
   if(name == "matching_pennies") return matching_pennies();
   throw InvalidArgument("unknown matrix preset '" + name + "'");
}

}  // namespace mro

#endif  // MRO_CYBER_ENV_HPP
