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

#ifndef MRO_POLICY_HPP
#define MRO_POLICY_HPP

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "mro/core.hpp"

namespace mro {

struct PolicyMetadata {
   std::string id;
   std::string oracle = "initial";
   int iteration = 0;
   bool ptm_initialized = false;
   bool shaped = false;

   bool operator==(const PolicyMetadata&) const = default;
};

/// State-conditioned action distribution for one player, stored row-major.
class TabularPolicy {
  public:
   TabularPolicy(Player player, std::size_t state_count, std::size_t action_count, std::vector< double > table,
                 PolicyMetadata metadata = {})
       : player_(player),
         state_count_(state_count),
         action_count_(action_count),
         table_(std::move(table)),
         metadata_(std::move(metadata))
   {
      if(action_count_ == 0) throw InvalidArgument("policy needs at least one action");
      if(table_.size() != state_count_ * action_count_)
         throw DimensionMismatch("policy table size", 0, state_count_ * action_count_, table_.size());
      for(std::size_t s = 0; s < state_count_; ++s) {
         if(!is_distribution(row(s)))
            throw InvalidArgument("policy row " + std::to_string(s) + " is not a probability vector");
      }
   }

   static TabularPolicy uniform(Player player, std::size_t states, std::size_t actions, PolicyMetadata md = {}) {
      return TabularPolicy(
         player, states, actions, std::vector< double >(states * actions, 1.0 / static_cast< double >(actions)),
         std::move(md));
   }

   static TabularPolicy deterministic(Player player, std::size_t actions, std::span< const std::size_t > choice,
                                      PolicyMetadata md = {}) {
      std::vector< double > table(choice.size() * actions, 0.0);
      for(std::size_t s = 0; s < choice.size(); ++s) {
         if(choice[s] >= actions) throw DimensionMismatch("deterministic action out of range", s, actions, choice[s]);
         table[s * actions + choice[s]] = 1.0;
      }
      return TabularPolicy(player, choice.size(), actions, std::move(table), std::move(md));
   }

   Player player() const { return player_; }
   std::size_t state_count() const { return state_count_; }
   std::size_t action_count() const { return action_count_; }
   std::span< const double > row(std::size_t s) const { return {table_.data() + s * action_count_, action_count_}; }
   std::span< const double > table() const { return table_; }
   const PolicyMetadata& metadata() const { return metadata_; }
   PolicyMetadata& metadata() { return metadata_; }
   const std::string& id() const { return metadata_.id; }

   bool same_table(const TabularPolicy& other, double tol = kProbabilityTolerance) const {
      if(player_ != other.player_ || state_count_ != other.state_count_ || action_count_ != other.action_count_)
         return false;
      for(std::size_t i = 0; i < table_.size(); ++i)
         if(std::abs(table_[i] - other.table_[i]) > tol) return false;
      return true;
   }

   bool is_deterministic() const {
      for(double p : table_)
         if(p != 0.0 && p != 1.0) return false;
      return true;
   }

  private:
   Player player_;
   std::size_t state_count_;
   std::size_t action_count_;
   std::vector< double > table_;
   PolicyMetadata metadata_;
};

/// Probability weighting over a player's registered policies.
class Mixture {
  public:
   Mixture(Player player, std::vector< double > weights) : player_(player), weights_(std::move(weights)) {
      if(weights_.empty()) throw InvalidArgument("mixture must be nonempty");
      if(!is_distribution(weights_)) throw InvalidArgument("mixture weights must form a probability vector");
   }

   static Mixture singleton(Player player, std::size_t size, std::size_t index) {
      std::vector< double > w(size, 0.0);
      w.at(index) = 1.0;
      return Mixture(player, std::move(w));
   }
   static Mixture uniform(Player player, std::size_t size) {
      return Mixture(player, std::vector< double >(size, 1.0 / static_cast< double >(size)));
   }

   Player player() const { return player_; }
   std::size_t size() const { return weights_.size(); }
   double operator[](std::size_t i) const { return weights_[i]; }
   std::span< const double > weights() const { return weights_; }

  private:
   Player player_;
   std::vector< double > weights_;
};

struct ValueFunctionOrigin {
   std::string oracle;
   int iteration = 0;
   bool operator==(const ValueFunctionOrigin&) const = default;
};

/// Per-state value estimates learned by one response, from the learner's perspective.
struct ValueFunctionTable {
   std::vector< double > values;
   ValueFunctionOrigin origin;

   bool operator==(const ValueFunctionTable&) const = default;

   std::size_t size() const { return values.size(); }
   double operator[](std::size_t s) const { return values[s]; }
};

}  // namespace mro

#endif  // MRO_POLICY_HPP
