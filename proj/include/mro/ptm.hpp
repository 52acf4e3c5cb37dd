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

#ifndef MRO_PTM_HPP
#define MRO_PTM_HPP

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "mro/core.hpp"
#include "mro/policy.hpp"

namespace mro {

struct PtmChoice {
   enum class Kind { kFresh, kGeneralist, kRegistry };

   Kind kind = Kind::kFresh;
   std::size_t index = 0;  // registry position for kGeneralist and kRegistry

   bool operator==(const PtmChoice&) const = default;

   std::string describe() const {
      switch(kind) {
         case Kind::kFresh: return "fresh";
         case Kind::kGeneralist: return "generalist:" + std::to_string(index);
         case Kind::kRegistry: return "registry:" + std::to_string(index);
      }
      return "?";
   }
};

/// Epsilon-greedy choice of warm start: explore (generalist or fresh) with
/// probability epsilon, otherwise sample a previously trained policy with
/// probability equal to its mixture weight. Epsilon decays only through decay().
class PtmSampler {
  public:
   PtmSampler(double epsilon, double decay, std::optional< std::size_t > generalist = std::nullopt,
              std::uint64_t rng_seed = 0)
       : initial_epsilon_(epsilon), decay_(decay), generalist_(generalist), rng_seed_(rng_seed)
   {
      if(!(epsilon >= 0.0 && epsilon <= 1.0)) throw InvalidArgument("ptm epsilon must lie in [0, 1]");
      if(!(decay >= 0.0 && decay < 1.0)) throw InvalidArgument("ptm decay must lie in [0, 1)");
   }

   double epsilon() const { return initial_epsilon_ * std::pow(decay_, static_cast< double >(decays_)); }
   double initial_epsilon() const { return initial_epsilon_; }
   double decay_rate() const { return decay_; }
   std::size_t decays() const { return decays_; }
   std::optional< std::size_t > generalist() const { return generalist_; }
   std::uint64_t rng_seed() const { return rng_seed_; }

   void decay() { ++decays_; }

   // `weights` is the player's current mixture over its registry (may be empty).
   PtmChoice sample(std::span< const double > weights, Rng& rng) const {
      const std::size_t registry_size = weights.size();
      const double eps = epsilon();
      if(registry_size == 0 && eps == 0.0) throw InvalidState("ptm sampling from an empty registry with epsilon 0");
      const double u = rng.uniform();
      if(u < eps || registry_size == 0) {
         if(generalist_ && *generalist_ < registry_size) return {PtmChoice::Kind::kGeneralist, *generalist_};
         return {PtmChoice::Kind::kFresh, 0};
      }
      return {PtmChoice::Kind::kRegistry, rng.categorical(weights)};
   }

   PtmChoice sample(const Mixture& mixture, Rng& rng) const { return sample(mixture.weights(), rng); }

  private:
   double initial_epsilon_;
   double decay_;
   std::optional< std::size_t > generalist_;
   std::uint64_t rng_seed_;
   std::size_t decays_ = 0;
};

}  // namespace mro

#endif  // MRO_PTM_HPP
