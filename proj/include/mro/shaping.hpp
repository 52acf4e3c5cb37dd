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

#ifndef MRO_SHAPING_HPP
#define MRO_SHAPING_HPP

#include <cmath>
#include <concepts>
#include <span>
#include <vector>

#include "mro/core.hpp"
#include "mro/policy.hpp"

namespace mro {

/// Potential-based reward shaping parameters.
///
/// The shaping term for a transition s -> s' is tau * (gamma_phi * phi(s') - phi(s)).
/// gamma_phi defaults to 1 (undiscounted potential difference) even when the
/// learner discounts its returns; policy invariance is exact only when
/// gamma_phi equals the learner's discount.
struct ShapingConfig {
   enum class Mode { kOff, kSingle, kEnsemble };

   Mode mode = Mode::kOff;
   double tau = 1.0;
   double gamma_phi = 1.0;
   // Registry position of the value function used in kSingle mode.
   std::size_t single_index = 0;

   bool active() const { return mode != Mode::kOff && tau != 0.0; }

   void validate() const {
      if(!(tau >= 0.0) || !std::isfinite(tau)) throw InvalidArgument("shaping tau must be finite and nonnegative");
      if(!(gamma_phi > 0.0 && gamma_phi <= 1.0)) throw InvalidArgument("shaping gamma_phi must lie in (0, 1]");
   }
};

/// Z-score over the full state set using the population standard deviation.
/// A constant table maps to all zeros.
inline ValueFunctionTable zscore_normalize(const ValueFunctionTable& vf) {
   if(vf.values.empty()) throw InvalidArgument("cannot normalize an empty value table");
   const auto n = static_cast< double >(vf.values.size());
   double mean = 0.0;
   for(double v : vf.values) {
      if(!std::isfinite(v)) throw InvalidArgument("value table entries must be finite");
      mean += v;
   }
   mean /= n;
   double var = 0.0;
   for(double v : vf.values) var += (v - mean) * (v - mean);
   const double sd = std::sqrt(var / n);

   ValueFunctionTable out{std::vector< double >(vf.values.size(), 0.0), vf.origin};
   bool constant = true;
   for(double v : vf.values) constant = constant && v == vf.values.front();
   if(constant || sd == 0.0) return out;
   for(std::size_t s = 0; s < vf.values.size(); ++s) out.values[s] = (vf.values[s] - mean) / sd;
   return out;
}

/// Full potential table: sum_k weights_k * Z(V_k)(s). Zero-weight entries are skipped.
inline std::vector< double > ensemble_potential_table(std::span< const ValueFunctionTable > vfs,
                                                      std::span< const double > weights) {
   if(vfs.size() != weights.size())
      throw DimensionMismatch("value-function/weight length mismatch", 0, vfs.size(), weights.size());
   if(vfs.empty()) throw InvalidArgument("ensemble needs at least one value function");
   const std::size_t n = vfs.front().size();
   std::vector< double > phi(n, 0.0);
   for(std::size_t k = 0; k < vfs.size(); ++k) {
      if(weights[k] == 0.0) continue;
      if(vfs[k].size() != n) throw DimensionMismatch("value-function state count", k, n, vfs[k].size());
      const auto z = zscore_normalize(vfs[k]);
      for(std::size_t s = 0; s < n; ++s) phi[s] += weights[k] * z.values[s];
   }
   return phi;
}

inline double ensemble_potential(std::span< const ValueFunctionTable > vfs, const Mixture& weights, std::size_t state) {
   const auto phi = ensemble_potential_table(vfs, weights.weights());
   if(state >= phi.size()) throw DimensionMismatch("potential state out of range", state, phi.size(), state);
   return phi[state];
}

template < typename PotentialFn >
   requires std::invocable< PotentialFn&, std::size_t >
double shaped_reward(double reward, std::size_t s, std::size_t s_next, PotentialFn&& potential,
                     const ShapingConfig& cfg) {
   if(cfg.mode == ShapingConfig::Mode::kOff) return reward;
   return reward + cfg.tau * (cfg.gamma_phi * potential(s_next) - potential(s));
}

inline double shaped_reward(double reward, std::size_t s, std::size_t s_next, std::span< const double > potential,
                            const ShapingConfig& cfg) {
   return shaped_reward(reward, s, s_next, [&](std::size_t x) { return potential[x]; }, cfg);
}

}  // namespace mro

#endif  // MRO_SHAPING_HPP
