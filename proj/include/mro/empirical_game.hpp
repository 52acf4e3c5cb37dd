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

#ifndef MRO_EMPIRICAL_GAME_HPP
#define MRO_EMPIRICAL_GAME_HPP

#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mro/evaluation.hpp"
#include "mro/policy.hpp"
#include "mro/zero_sum.hpp"

namespace mro {

struct RegistryEntry {
   TabularPolicy policy;
   std::optional< ValueFunctionTable > value_function;
};

/// Normal-form game over the policies discovered so far. Rows are Blue
/// policies, columns Red policies, entries Blue's gain.
struct EmpiricalGame {
   PayoffMatrix payoff = PayoffMatrix(0, 0);
   PayoffMatrix std_error = PayoffMatrix(0, 0);
   std::vector< RegistryEntry > blue_registry;
   std::vector< RegistryEntry > red_registry;
   // Evaluator calls made by each augmentation, in order.
   std::vector< std::size_t > evaluation_log;
   // Evaluator that produced the entries, when known.
   std::optional< Evaluator > evaluator;

   std::size_t size(Player p) const { return p == Player::kBlue ? blue_registry.size() : red_registry.size(); }
   const std::vector< RegistryEntry >& registry(Player p) const {
      return p == Player::kBlue ? blue_registry : red_registry;
   }
   std::vector< const TabularPolicy* > policies(Player p) const {
      std::vector< const TabularPolicy* > out;
      for(const auto& e : registry(p)) out.push_back(&e.policy);
      return out;
   }
   std::size_t total_evaluations() const {
      std::size_t total = 0;
      for(auto c : evaluation_log) total += c;
      return total;
   }
};

/// Cells needed when n Blue and m Red policies join a blue_size x red_size game.
constexpr std::size_t predicted_new_cells(std::size_t n, std::size_t m, std::size_t blue_size, std::size_t red_size) {
   return (blue_size + n) * (red_size + m) - blue_size * red_size;
}

using CellEvaluator = std::function< EvaluationResult(const TabularPolicy& blue, const TabularPolicy& red) >;

struct AugmentResult {
   EmpiricalGame game;
   std::size_t new_cell_count;
};

/// Appends new policies and evaluates exactly the missing cells: new rows
/// against old columns, old rows against new columns, and new against new.
/// Cells are independent and evaluated in parallel; `evaluate` must be
/// thread-safe.
inline AugmentResult augment(EmpiricalGame eg, std::vector< RegistryEntry > new_blue,
                             std::vector< RegistryEntry > new_red, const CellEvaluator& evaluate) {
   if(new_blue.empty() && new_red.empty()) throw InvalidArgument("augment needs at least one new policy");
   auto check_ids = [](const std::vector< RegistryEntry >& existing, const std::vector< RegistryEntry >& incoming,
                       Player p) {
      std::set< std::string > seen;
      for(const auto& e : existing) seen.insert(e.policy.id());
      for(const auto& e : incoming) {
         if(e.policy.player() != p)
            throw InvalidArgument("policy '" + e.policy.id() + "' added to the " + std::string(to_string(p))
                                  + " registry belongs to the other player");
         if(!seen.insert(e.policy.id()).second)
            throw InvalidArgument("duplicate policy reference '" + e.policy.id() + "' in "
                                  + std::string(to_string(p)) + " registry");
      }
   };
   check_ids(eg.blue_registry, new_blue, Player::kBlue);
   check_ids(eg.red_registry, new_red, Player::kRed);

   const auto old_rows = static_cast< Eigen::Index >(eg.blue_registry.size());
   const auto old_cols = static_cast< Eigen::Index >(eg.red_registry.size());
   for(auto& e : new_blue) eg.blue_registry.push_back(std::move(e));
   for(auto& e : new_red) eg.red_registry.push_back(std::move(e));
   const auto rows = static_cast< Eigen::Index >(eg.blue_registry.size());
   const auto cols = static_cast< Eigen::Index >(eg.red_registry.size());

   PayoffMatrix payoff = PayoffMatrix::Zero(rows, cols);
   PayoffMatrix errors = PayoffMatrix::Zero(rows, cols);
   payoff.topLeftCorner(old_rows, old_cols) = eg.payoff;
   errors.topLeftCorner(old_rows, old_cols) = eg.std_error;

   std::vector< std::pair< Eigen::Index, Eigen::Index > > cells;
   for(Eigen::Index i = 0; i < rows; ++i)
      for(Eigen::Index j = 0; j < cols; ++j)
         if(i >= old_rows || j >= old_cols) cells.emplace_back(i, j);

   std::vector< EvaluationResult > results(cells.size());
   parallel_for(cells.size(), [&](std::size_t k) {
      const auto [i, j] = cells[k];
      results[k] = evaluate(eg.blue_registry[static_cast< std::size_t >(i)].policy,
                            eg.red_registry[static_cast< std::size_t >(j)].policy);
   });
   for(std::size_t k = 0; k < cells.size(); ++k) {
      const auto [i, j] = cells[k];
      if(!std::isfinite(results[k].mean_gain_blue))
         throw Error("non-finite payoff for cell (" + std::to_string(i) + ", " + std::to_string(j) + ")");
      payoff(i, j) = results[k].mean_gain_blue;
      errors(i, j) = results[k].std_error;
   }
   eg.payoff = std::move(payoff);
   eg.std_error = std::move(errors);
   eg.evaluation_log.push_back(cells.size());
   return {std::move(eg), cells.size()};
}

}  // namespace mro

#endif  // MRO_EMPIRICAL_GAME_HPP
