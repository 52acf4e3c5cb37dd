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

#ifndef MRO_BEST_RESPONSE_HPP
#define MRO_BEST_RESPONSE_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "mro/decision_problem.hpp"
#include "mro/policy.hpp"
#include "mro/shaping.hpp"

namespace mro {

struct ActionValues {
   std::size_t action_count = 0;
   std::vector< double > q;  // row-major [state][action]
   std::vector< double > v;
   std::size_t sweeps = 0;

   double operator()(std::size_t s, std::size_t a) const { return q[s * action_count + a]; }
   std::span< const double > row(std::size_t s) const { return {q.data() + s * action_count, action_count}; }
};

// Actions whose value is within `tol` (relative to max(1, |best|)) of the best.
inline std::vector< std::size_t > greedy_actions(std::span< const double > q_row, double tol) {
   const double best = *std::max_element(q_row.begin(), q_row.end());
   const double slack = tol * std::max(1.0, std::abs(best));
   std::vector< std::size_t > out;
   for(std::size_t a = 0; a < q_row.size(); ++a)
      if(q_row[a] >= best - slack) out.push_back(a);
   return out;
}

struct ExactSolveOptions {
   double vi_tolerance = 1e-10;
   double tie_tolerance = 1e-9;
   std::size_t max_sweeps = 1'000'000;
   ShapingConfig shaping{};
   // Potential over states; required when shaping is active.
   std::span< const double > potential{};
};

/// Optimal action values of a decision problem. Discounted problems use value
/// iteration to the given sup-norm residual; finite-horizon problems use
/// backward induction over the horizon.
inline ActionValues solve_action_values(const DecisionProblem& problem, const ExactSolveOptions& opts = {}) {
   if(!(opts.vi_tolerance > 0.0)) throw InvalidArgument("value iteration tolerance must be positive");
   opts.shaping.validate();
   const bool shaped = opts.shaping.active();
   if(shaped && opts.potential.size() != problem.state_count())
      throw DimensionMismatch("shaping potential length", 0, problem.state_count(), opts.potential.size());

   const std::size_t n = problem.state_count();
   const std::size_t na = problem.action_count();
   const double gamma = problem.discount();
   for(std::size_t s = 0; s < n; ++s)
      for(std::size_t a = 0; a < na; ++a)
         for(const auto& o : problem.outcomes(s, a))
            if(!std::isfinite(o.reward)) throw InvalidArgument("decision problem has a non-finite reward");

   ActionValues out;
   out.action_count = na;
   out.q.assign(n * na, 0.0);
   out.v.assign(n, 0.0);
   std::vector< double > next_v(n, 0.0);

   auto backup = [&](const std::vector< double >& v) {
      for(std::size_t s = 0; s < n; ++s) {
         double best = -std::numeric_limits< double >::infinity();
         for(std::size_t a = 0; a < na; ++a) {
            double acc = 0.0;
            for(const auto& o : problem.outcomes(s, a)) {
               double r = o.reward;
               if(shaped) r = shaped_reward(r, s, o.next, opts.potential, opts.shaping);
               acc += o.probability * (r + gamma * v[o.next]);
            }
            out.q[s * na + a] = acc;
            best = std::max(best, acc);
         }
         next_v[s] = best;
      }
   };

   if(problem.horizon().is_finite()) {
      for(std::size_t k = 0; k < problem.horizon().steps(); ++k) {
         backup(out.v);
         std::swap(out.v, next_v);
         ++out.sweeps;
      }
      return out;
   }
   for(;;) {
      backup(out.v);
      double residual = 0.0;
      for(std::size_t s = 0; s < n; ++s) residual = std::max(residual, std::abs(next_v[s] - out.v[s]));
      std::swap(out.v, next_v);
      ++out.sweeps;
      if(residual <= opts.vi_tolerance) break;
      if(out.sweeps >= opts.max_sweeps) throw Error("value iteration did not converge");
   }
   // Q consistent with the returned V.
   backup(out.v);
   return out;
}

inline TabularPolicy greedy_policy(const ActionValues& values, Player player, double tie_tolerance,
                                   PolicyMetadata md = {}) {
   const std::size_t n = values.v.size();
   std::vector< std::size_t > choice(n);
   for(std::size_t s = 0; s < n; ++s) choice[s] = greedy_actions(values.row(s), tie_tolerance).front();
   return TabularPolicy::deterministic(player, values.action_count, choice, std::move(md));
}

struct BestResponse {
   TabularPolicy policy;
   ValueFunctionTable value_function;
   ActionValues action_values;
};

/// Greedy policy w.r.t. the converged values, ties to the lowest action index.
inline BestResponse exact_best_response(const DecisionProblem& problem, const ExactSolveOptions& opts = {},
                                        PolicyMetadata md = {}) {
   auto values = solve_action_values(problem, opts);
   md.shaped = opts.shaping.active();
   auto policy = greedy_policy(values, problem.player(), opts.tie_tolerance, md);
   ValueFunctionTable vf{values.v, {md.oracle, md.iteration}};
   return {std::move(policy), std::move(vf), std::move(values)};
}

inline BestResponse exact_best_response(const DecisionProblem& problem, double vi_tolerance) {
   ExactSolveOptions opts;
   opts.vi_tolerance = vi_tolerance;
   return exact_best_response(problem, opts);
}

}  // namespace mro

#endif  // MRO_BEST_RESPONSE_HPP
