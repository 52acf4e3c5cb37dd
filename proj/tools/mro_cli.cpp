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

// mro: run, solve, eval and prune subcommands.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "mro/cli/commands.hpp"

int main(int argc, char** argv) {
   CLI::App app{"Mixed-oracle double-oracle solver for zero-sum Markov games"};
   app.require_subcommand(1);
   app.set_version_flag("--version", "mro 1.0.0");

   mro::cli::GlobalOptions global;
   std::uint64_t seed = 0;
   std::string output_dir;
   auto* seed_opt = app.add_option("--seed", seed, "Override the base seed")->check(CLI::NonNegativeNumber);
   auto* out_opt = app.add_option("--output-dir", output_dir, "Directory for output files");
   app.add_flag("--quiet,-q", global.quiet, "Suppress progress output");

   std::string config;
   auto* run = app.add_subcommand("run", "Run the double-oracle loop from a JSON config");
   run->add_option("config", config, "Run configuration file")->required();

   std::string matrix;
   auto* solve = app.add_subcommand("solve", "Solve a zero-sum payoff matrix");
   solve->add_option("matrix", matrix, "Payoff matrix file")->required();

   mro::cli::EvalOptions eval_opts;
   auto* eval = app.add_subcommand("eval", "Evaluate a Blue/Red policy pair");
   eval->add_option("--game", eval_opts.game, "Preset name or game/topology/matrix file")->required();
   eval->add_option("--blue", eval_opts.blue, "Blue policy: uniform, action:K or a policy file")->required();
   eval->add_option("--red", eval_opts.red, "Red policy: uniform, action:K or a policy file")->required();
   eval->add_option("--evaluator", eval_opts.evaluator, "exact or monte_carlo")
      ->check(CLI::IsMember({"exact", "monte_carlo"}));
   eval->add_option("--episodes", eval_opts.episodes, "Monte Carlo episodes")->check(CLI::PositiveNumber);

   std::string prune_matrix, mode = "strict";
   auto* prune = app.add_subcommand("prune", "Iterated dominance elimination on a payoff matrix");
   prune->add_option("matrix", prune_matrix, "Payoff matrix file")->required();
   prune->add_option("--mode", mode, "strict or weak")->check(CLI::IsMember({"strict", "weak"}));

   // Global flags are accepted after the subcommand too.
   for(auto* sub : {run, solve, eval, prune}) sub->fallthrough();

   try {
      app.parse(argc, argv);
   } catch(const CLI::ParseError& e) {
      const int code = app.exit(e);
      return code == 0 ? 0 : mro::cli::kExitError;
   }
   if(*seed_opt) global.seed = seed;
   if(*out_opt) global.output_dir = output_dir;

   if(*run) return mro::cli::cmd_run(config, global, std::cout, std::cerr);
   if(*solve) return mro::cli::cmd_solve(matrix, global, std::cout, std::cerr);
   if(*eval) return mro::cli::cmd_eval(eval_opts, global, std::cout, std::cerr);
   return mro::cli::cmd_prune(prune_matrix, mode, global, std::cout, std::cerr);
}
