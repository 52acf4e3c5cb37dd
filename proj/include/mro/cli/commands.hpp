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

// Subcommand implementations for the `mro` tool. Each command writes results
// to `out`, diagnostics to `err`, and returns the process exit status:
// 0 success (for `run`: terminated at an epsilon-RBNE), 2 `run` stopped at
// max_iterations, 1 any error.

#ifndef MRO_CLI_COMMANDS_HPP
#define MRO_CLI_COMMANDS_HPP

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "mro/cyber_env.hpp"
#include "mro/evaluation.hpp"
#include "mro/io.hpp"
#include "mro/mro_loop.hpp"
#include "mro/zero_sum.hpp"

namespace mro::cli {

namespace fs = std::filesystem;
using io::Json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitMaxIterations = 2;

struct GlobalOptions {
   std::optional< std::uint64_t > seed;
   std::optional< fs::path > output_dir;
   bool quiet = false;
};

// ---------------------------------------------------------------------------
// Game sources: a preset name or a JSON file (matrix, game or topology,
// recognised by its keys).

// Re-raises a ConfigError with the file name prepended to its field path.
[[noreturn]] inline void rethrow_in_file(const fs::path& path, const ConfigError& e) {
   if(e.field_path().rfind(path.string(), 0) == 0) throw e;
   const std::string what = e.what();
   const std::string message = what.substr(std::min(what.size(), e.field_path().size() + 2));
   throw ConfigError(e.field_path().empty() ? path.string() : path.string() + ": " + e.field_path(), message);
}

struct LoadedGame {
   std::shared_ptr< const cyber::CyberGame > cyber;
   std::shared_ptr< const MarkovGame > plain;
   std::string description;

   const MarkovGame& game() const { return cyber ? cyber->game() : *plain; }
};

inline LoadedGame load_game_file(const fs::path& path) {
   const Json j = io::read_json(path);
   try {
      if(j.is_object() && j.contains("payoff"))
         return {nullptr, std::make_shared< MarkovGame >(one_step_matrix_game(io::matrix_from_json(j))),
                 "matrix " + path.string()};
      if(j.is_object() && j.contains("transitions"))
         return {nullptr, std::make_shared< MarkovGame >(io::game_from_json(j)), "game " + path.string()};
      if(j.is_object() && j.contains("host_count")) {
         const auto f = io::topology_from_json(j);
         return {std::make_shared< cyber::CyberGame >(cyber::build_game(f.topology, f.params)), nullptr,
                 "topology " + path.string()};
      }
   } catch(const ConfigError& e) {
      rethrow_in_file(path, e);
   }
   throw ConfigError(path.string(), "not a matrix, game or topology file");
}

inline LoadedGame load_preset(const std::string& name) {
   if(name == "rps" || name == "matching_pennies")
      return {nullptr, std::make_shared< MarkovGame >(one_step_matrix_game(matrix_preset(name))), "preset " + name};
   if(name == "tiny" || name == "small")
      return {std::make_shared< cyber::CyberGame >(
                 cyber::build_game(cyber::default_topology(name), cyber::default_params(name))),
              nullptr, "preset " + name};
   throw ConfigError("game.preset", "unknown preset '" + name + "' (rps, matching_pennies, tiny, small)");
}

inline LoadedGame load_game(const std::string& source, const fs::path& base = {}) {
   if(source == "rps" || source == "matching_pennies" || source == "tiny" || source == "small")
      return load_preset(source);
   return load_game_file(base.empty() ? fs::path(source) : base / source);
}

// Policy spec: "uniform", "action:<k>" (the same action in every state) or a
// policy file.
inline TabularPolicy load_policy(const std::string& spec, const MarkovGame& game, Player player,
                                 const fs::path& base = {}) {
   const std::size_t n = game.state_count(), na = game.action_count(player);
   PolicyMetadata md;
   md.id = std::string(to_string(player)) + "-" + spec;
   if(spec == "uniform") return TabularPolicy::uniform(player, n, na, md);
   if(spec.rfind("action:", 0) == 0) {
      std::size_t a = 0;
      try {
         a = std::stoul(spec.substr(7));
      } catch(const std::exception&) {
         throw ConfigError(spec, "expected action:<index>");
      }
      if(a >= na) throw ConfigError(spec, "action index out of range (actions: " + std::to_string(na) + ")");
      return TabularPolicy::deterministic(player, na, std::vector< std::size_t >(n, a), md);
   }
   const fs::path path = base.empty() ? fs::path(spec) : base / spec;
   TabularPolicy p = [&] {
      try {
         return io::policy_from_json(io::read_json(path));
      } catch(const ConfigError& e) {
         rethrow_in_file(path, e);
      }
   }();
   if(p.player() != player)
      throw InvalidArgument("policy '" + path.string() + "' is a " + std::string(to_string(p.player()))
                            + " policy, expected " + std::string(to_string(player)));
   if(p.state_count() != n || p.action_count() != na)
      throw DimensionMismatch("policy '" + path.string() + "' has shape " + std::to_string(p.state_count()) + "x"
                                 + std::to_string(p.action_count()) + ", expected " + std::to_string(n) + "x"
                                 + std::to_string(na),
                              static_cast< std::size_t >(player), n * na, p.state_count() * p.action_count());
   if(p.id().empty()) p.metadata().id = path.stem().string();
   return p;
}

// ---------------------------------------------------------------------------
// Run configuration

struct RunConfig {
   std::string game;  // preset name or file path
   LoopConfig loop;
   std::optional< std::uint64_t > evaluator_seed;  // explicit loop.evaluator.base_seed
   std::string initial_blue = "uniform";
   std::string initial_red = "uniform";
   std::string output_dir = "mro_out";
   fs::path base_dir;  // relative paths resolve against the config's directory
};

namespace detail {

inline ShapingConfig parse_shaping(const Json& j, const std::string& path) {
   io::expect_keys(j, path, {"mode", "tau", "gamma_phi", "single_index"});
   ShapingConfig s;
   if(j.contains("mode")) {
      const auto m = io::as< std::string >(j["mode"], path + ".mode");
      if(m == "off") s.mode = ShapingConfig::Mode::kOff;
      else if(m == "single") s.mode = ShapingConfig::Mode::kSingle;
      else if(m == "ensemble") s.mode = ShapingConfig::Mode::kEnsemble;
      else throw ConfigError(path + ".mode", "must be off, single or ensemble");
   }
   if(j.contains("tau")) s.tau = io::as_number(j["tau"], path + ".tau");
   if(j.contains("gamma_phi")) s.gamma_phi = io::as_number(j["gamma_phi"], path + ".gamma_phi");
   if(j.contains("single_index")) s.single_index = io::as_index(j["single_index"], path + ".single_index");
   try {
      s.validate();
   } catch(const Error& e) {
      throw ConfigError(path, e.what());
   }
   return s;
}

inline Evaluator parse_evaluator(const Json& j, const std::string& path, bool& has_seed) {
   io::expect_keys(j, path, {"kind", "episodes", "base_seed"});
   Evaluator ev;
   const auto kind = io::as< std::string >(io::require(j, path, "kind"), path + ".kind");
   if(kind == "exact") ev.kind = Evaluator::Kind::kExact;
   else if(kind == "monte_carlo") ev.kind = Evaluator::Kind::kMonteCarlo;
   else throw ConfigError(path + ".kind", "must be exact or monte_carlo");
   if(j.contains("episodes")) ev.episodes = io::as_index(j["episodes"], path + ".episodes");
   if(ev.kind == Evaluator::Kind::kMonteCarlo && ev.episodes == 0)
      throw ConfigError(path + ".episodes", "must be >= 1");
   has_seed = j.contains("base_seed");
   if(has_seed) ev.base_seed = io::as< std::uint64_t >(j["base_seed"], path + ".base_seed");
   return ev;
}

inline OracleConfig parse_oracle(const Json& j, const std::string& path) {
   io::expect_keys(j, path,
                   {"kind", "name", "vi_tolerance", "tie_tolerance", "mixture_improvement", "shaping", "ptm",
                    "q_learning"});
   OracleConfig o;
   const auto kind = io::as< std::string >(io::require(j, path, "kind"), path + ".kind");
   if(kind == "exact") o.kind = OracleConfig::Kind::kExact;
   else if(kind == "q_learning") o.kind = OracleConfig::Kind::kQLearning;
   else if(kind == "random") o.kind = OracleConfig::Kind::kRandom;
   else throw ConfigError(path + ".kind", "must be exact, q_learning or random");
   if(j.contains("name")) o.name = io::as< std::string >(j["name"], path + ".name");
   if(j.contains("vi_tolerance")) o.vi_tolerance = io::as_number(j["vi_tolerance"], path + ".vi_tolerance");
   if(j.contains("tie_tolerance")) o.tie_tolerance = io::as_number(j["tie_tolerance"], path + ".tie_tolerance");
   if(j.contains("mixture_improvement"))
      o.mixture_improvement = io::as< bool >(j["mixture_improvement"], path + ".mixture_improvement");
   if(j.contains("shaping")) o.shaping = parse_shaping(j["shaping"], path + ".shaping");
   if(j.contains("ptm")) {
      const auto& p = j["ptm"];
      const std::string pp = path + ".ptm";
      io::expect_keys(p, pp, {"epsilon", "decay", "generalist"});
      PtmConfig c;
      if(p.contains("epsilon")) c.epsilon = io::as_number(p["epsilon"], pp + ".epsilon");
      if(p.contains("decay")) c.decay = io::as_number(p["decay"], pp + ".decay");
      if(p.contains("generalist")) c.generalist = io::as_index(p["generalist"], pp + ".generalist");
      o.ptm = c;
   }
   if(j.contains("q_learning")) {
      const auto& q = j["q_learning"];
      const std::string qp = path + ".q_learning";
      io::expect_keys(q, qp,
                      {"step_budget", "checkpoints", "learning_rate_exponent", "epsilon_start", "epsilon_end",
                       "anneal_fraction", "max_episode_length", "init_preference", "checkpoint_evaluator"});
      auto& c = o.q_learning;
      if(q.contains("step_budget")) c.step_budget = io::as_index(q["step_budget"], qp + ".step_budget");
      if(q.contains("checkpoints")) c.checkpoints = io::as_index(q["checkpoints"], qp + ".checkpoints");
      if(q.contains("learning_rate_exponent"))
         c.learning_rate.exponent = io::as_number(q["learning_rate_exponent"], qp + ".learning_rate_exponent");
      if(q.contains("epsilon_start")) c.exploration.start = io::as_number(q["epsilon_start"], qp + ".epsilon_start");
      if(q.contains("epsilon_end")) c.exploration.end = io::as_number(q["epsilon_end"], qp + ".epsilon_end");
      if(q.contains("anneal_fraction"))
         c.exploration.anneal_fraction = io::as_number(q["anneal_fraction"], qp + ".anneal_fraction");
      if(q.contains("max_episode_length"))
         c.max_episode_length = io::as_index(q["max_episode_length"], qp + ".max_episode_length");
      if(q.contains("init_preference")) c.init_preference = io::as_number(q["init_preference"], qp + ".init_preference");
      if(q.contains("checkpoint_evaluator")) {
         bool unused = false;
         c.checkpoint_evaluator = parse_evaluator(q["checkpoint_evaluator"], qp + ".checkpoint_evaluator", unused);
      }
   }
   try {
      o.validate();
   } catch(const ConfigError&) {
      throw;
   } catch(const Error& e) {
      throw ConfigError(path, e.what());
   }
   return o;
}

}  // namespace detail

inline RunConfig parse_run_config(const Json& j, const fs::path& base_dir = {}) {
   io::expect_keys(j, "",
                   {"game", "loop", "seed", "initial_policies", "blue_oracles", "red_oracles", "output_dir",
                    "description"});
   RunConfig rc;
   rc.base_dir = base_dir;
   const auto& g = io::require(j, "", "game");
   io::expect_keys(g, "game", {"preset", "file"});
   if(g.contains("preset") == g.contains("file")) throw ConfigError("game", "exactly one of preset/file is required");
   rc.game = g.contains("preset") ? io::as< std::string >(g["preset"], "game.preset")
                                  : io::as< std::string >(g["file"], "game.file");
   if(g.contains("preset") && rc.game != "rps" && rc.game != "matching_pennies" && rc.game != "tiny"
      && rc.game != "small")
      throw ConfigError("game.preset", "unknown preset '" + rc.game + "' (rps, matching_pennies, tiny, small)");

   if(j.contains("seed")) rc.loop.seed = io::as< std::uint64_t >(j["seed"], "seed");
   if(j.contains("loop")) {
      const auto& l = j["loop"];
      io::expect_keys(l, "loop", {"epsilon", "max_iterations", "evaluator"});
      if(l.contains("epsilon")) rc.loop.epsilon = io::as_number(l["epsilon"], "loop.epsilon");
      if(l.contains("max_iterations")) rc.loop.max_iterations = io::as_index(l["max_iterations"], "loop.max_iterations");
      if(rc.loop.epsilon < 0.0) throw ConfigError("loop.epsilon", "must be >= 0");
      if(rc.loop.max_iterations == 0) throw ConfigError("loop.max_iterations", "must be >= 1");
      if(l.contains("evaluator")) {
         bool has_seed = false;
         rc.loop.evaluator = detail::parse_evaluator(l["evaluator"], "loop.evaluator", has_seed);
         if(has_seed) rc.evaluator_seed = rc.loop.evaluator.base_seed;
      }
   }
   if(j.contains("initial_policies")) {
      const auto& ip = j["initial_policies"];
      io::expect_keys(ip, "initial_policies", {"blue", "red"});
      if(ip.contains("blue")) rc.initial_blue = io::as< std::string >(ip["blue"], "initial_policies.blue");
      if(ip.contains("red")) rc.initial_red = io::as< std::string >(ip["red"], "initial_policies.red");
   }
   auto oracles = [&](const char* key) {
      std::vector< OracleConfig > out;
      if(!j.contains(key)) return std::vector< OracleConfig >{OracleConfig::exact()};
      const auto& arr = j[key];
      if(!arr.is_array() || arr.empty()) throw ConfigError(key, "expected a nonempty array of oracles");
      for(std::size_t i = 0; i < arr.size(); ++i)
         out.push_back(detail::parse_oracle(arr[i], std::string(key) + "[" + std::to_string(i) + "]"));
      return out;
   };
   rc.loop.blue_oracles = oracles("blue_oracles");
   rc.loop.red_oracles = oracles("red_oracles");
   if(j.contains("output_dir")) rc.output_dir = io::as< std::string >(j["output_dir"], "output_dir");
   return rc;
}

inline RunConfig load_run_config(const fs::path& path) {
   if(!fs::exists(path)) throw ConfigError(path.string(), "config file does not exist");
   try {
      return parse_run_config(io::read_json(path), path.parent_path());
   } catch(const ConfigError& e) {
      rethrow_in_file(path, e);
   }
}

// Seeds: the loop uses the base seed directly; unless given explicitly, the
// evaluator's base seed is derive_seed(seed, hash("evaluator")).
inline void apply_seed(RunConfig& rc, std::uint64_t seed) {
   rc.loop.seed = seed;
   if(!rc.evaluator_seed) rc.loop.evaluator.base_seed = derive_seed(seed, hash_string("evaluator"));
}

// ---------------------------------------------------------------------------
// Commands

namespace detail {

inline std::string fmt(double x) { return io::csv_number(x); }

inline std::string join_numbers(std::span< const double > v) {
   std::string s;
   for(std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + fmt(v[i]);
   return s;
}

inline std::string safe_file_name(const std::string& id) {
   std::string out;
   for(char c : id) out += (std::isalnum(static_cast< unsigned char >(c)) || c == '-' || c == '_' || c == '.') ? c : '_';
   return out;
}

}  // namespace detail

inline int cmd_run(const fs::path& config_path, const GlobalOptions& opts, std::ostream& out, std::ostream& err) {
   try {
      RunConfig rc = load_run_config(config_path);
      apply_seed(rc, opts.seed.value_or(rc.loop.seed));
      const fs::path out_dir = opts.output_dir ? *opts.output_dir : rc.base_dir / rc.output_dir;
      const LoadedGame lg = load_game(rc.game, rc.base_dir);
      const MarkovGame& game = lg.game();
      rc.loop.initial_blue = load_policy(rc.initial_blue, game, Player::kBlue, rc.base_dir);
      rc.loop.initial_red = load_policy(rc.initial_red, game, Player::kRed, rc.base_dir);
      rc.loop.record_path = (out_dir / "convergence.csv").string();

      fs::create_directories(out_dir);
      std::ofstream csv(rc.loop.record_path, std::ios::binary);
      if(!csv) throw Error("cannot write " + rc.loop.record_path);
      csv << io::convergence_csv_header(rc.loop);
      if(!opts.quiet) out << "game: " << lg.description << " (" << game.state_count() << " states)\n";

      const auto trace = run_mro(game, rc.loop, [&](const IterationRecord& r) {
         csv << io::convergence_csv_row(r);
         csv.flush();
         if(!opts.quiet)
            out << "iteration " << r.iteration << ": value " << detail::fmt(r.value) << ", exploitability "
                << detail::fmt(r.exploitability) << ", new cells " << r.new_cells << "\n";
      });
      csv.close();

      io::write_json(out_dir / "payoff_matrix.json", io::empirical_game_to_json(trace.game));
      io::write_json(out_dir / "mixtures.json", io::mixture_to_json(io::mixture_file(trace.solution, &trace.game)));
      io::write_json(out_dir / "trace.json", io::trace_to_json(trace));
      for(Player p : {Player::kBlue, Player::kRed}) {
         for(const auto& e : trace.game.registry(p)) {
            const auto name = detail::safe_file_name(e.policy.id()) + ".json";
            io::write_json(out_dir / "policies" / name, io::policy_to_json(e.policy));
            if(e.value_function)
               io::write_json(out_dir / "value_functions" / name, io::value_function_to_json(*e.value_function));
         }
      }

      const auto& last = trace.records.back();
      out << "termination: " << to_string(trace.reason) << "\n";
      out << "iterations: " << trace.records.size() << "\n";
      out << "value: " << detail::fmt(trace.solution.value) << "\n";
      out << "exploitability: " << detail::fmt(last.exploitability) << "\n";
      out << "policies: " << trace.game.size(Player::kBlue) << " blue, " << trace.game.size(Player::kRed) << " red\n";
      out << "evaluations: " << trace.game.total_evaluations() << "\n";
      return trace.reason == TerminationReason::kEpsilonRbne ? kExitOk : kExitMaxIterations;
   } catch(const std::exception& e) {
      err << "error: " << e.what() << "\n";
      return kExitError;
   }
}

inline int cmd_solve(const fs::path& matrix_path, const GlobalOptions& opts, std::ostream& out, std::ostream& err) {
   try {
      const PayoffMatrix a = [&] {
         try {
            return io::matrix_from_json(io::read_json(matrix_path));
         } catch(const ConfigError& e) {
            rethrow_in_file(matrix_path, e);
         }
      }();
      const auto sol = solve_zero_sum(a);
      const auto gains = support_gains(a, sol.blue, sol.red);
      out << "value: " << detail::fmt(sol.value) << "\n";
      out << "blue_mixture: " << detail::join_numbers(sol.blue.weights()) << "\n";
      out << "red_mixture: " << detail::join_numbers(sol.red.weights()) << "\n";
      auto support = [&](const char* name, const Mixture& m, const std::vector< double >& g) {
         out << name << ":";
         for(std::size_t i = 0; i < m.size(); ++i)
            if(m[i] > 0.0) out << " " << i << "=" << detail::fmt(g[i]);
         out << "\n";
      };
      support("blue_support_gains", sol.blue, gains.blue);
      support("red_support_gains", sol.red, gains.red);
      const fs::path dir = opts.output_dir.value_or(fs::path("."));
      io::write_json(dir / "mixture.json", io::mixture_to_json(io::mixture_file(sol)));
      return kExitOk;
   } catch(const std::exception& e) {
      err << "error: " << e.what() << "\n";
      return kExitError;
   }
}

struct EvalOptions {
   std::string game;
   std::string blue;
   std::string red;
   std::string evaluator = "exact";  // exact | monte_carlo
   std::size_t episodes = 100;
};

inline int cmd_eval(const EvalOptions& eo, const GlobalOptions& opts, std::ostream& out, std::ostream& err) {
   try {
      const LoadedGame lg = load_game(eo.game);
      const MarkovGame& game = lg.game();
      const auto blue = load_policy(eo.blue, game, Player::kBlue);
      const auto red = load_policy(eo.red, game, Player::kRed);
      Evaluator ev;
      if(eo.evaluator == "monte_carlo") ev = Evaluator::monte_carlo(eo.episodes, opts.seed.value_or(0));
      else if(eo.evaluator != "exact") throw ConfigError("--evaluator", "must be exact or monte_carlo");
      const auto r = ev(game, blue, red);
      out << "mean_gain_blue: " << detail::fmt(r.mean_gain_blue) << "\n";
      out << "mean_gain_red: " << detail::fmt(r.mean_gain_red()) << "\n";
      if(!r.exact) {
         out << "std_error: " << detail::fmt(r.std_error) << "\n";
         out << "episodes: " << r.episode_count << "\n";
         out << "seed: " << r.seed << "\n";
      }
      return kExitOk;
   } catch(const std::exception& e) {
      err << "error: " << e.what() << "\n";
      return kExitError;
   }
}

inline int cmd_prune(const fs::path& matrix_path, const std::string& mode_name, const GlobalOptions& opts,
                     std::ostream& out, std::ostream& err) {
   try {
      DominanceMode mode;
      if(mode_name == "strict") mode = DominanceMode::kStrict;
      else if(mode_name == "weak") mode = DominanceMode::kWeak;
      else throw ConfigError("--mode", "must be strict or weak");
      const PayoffMatrix a = [&] {
         try {
            return io::matrix_from_json(io::read_json(matrix_path));
         } catch(const ConfigError& e) {
            rethrow_in_file(matrix_path, e);
         }
      }();
      const auto reduced = eliminate_iteratively(a, mode);
      if(reduced.order.empty()) {
         out << "no strategies removed\n";
      } else {
         out << "removal order:";
         for(const auto& e : reduced.order)
            out << " " << to_string(e.player) << ":" << e.original_index;
         out << "\n";
         for(Player p : {Player::kBlue, Player::kRed}) {
            out << to_string(p) << "_removed:";
            for(auto i : reduced.removed(p)) out << " " << i;
            out << "\n";
         }
      }
      out << "original: " << a.rows() << "x" << a.cols() << "\n";
      out << "reduced: " << reduced.payoff.rows() << "x" << reduced.payoff.cols() << "\n";
      if(mode == DominanceMode::kStrict) {
         const double v0 = solve_zero_sum(a).value, v1 = solve_zero_sum(reduced.payoff).value;
         out << "value_original: " << detail::fmt(v0) << "\n";
         out << "value_reduced: " << detail::fmt(v1) << "\n";
         out << "value_difference: " << detail::fmt(std::abs(v0 - v1)) << "\n";
      }
      const fs::path dir = opts.output_dir.value_or(fs::path("."));
      io::Json j = io::matrix_to_json(reduced.payoff);
      j["blue_kept"] = reduced.blue_kept;
      j["red_kept"] = reduced.red_kept;
      io::write_json(dir / "reduced_matrix.json", j);
      return kExitOk;
   } catch(const std::exception& e) {
      err << "error: " << e.what() << "\n";
      return kExitError;
   }
}

}  // namespace mro::cli

#endif  // MRO_CLI_COMMANDS_HPP
