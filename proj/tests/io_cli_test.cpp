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

#include <gtest/gtest.h>

#include <algorithm>
#include <cstdlib>
#include <sstream>
#include <sys/wait.h>

#include "mro/cli/commands.hpp"
#include "mro/io.hpp"
#include "test_util.hpp"

namespace mro {
namespace {

namespace fs = std::filesystem;
using io::Json;
using testing::read_file;
using testing::scratch_dir;

const fs::path kSource = MRO_SOURCE_DIR;

template < typename Fn >
std::string config_error_path(Fn&& fn) {
   try {
      fn();
   } catch(const ConfigError& e) {
      return e.field_path();
   }
   return "<no error>";
}

// ---------------------------------------------------------------------------
// Round trips

TEST(IoRoundTrip, Policy) {
   Rng rng(1);
   auto p = testing::random_policy(rng, Player::kRed, 4, 3, "red-7-0-exact");
   p.metadata().iteration = 7;
   p.metadata().shaped = true;
   const auto back = io::policy_from_json(Json::parse(io::policy_to_json(p).dump()));
   EXPECT_TRUE(back.same_table(p, 0.0));
   EXPECT_EQ(back.metadata(), p.metadata());
   EXPECT_EQ(back.player(), Player::kRed);

   const std::vector< std::size_t > c{2, 0, 1};
   const auto d = TabularPolicy::deterministic(Player::kBlue, 3, c);
   const auto j = io::policy_to_json(d);
   EXPECT_TRUE(j.contains("choice"));
   EXPECT_TRUE(io::policy_from_json(j).same_table(d, 0.0));
}

TEST(IoRoundTrip, GameMatrixMixtureValueFunctionCurve) {
   Rng rng(2);
   const auto g = testing::random_game(rng, 3, 2, 2, 0);
   const auto g2 = io::game_from_json(Json::parse(io::game_to_json(g).dump()));
   EXPECT_EQ(io::game_to_json(g2).dump(), io::game_to_json(g).dump());
   EXPECT_FALSE(g2.horizon().is_finite());

   const auto a = testing::random_matrix(rng, 3, 4);
   EXPECT_EQ(io::matrix_from_json(Json::parse(io::matrix_to_json(a).dump())), a);

   const io::MixtureFile m{0.25, {0.5, 0.5}, {1.0}, {"b0", "b1"}, {"r0"}};
   EXPECT_EQ(io::mixture_from_json(Json::parse(io::mixture_to_json(m).dump())), m);

   const ValueFunctionTable vf{{1.5, -2.25, 1e-17}, {"exact", 3}};
   EXPECT_EQ(io::value_function_from_json(io::value_function_to_json(vf)), vf);

   const std::vector< CurvePoint > curve{{10, -1.5}, {20, 0.125}};
   EXPECT_EQ(io::learning_curve_from_json(io::learning_curve_to_json(curve)), curve);
   EXPECT_EQ(io::learning_curve_csv(curve), "step,greedy_gain\n10,-1.5\n20,0.125\n");
}

TEST(IoRoundTrip, TopologyAndPresetFiles) {
   for(const char* name : {"tiny", "small"}) {
      const auto f = io::topology_from_json(io::read_json(kSource / "presets" / (std::string(name) + ".json")));
      EXPECT_EQ(f.topology, cyber::default_topology(name));
      EXPECT_EQ(f.params, cyber::default_params(name));
      const auto back = io::topology_from_json(io::topology_to_json(f.topology, f.params));
      EXPECT_EQ(back.topology, f.topology);
      EXPECT_EQ(back.params, f.params);
   }
   EXPECT_EQ(io::matrix_from_json(io::read_json(kSource / "presets" / "rps.json")), rock_paper_scissors());
   EXPECT_EQ(io::matrix_from_json(io::read_json(kSource / "presets" / "matching_pennies.json")), matching_pennies());
}

TEST(IoErrors, FieldPaths) {
   EXPECT_EQ(config_error_path([] { io::matrix_from_json(Json::parse(R"({"payoff": [[1, 2], [3]]})")); }),
             "payoff[1]");
   EXPECT_EQ(config_error_path([] { io::matrix_from_json(Json::parse(R"({"payoff": [[1]], "extra": 1})")); }),
             "extra");
   EXPECT_EQ(config_error_path([] {
                io::policy_from_json(Json::parse(R"({"player": "red", "states": 1, "actions": 2, "choice": [5]})"));
             }),
             "choice[0]");
   EXPECT_EQ(config_error_path([] { io::mixture_from_json(Json::parse(R"({"value": 0, "blue": [0.5], "red": [1]})")); }),
             "blue");
   EXPECT_EQ(config_error_path([] { io::parse_text("{\"a\": ", "cfg.json"); }), "cfg.json");
   EXPECT_EQ(config_error_path([] {
                io::topology_from_json(Json::parse(R"({"host_count": 1, "subnet_of": [0], "edges": [],
                   "high_value": [0], "exploit_success_prob": [1], "red_entry_host": 0, "params": {"horizn": 3}})"));
             }),
             "params.horizn");
}

TEST(Csv, NumbersUseTwelveSignificantDigits) {
   EXPECT_EQ(io::csv_number(1.0 / 3.0), "0.333333333333");
   EXPECT_EQ(io::csv_number(-2.0), "-2");
   EXPECT_EQ(io::csv_number(1e-20), "1e-20");
}

TEST(Csv, ConvergenceHeader) {
   LoopConfig cfg;
   QLearningConfig q;
   cfg.blue_oracles = {OracleConfig::exact(), OracleConfig::q(q)};
   EXPECT_EQ(io::convergence_csv_header(cfg),
             "iteration,blue_gain_0_exact,blue_gain_1_qlearning,red_gain_0_exact,selected_blue_gain,"
             "selected_red_gain,value,exploitability,new_cells,cumulative_evaluations,epsilon_ptm_blue,"
             "epsilon_ptm_red\n");
}

// ---------------------------------------------------------------------------
// Run configuration

TEST(RunConfig, ParsesAllSections) {
   const auto rc = cli::load_run_config(kSource / "configs" / "tiny_mixed_oracles.json");
   EXPECT_EQ(rc.game, "tiny");
   EXPECT_EQ(rc.loop.seed, 3u);
   ASSERT_EQ(rc.loop.blue_oracles.size(), 2u);
   const auto& q = rc.loop.blue_oracles[1];
   EXPECT_EQ(q.kind, OracleConfig::Kind::kQLearning);
   EXPECT_EQ(q.label(), "q");
   EXPECT_EQ(q.shaping.mode, ShapingConfig::Mode::kEnsemble);
   EXPECT_DOUBLE_EQ(q.shaping.tau, 0.5);
   ASSERT_TRUE(q.ptm.has_value());
   EXPECT_DOUBLE_EQ(q.ptm->decay, 0.9);
   EXPECT_EQ(q.q_learning.step_budget, 30000u);
   EXPECT_TRUE(q.q_learning.checkpoint_evaluator.is_exact());
   for(const char* name : {"rps_exact.json", "tiny_exact.json", "matching_pennies_mc.json"})
      EXPECT_NO_THROW(cli::load_run_config(kSource / "configs" / name)) << name;
}

TEST(RunConfig, UnknownKeysAndBadValuesNameTheirField) {
   auto path_of = [](const char* text) {
      return config_error_path([&] { cli::parse_run_config(Json::parse(text)); });
   };
   EXPECT_EQ(path_of(R"({"game": {"preset": "rps"}, "loops": {}})"), "loops");
   EXPECT_EQ(path_of(R"({"game": {"preset": "rps"}, "loop": {"epsilon": "x"}})"), "loop.epsilon");
   EXPECT_EQ(path_of(R"({"game": {"preset": "chess"}})"), "game.preset");
   EXPECT_EQ(path_of(R"({"game": {"preset": "rps"}, "loop": {"max_iterations": 0}})"), "loop.max_iterations");
   EXPECT_EQ(path_of(R"({"game": {"preset": "rps"}, "red_oracles": [{"kind": "exact"}, {"kind": "magic"}]})"),
             "red_oracles[1].kind");
   EXPECT_EQ(path_of(R"({"game": {"preset": "rps"}, "blue_oracles": [{"kind": "q_learning",
             "q_learning": {"steps": 5}}]})"),
             "blue_oracles[0].q_learning.steps");
   EXPECT_EQ(path_of(R"({"game": {"preset": "rps"}, "blue_oracles": [{"kind": "exact",
             "shaping": {"mode": "ensemble", "gamma_phi": 2}}]})"),
             "blue_oracles[0].shaping");
   EXPECT_EQ(path_of(R"({"loop": {}})"), "game");
}

TEST(RunConfig, EvaluatorSeedDerivesFromBaseSeed) {
   auto rc = cli::parse_run_config(Json::parse(R"({"game": {"preset": "rps"},
      "loop": {"evaluator": {"kind": "monte_carlo", "episodes": 10}}})"));
   cli::apply_seed(rc, 5);
   EXPECT_EQ(rc.loop.evaluator.base_seed, derive_seed(5, hash_string("evaluator")));
   auto fixed = cli::parse_run_config(Json::parse(R"({"game": {"preset": "rps"},
      "loop": {"evaluator": {"kind": "monte_carlo", "episodes": 10, "base_seed": 77}}})"));
   cli::apply_seed(fixed, 5);
   EXPECT_EQ(fixed.loop.evaluator.base_seed, 77u);
}

TEST(LoadPolicy, Specs) {
   const auto g = one_step_matrix_game(rock_paper_scissors());
   EXPECT_EQ(cli::load_policy("action:2", g, Player::kBlue).row(0)[2], 1.0);
   EXPECT_NEAR(cli::load_policy("uniform", g, Player::kRed).row(0)[1], 1.0 / 3.0, 1e-15);
   EXPECT_THROW(cli::load_policy("action:3", g, Player::kBlue), ConfigError);
   EXPECT_THROW(cli::load_policy("action:x", g, Player::kBlue), ConfigError);
   EXPECT_THROW(cli::load_policy("/nonexistent/policy.json", g, Player::kBlue), ConfigError);
}

// ---------------------------------------------------------------------------
// Commands

fs::path write_config(const fs::path& dir, const std::string& text) {
   const auto p = dir / "config.json";
   io::write_text(p, text);
   return p;
}

TEST(CmdRun, WritesArtifactsThatReadBack) {
   const auto dir = scratch_dir("run_artifacts");
   const auto cfg = write_config(dir, R"({"game": {"preset": "rps"}, "seed": 4,
      "initial_policies": {"blue": "action:0", "red": "action:0"}, "output_dir": "out"})");
   std::ostringstream out, err;
   ASSERT_EQ(cli::cmd_run(cfg, {std::nullopt, std::nullopt, true}, out, err), cli::kExitOk) << err.str();
   EXPECT_TRUE(err.str().empty());
   EXPECT_NE(out.str().find("termination: epsilon-rbne"), std::string::npos);
   const auto o = dir / "out";
   for(const char* f : {"convergence.csv", "payoff_matrix.json", "mixtures.json", "trace.json"})
      EXPECT_TRUE(fs::exists(o / f)) << f;

   const auto m = io::mixture_from_json(io::read_json(o / "mixtures.json"));
   ASSERT_EQ(m.blue.size(), 3u);
   for(double w : m.blue) EXPECT_NEAR(w, 1.0 / 3.0, 1e-6);
   const auto a = io::matrix_from_json(io::read_json(o / "payoff_matrix.json"));
   EXPECT_EQ(a.rows(), 3);
   for(const auto& id : m.blue_ids) {
      auto file = id;
      std::replace(file.begin(), file.end(), ':', '_');
      const auto p = io::policy_from_json(io::read_json(o / "policies" / (file + ".json")));
      EXPECT_EQ(p.id(), id);
   }
   // Response value functions are stored for oracle-produced policies.
   EXPECT_TRUE(fs::exists(o / "value_functions" / (m.blue_ids[1] + ".json")));
   // The payoff matrix feeds straight into `solve`.
   std::ostringstream sout, serr;
   EXPECT_EQ(cli::cmd_solve(o / "payoff_matrix.json", {std::nullopt, dir / "solve", true}, sout, serr), 0);
   EXPECT_NE(sout.str().find("value: "), std::string::npos);
   EXPECT_NEAR(io::mixture_from_json(io::read_json(dir / "solve" / "mixture.json")).value, 0.0, 1e-9);

   const auto csv = read_file(o / "convergence.csv");
   EXPECT_EQ(csv.substr(0, csv.find('\n')),
             "iteration,blue_gain_0_exact,red_gain_0_exact,selected_blue_gain,selected_red_gain,value,"
             "exploitability,new_cells,cumulative_evaluations,epsilon_ptm_blue,epsilon_ptm_red");
}

TEST(CmdRun, ExitCodes) {
   const auto dir = scratch_dir("run_exit");
   std::ostringstream out, err;
   const auto capped = write_config(dir, R"({"game": {"preset": "rps"}, "loop": {"max_iterations": 1},
      "initial_policies": {"blue": "action:0", "red": "action:0"}, "output_dir": "capped"})");
   EXPECT_EQ(cli::cmd_run(capped, {std::nullopt, std::nullopt, true}, out, err), cli::kExitMaxIterations);
   EXPECT_NE(out.str().find("max_iterations"), std::string::npos);

   const auto bad = write_config(dir, R"({"game": {"preset": "rps"}, "bogus": 1})");
   err.str("");
   EXPECT_EQ(cli::cmd_run(bad, {}, out, err), cli::kExitError);
   EXPECT_NE(err.str().find("bogus"), std::string::npos);
   EXPECT_EQ(cli::cmd_run(dir / "missing.json", {}, out, err), cli::kExitError);
}

TEST(CmdRun, DeterministicOutputsAndSeedOverride) {
   const auto dir = scratch_dir("run_determinism");
   const auto cfg = write_config(dir, R"({"game": {"preset": "matching_pennies"}, "seed": 1,
      "loop": {"epsilon": 0.0, "max_iterations": 4, "evaluator": {"kind": "monte_carlo", "episodes": 300}},
      "blue_oracles": [{"kind": "exact"}, {"kind": "random"}]})");
   std::ostringstream out, err;
   cli::cmd_run(cfg, {std::nullopt, dir / "a", true}, out, err);
   cli::cmd_run(cfg, {std::nullopt, dir / "b", true}, out, err);
   cli::cmd_run(cfg, {std::uint64_t{2}, dir / "c", true}, out, err);
   for(const char* f : {"convergence.csv", "mixtures.json", "trace.json", "payoff_matrix.json"}) {
      EXPECT_EQ(read_file(dir / "a" / f), read_file(dir / "b" / f)) << f;
   }
   EXPECT_NE(read_file(dir / "a" / "trace.json"), read_file(dir / "c" / "trace.json"));
}

TEST(CmdSolve, PrintsValueMixturesAndSupportGains) {
   const auto dir = scratch_dir("solve");
   io::write_json(dir / "m.json", io::matrix_to_json((PayoffMatrix(2, 2) << 3, 0, 1, 2).finished()));
   std::ostringstream out, err;
   ASSERT_EQ(cli::cmd_solve(dir / "m.json", {std::nullopt, dir, true}, out, err), 0) << err.str();
   EXPECT_EQ(out.str(),
             "value: 1.5\nblue_mixture: 0.25 0.75\nred_mixture: 0.5 0.5\n"
             "blue_support_gains: 0=1.5 1=1.5\nred_support_gains: 0=-1.5 1=-1.5\n");
   io::write_text(dir / "bad.json", R"({"payoff": [[1, 2], [3]]})");
   EXPECT_EQ(cli::cmd_solve(dir / "bad.json", {std::nullopt, dir, true}, out, err), 1);
   EXPECT_NE(err.str().find("payoff[1]"), std::string::npos);
}

TEST(CmdPrune, StrictAndNothingRemoved) {
   const auto dir = scratch_dir("prune");
   io::write_json(dir / "m.json", io::matrix_to_json((PayoffMatrix(3, 2) << 1, 2, 0, 3, -1, -1).finished()));
   std::ostringstream out, err;
   ASSERT_EQ(cli::cmd_prune(dir / "m.json", "strict", {std::nullopt, dir, true}, out, err), 0) << err.str();
   EXPECT_NE(out.str().find("removal order: blue:2 red:1 blue:1"), std::string::npos) << out.str();
   EXPECT_NE(out.str().find("reduced: 1x1"), std::string::npos);
   EXPECT_NE(out.str().find("value_difference: 0"), std::string::npos);
   const auto reduced = io::read_json(dir / "reduced_matrix.json");
   EXPECT_EQ(reduced["blue_kept"], Json::array({0}));

   std::ostringstream out2;
   io::write_json(dir / "rps.json", io::matrix_to_json(rock_paper_scissors()));
   ASSERT_EQ(cli::cmd_prune(dir / "rps.json", "weak", {std::nullopt, dir, true}, out2, err), 0);
   EXPECT_NE(out2.str().find("no strategies removed"), std::string::npos);
   EXPECT_EQ(cli::cmd_prune(dir / "rps.json", "sideways", {std::nullopt, dir, true}, out2, err), 1);
}

TEST(CmdEval, ExactAndMonteCarlo) {
   cli::EvalOptions eo{"rps", "action:1", "action:0", "exact", 100};
   std::ostringstream out, err;
   ASSERT_EQ(cli::cmd_eval(eo, {}, out, err), 0) << err.str();
   EXPECT_EQ(out.str(), "mean_gain_blue: 1\nmean_gain_red: -1\n");
   eo.evaluator = "monte_carlo";
   eo.blue = "uniform";
   std::ostringstream a, b;
   cli::cmd_eval(eo, {std::uint64_t{3}, std::nullopt, true}, a, err);
   cli::cmd_eval(eo, {std::uint64_t{3}, std::nullopt, true}, b, err);
   EXPECT_EQ(a.str(), b.str());
   EXPECT_NE(a.str().find("episodes: 100"), std::string::npos);
   eo.game = "nowhere.json";
   EXPECT_EQ(cli::cmd_eval(eo, {}, out, err), 1);
}

// The installed binary honours the same exit-code contract.
int run_binary(const std::string& args) {
   const int status = std::system((std::string(MRO_CLI_PATH) + " " + args + " >/dev/null 2>&1").c_str());
   return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(CliBinary, ExitCodes) {
   const auto dir = scratch_dir("binary");
   EXPECT_EQ(run_binary("--quiet --output-dir " + (dir / "ok").string() + " run " +
                        (kSource / "configs" / "rps_exact.json").string()),
             0);
   EXPECT_TRUE(fs::exists(dir / "ok" / "convergence.csv"));
   const auto capped = write_config(dir, R"({"game": {"preset": "rps"}, "loop": {"max_iterations": 1},
      "initial_policies": {"blue": "action:0", "red": "action:0"}})");
   EXPECT_EQ(run_binary("run " + capped.string() + " --quiet --output-dir " + (dir / "capped").string()), 2);
   EXPECT_EQ(run_binary("run /nonexistent.json"), 1);
   EXPECT_EQ(run_binary("frobnicate"), 1);
   EXPECT_EQ(run_binary("solve " + (kSource / "presets" / "rps.json").string() + " --output-dir " + dir.string()), 0);
   EXPECT_EQ(run_binary("eval --game tiny --blue uniform --red action:0"), 0);
   EXPECT_EQ(run_binary("prune " + (kSource / "presets" / "rps.json").string() + " --mode weak --output-dir " +
                        dir.string()),
             0);
}

}  // namespace
}  // namespace mro
