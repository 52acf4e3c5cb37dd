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

// JSON file formats and CSV writers. Every reader rejects unknown keys and
// reports the offending field path. Doubles are written in shortest
// round-trip form, so write -> read reproduces the in-memory values exactly.
// The schemas are documented in docs/formats.md.

#ifndef MRO_IO_HPP
#define MRO_IO_HPP

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "mro/core.hpp"
#include "mro/cyber_env.hpp"
#include "mro/empirical_game.hpp"
#include "mro/markov_game.hpp"
#include "mro/mro_loop.hpp"
#include "mro/policy.hpp"
#include "mro/q_learning.hpp"
#include "mro/zero_sum.hpp"

namespace mro::io {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Field access with path-qualified diagnostics

inline void expect_keys(const Json& j, const std::string& path, std::initializer_list< const char* > allowed) {
   if(!j.is_object()) throw ConfigError(path.empty() ? "<root>" : path, "expected an object");
   std::set< std::string > ok(allowed.begin(), allowed.end());
   for(const auto& [key, _] : j.items())
      if(!ok.count(key)) throw ConfigError(path.empty() ? key : path + "." + key, "unknown key");
}

inline std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

inline const Json& require(const Json& j, const std::string& path, const char* key) {
   if(!j.contains(key)) throw ConfigError(join(path, key), "missing required field");
   return j.at(key);
}

template < typename T >
T as(const Json& j, const std::string& path) {
   try {
      return j.get< T >();
   } catch(const nlohmann::json::exception&) {
      throw ConfigError(path, "has the wrong type");
   }
}

inline double as_number(const Json& j, const std::string& path) {
   if(!j.is_number()) throw ConfigError(path, "expected a number");
   return j.get< double >();
}

inline std::size_t as_index(const Json& j, const std::string& path) {
   if(!j.is_number_unsigned() && !(j.is_number_integer() && j.get< long long >() >= 0))
      throw ConfigError(path, "expected a nonnegative integer");
   return j.get< std::size_t >();
}

inline std::vector< double > as_vector(const Json& j, const std::string& path) {
   if(!j.is_array()) throw ConfigError(path, "expected an array");
   std::vector< double > out;
   for(std::size_t i = 0; i < j.size(); ++i) out.push_back(as_number(j[i], path + "[" + std::to_string(i) + "]"));
   return out;
}

inline std::vector< std::size_t > as_index_vector(const Json& j, const std::string& path) {
   if(!j.is_array()) throw ConfigError(path, "expected an array");
   std::vector< std::size_t > out;
   for(std::size_t i = 0; i < j.size(); ++i) out.push_back(as_index(j[i], path + "[" + std::to_string(i) + "]"));
   return out;
}

// ---------------------------------------------------------------------------
// Files

inline Json parse_text(const std::string& text, const std::string& source) {
   try {
      return Json::parse(text);
   } catch(const nlohmann::json::parse_error& e) {
      throw ConfigError(source, std::string("malformed JSON (") + e.what() + ")");
   }
}

inline Json read_json(const std::filesystem::path& path) {
   std::ifstream in(path);
   if(!in) throw ConfigError(path.string(), "cannot open file");
   std::stringstream ss;
   ss << in.rdbuf();
   return parse_text(ss.str(), path.string());
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
   if(path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
   std::ofstream out(path, std::ios::binary);
   if(!out) throw Error("cannot write " + path.string());
   out << text;
   if(!out) throw Error("failed writing " + path.string());
}

inline void write_json(const std::filesystem::path& path, const Json& j) { write_text(path, j.dump(1) + "\n"); }

// 12 significant digits, as used in every CSV.
inline std::string csv_number(double x) {
   char buf[32];
   std::snprintf(buf, sizeof buf, "%.12g", x);
   return buf;
}

// ---------------------------------------------------------------------------
// Payoff matrix: {"payoff": [[...], ...], "std_error": [[...], ...]?}

inline Json matrix_rows(const PayoffMatrix& a) {
   Json rows = Json::array();
   for(Eigen::Index i = 0; i < a.rows(); ++i) {
      Json row = Json::array();
      for(Eigen::Index j = 0; j < a.cols(); ++j) row.push_back(a(i, j));
      rows.push_back(std::move(row));
   }
   return rows;
}

inline PayoffMatrix parse_rows(const Json& j, const std::string& path) {
   if(!j.is_array() || j.empty()) throw ConfigError(path, "expected a nonempty array of rows");
   const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
   if(cols == 0) throw ConfigError(path + "[0]", "expected a nonempty row");
   PayoffMatrix a(static_cast< Eigen::Index >(j.size()), static_cast< Eigen::Index >(cols));
   for(std::size_t i = 0; i < j.size(); ++i) {
      const std::string rp = path + "[" + std::to_string(i) + "]";
      if(!j[i].is_array()) throw ConfigError(rp, "expected a row array");
      if(j[i].size() != cols)
         throw ConfigError(rp, "has " + std::to_string(j[i].size()) + " entries, expected " + std::to_string(cols));
      for(std::size_t k = 0; k < cols; ++k)
         a(static_cast< Eigen::Index >(i), static_cast< Eigen::Index >(k))
            = as_number(j[i][k], rp + "[" + std::to_string(k) + "]");
   }
   return a;
}

inline Json matrix_to_json(const PayoffMatrix& payoff, const PayoffMatrix* std_error = nullptr) {
   Json j;
   j["payoff"] = matrix_rows(payoff);
   if(std_error) j["std_error"] = matrix_rows(*std_error);
   return j;
}

inline PayoffMatrix matrix_from_json(const Json& j) {
   expect_keys(j, "", {"payoff", "std_error", "blue_ids", "red_ids"});
   return parse_rows(require(j, "", "payoff"), "payoff");
}

inline Json empirical_game_to_json(const EmpiricalGame& eg) {
   Json j = matrix_to_json(eg.payoff, &eg.std_error);
   Json b = Json::array(), r = Json::array();
   for(const auto& e : eg.blue_registry) b.push_back(e.policy.id());
   for(const auto& e : eg.red_registry) r.push_back(e.policy.id());
   j["blue_ids"] = b;
   j["red_ids"] = r;
   return j;
}

// ---------------------------------------------------------------------------
// Mixtures: {"value": v, "blue": [...], "red": [...], "blue_ids"?: [...], "red_ids"?: [...]}

struct MixtureFile {
   double value = 0.0;
   std::vector< double > blue;
   std::vector< double > red;
   std::vector< std::string > blue_ids;
   std::vector< std::string > red_ids;

   bool operator==(const MixtureFile&) const = default;
};

inline Json mixture_to_json(const MixtureFile& m) {
   Json j;
   j["value"] = m.value;
   j["blue"] = m.blue;
   j["red"] = m.red;
   if(!m.blue_ids.empty()) j["blue_ids"] = m.blue_ids;
   if(!m.red_ids.empty()) j["red_ids"] = m.red_ids;
   return j;
}

inline MixtureFile mixture_from_json(const Json& j) {
   expect_keys(j, "", {"value", "blue", "red", "blue_ids", "red_ids"});
   MixtureFile m;
   m.value = as_number(require(j, "", "value"), "value");
   m.blue = as_vector(require(j, "", "blue"), "blue");
   m.red = as_vector(require(j, "", "red"), "red");
   if(j.contains("blue_ids")) m.blue_ids = as< std::vector< std::string > >(j["blue_ids"], "blue_ids");
   if(j.contains("red_ids")) m.red_ids = as< std::vector< std::string > >(j["red_ids"], "red_ids");
   try {
      Mixture(Player::kBlue, m.blue);
   } catch(const Error& e) {
      throw ConfigError("blue", e.what());
   }
   try {
      Mixture(Player::kRed, m.red);
   } catch(const Error& e) {
      throw ConfigError("red", e.what());
   }
   return m;
}

inline MixtureFile mixture_file(const SolveResult& sol, const EmpiricalGame* eg = nullptr) {
   MixtureFile m{sol.value, {sol.blue.weights().begin(), sol.blue.weights().end()},
                 {sol.red.weights().begin(), sol.red.weights().end()}, {}, {}};
   if(eg) {
      for(const auto& e : eg->blue_registry) m.blue_ids.push_back(e.policy.id());
      for(const auto& e : eg->red_registry) m.red_ids.push_back(e.policy.id());
   }
   return m;
}

// ---------------------------------------------------------------------------
// Policies. Deterministic tables are written as one action per state.

inline Json policy_to_json(const TabularPolicy& p) {
   Json j;
   const auto& md = p.metadata();
   j["player"] = to_string(p.player());
   j["id"] = md.id;
   j["oracle"] = md.oracle;
   j["iteration"] = md.iteration;
   j["ptm_initialized"] = md.ptm_initialized;
   j["shaped"] = md.shaped;
   j["states"] = p.state_count();
   j["actions"] = p.action_count();
   if(p.is_deterministic()) {
      Json choice = Json::array();
      for(std::size_t s = 0; s < p.state_count(); ++s) {
         const auto row = p.row(s);
         choice.push_back(static_cast< std::size_t >(std::find(row.begin(), row.end(), 1.0) - row.begin()));
      }
      j["choice"] = std::move(choice);
   } else {
      Json table = Json::array();
      for(std::size_t s = 0; s < p.state_count(); ++s) {
         const auto row = p.row(s);
         table.push_back(std::vector< double >(row.begin(), row.end()));
      }
      j["table"] = std::move(table);
   }
   return j;
}

inline TabularPolicy policy_from_json(const Json& j) {
   expect_keys(j, "",
               {"player", "id", "oracle", "iteration", "ptm_initialized", "shaped", "states", "actions", "choice",
                "table"});
   const auto player_name = as< std::string >(require(j, "", "player"), "player");
   Player player;
   try {
      player = player_from_string(player_name);
   } catch(const Error&) {
      throw ConfigError("player", "must be \"blue\" or \"red\"");
   }
   PolicyMetadata md;
   if(j.contains("id")) md.id = as< std::string >(j["id"], "id");
   if(j.contains("oracle")) md.oracle = as< std::string >(j["oracle"], "oracle");
   if(j.contains("iteration")) md.iteration = as< int >(j["iteration"], "iteration");
   if(j.contains("ptm_initialized")) md.ptm_initialized = as< bool >(j["ptm_initialized"], "ptm_initialized");
   if(j.contains("shaped")) md.shaped = as< bool >(j["shaped"], "shaped");
   const std::size_t states = as_index(require(j, "", "states"), "states");
   const std::size_t actions = as_index(require(j, "", "actions"), "actions");
   if(j.contains("choice") == j.contains("table")) throw ConfigError("choice", "exactly one of choice/table is required");
   try {
      if(j.contains("choice")) {
         const auto choice = as_index_vector(j["choice"], "choice");
         if(choice.size() != states)
            throw ConfigError("choice", "has " + std::to_string(choice.size()) + " entries, expected "
                                           + std::to_string(states));
         for(std::size_t s = 0; s < states; ++s)
            if(choice[s] >= actions) throw ConfigError("choice[" + std::to_string(s) + "]", "action out of range");
         return TabularPolicy::deterministic(player, actions, choice, md);
      }
      const auto& t = j["table"];
      if(!t.is_array() || t.size() != states) throw ConfigError("table", "expected one row per state");
      std::vector< double > flat;
      for(std::size_t s = 0; s < states; ++s) {
         auto row = as_vector(t[s], "table[" + std::to_string(s) + "]");
         if(row.size() != actions) throw ConfigError("table[" + std::to_string(s) + "]", "expected one entry per action");
         flat.insert(flat.end(), row.begin(), row.end());
      }
      return TabularPolicy(player, states, actions, std::move(flat), md);
   } catch(const ConfigError&) {
      throw;
   } catch(const Error& e) {
      throw ConfigError("table", e.what());
   }
}

// ---------------------------------------------------------------------------
// Value functions: {"oracle": ..., "iteration": ..., "values": [...]}

inline Json value_function_to_json(const ValueFunctionTable& vf) {
   Json j;
   j["oracle"] = vf.origin.oracle;
   j["iteration"] = vf.origin.iteration;
   j["values"] = vf.values;
   return j;
}

inline ValueFunctionTable value_function_from_json(const Json& j) {
   expect_keys(j, "", {"oracle", "iteration", "values"});
   ValueFunctionTable vf;
   if(j.contains("oracle")) vf.origin.oracle = as< std::string >(j["oracle"], "oracle");
   if(j.contains("iteration")) vf.origin.iteration = as< int >(j["iteration"], "iteration");
   vf.values = as_vector(require(j, "", "values"), "values");
   return vf;
}

// ---------------------------------------------------------------------------
// Markov games. Each transition is [state, blue_action, red_action, next, p, reward].

inline Json game_to_json(const MarkovGame& g) {
   Json j;
   j["states"] = g.state_count();
   j["blue_actions"] = g.action_count(Player::kBlue);
   j["red_actions"] = g.action_count(Player::kRed);
   j["discount"] = g.discount();
   if(g.horizon().is_finite()) j["horizon"] = g.horizon().steps();
   else j["horizon"] = "discounted_infinite";
   j["discount_evaluation"] = g.discount_evaluation();
   j["initial"] = std::vector< double >(g.initial_distribution().begin(), g.initial_distribution().end());
   Json t = Json::array();
   for(std::size_t s = 0; s < g.state_count(); ++s)
      for(std::size_t a = 0; a < g.action_count(Player::kBlue); ++a)
         for(std::size_t b = 0; b < g.action_count(Player::kRed); ++b)
            for(const auto& o : g.outcomes(s, a, b)) t.push_back(Json::array({s, a, b, o.next, o.probability, o.reward}));
   j["transitions"] = std::move(t);
   return j;
}

inline MarkovGame game_from_json(const Json& j) {
   expect_keys(j, "",
               {"states", "blue_actions", "red_actions", "discount", "horizon", "discount_evaluation", "initial",
                "transitions"});
   const std::size_t n = as_index(require(j, "", "states"), "states");
   const std::size_t nb = as_index(require(j, "", "blue_actions"), "blue_actions");
   const std::size_t nr = as_index(require(j, "", "red_actions"), "red_actions");
   MarkovGame::Builder b(n, nb, nr);
   if(j.contains("discount")) b.discount(as_number(j["discount"], "discount"));
   if(j.contains("horizon")) {
      const auto& h = j["horizon"];
      if(h.is_string()) {
         if(h.get< std::string >() != "discounted_infinite")
            throw ConfigError("horizon", "must be a step count or \"discounted_infinite\"");
         b.horizon(Horizon::discounted_infinite());
      } else {
         b.horizon(Horizon::finite(as_index(h, "horizon")));
      }
   }
   if(j.contains("discount_evaluation")) b.discount_evaluation(as< bool >(j["discount_evaluation"], "discount_evaluation"));
   if(j.contains("initial")) b.initial(as_vector(j["initial"], "initial"));
   const auto& t = require(j, "", "transitions");
   if(!t.is_array()) throw ConfigError("transitions", "expected an array");
   for(std::size_t i = 0; i < t.size(); ++i) {
      const std::string p = "transitions[" + std::to_string(i) + "]";
      if(!t[i].is_array() || (t[i].size() != 5 && t[i].size() != 6))
         throw ConfigError(p, "expected [state, blue_action, red_action, next, probability, reward?]");
      b.transition(as_index(t[i][0], p + "[0]"), as_index(t[i][1], p + "[1]"), as_index(t[i][2], p + "[2]"),
                   as_index(t[i][3], p + "[3]"), as_number(t[i][4], p + "[4]"),
                   t[i].size() == 6 ? as_number(t[i][5], p + "[5]") : 0.0);
   }
   return std::move(b).build();
}

// ---------------------------------------------------------------------------
// Cyber topologies: topology fields plus an optional "params" section.

struct TopologyFile {
   cyber::NetworkTopology topology;
   cyber::CyberParams params;
};

inline Json topology_to_json(const cyber::NetworkTopology& t, const cyber::CyberParams& p) {
   Json j;
   j["host_count"] = t.host_count;
   j["subnet_of"] = t.subnet_of;
   Json edges = Json::array();
   for(const auto& [a, b] : t.edges) edges.push_back(Json::array({a, b}));
   j["edges"] = std::move(edges);
   j["high_value"] = t.high_value;
   j["exploit_success_prob"] = t.exploit_success_prob;
   j["red_entry_host"] = t.red_entry_host;
   Json params;
   params["horizon"] = p.horizon;
   params["discount"] = p.discount;
   params["impact_penalty"] = p.impact_penalty;
   params["restore_cost"] = p.restore_cost;
   params["decoy_bonus"] = p.decoy_bonus;
   params["state_cap"] = p.state_cap;
   j["params"] = std::move(params);
   return j;
}

inline TopologyFile topology_from_json(const Json& j) {
   expect_keys(j, "",
               {"host_count", "subnet_of", "edges", "high_value", "exploit_success_prob", "red_entry_host", "params",
                "description"});
   TopologyFile f;
   auto& t = f.topology;
   t.host_count = as_index(require(j, "", "host_count"), "host_count");
   for(std::size_t i = 0; const auto& s : require(j, "", "subnet_of")) {
      if(!s.is_number_integer()) throw ConfigError("subnet_of[" + std::to_string(i) + "]", "expected an integer");
      t.subnet_of.push_back(s.get< int >());
      ++i;
   }
   const auto& edges = require(j, "", "edges");
   if(!edges.is_array()) throw ConfigError("edges", "expected an array");
   for(std::size_t i = 0; i < edges.size(); ++i) {
      const std::string p = "edges[" + std::to_string(i) + "]";
      if(!edges[i].is_array() || edges[i].size() != 2) throw ConfigError(p, "expected [from, to]");
      t.edges.emplace_back(as_index(edges[i][0], p + "[0]"), as_index(edges[i][1], p + "[1]"));
   }
   t.high_value = as_index_vector(require(j, "", "high_value"), "high_value");
   t.exploit_success_prob = as_vector(require(j, "", "exploit_success_prob"), "exploit_success_prob");
   t.red_entry_host = as_index(require(j, "", "red_entry_host"), "red_entry_host");
   if(j.contains("params")) {
      const auto& p = j["params"];
      expect_keys(p, "params", {"horizon", "discount", "impact_penalty", "restore_cost", "decoy_bonus", "state_cap"});
      if(p.contains("horizon")) f.params.horizon = as_index(p["horizon"], "params.horizon");
      if(p.contains("discount")) f.params.discount = as_number(p["discount"], "params.discount");
      if(p.contains("impact_penalty")) f.params.impact_penalty = as_number(p["impact_penalty"], "params.impact_penalty");
      if(p.contains("restore_cost")) f.params.restore_cost = as_number(p["restore_cost"], "params.restore_cost");
      if(p.contains("decoy_bonus")) f.params.decoy_bonus = as_number(p["decoy_bonus"], "params.decoy_bonus");
      if(p.contains("state_cap")) f.params.state_cap = as_index(p["state_cap"], "params.state_cap");
   }
   try {
      t.validate();
   } catch(const Error& e) {
      throw ConfigError("topology", e.what());
   }
   return f;
}

// ---------------------------------------------------------------------------
// Learning curves

inline std::string learning_curve_csv(const std::vector< CurvePoint >& curve) {
   std::string out = "step,greedy_gain\n";
   for(const auto& p : curve) out += std::to_string(p.step) + "," + csv_number(p.greedy_gain) + "\n";
   return out;
}

inline Json learning_curve_to_json(const std::vector< CurvePoint >& curve) {
   Json j = Json::array();
   for(const auto& p : curve) j.push_back(Json::array({p.step, p.greedy_gain}));
   return j;
}

inline std::vector< CurvePoint > learning_curve_from_json(const Json& j) {
   if(!j.is_array()) throw ConfigError("<root>", "expected an array of [step, gain] pairs");
   std::vector< CurvePoint > out;
   for(std::size_t i = 0; i < j.size(); ++i) {
      const std::string p = "[" + std::to_string(i) + "]";
      if(!j[i].is_array() || j[i].size() != 2) throw ConfigError(p, "expected [step, gain]");
      out.push_back({as_index(j[i][0], p + "[0]"), as_number(j[i][1], p + "[1]")});
   }
   return out;
}

// ---------------------------------------------------------------------------
// Convergence CSV. Columns, in order:
//   iteration, blue_gain_<k>_<oracle> per Blue oracle, red_gain_<k>_<oracle>
//   per Red oracle, selected_blue_gain, selected_red_gain, value,
//   exploitability, new_cells, cumulative_evaluations, epsilon_ptm_blue,
//   epsilon_ptm_red
// PTM columns are empty when that player has no sampler.

inline std::string convergence_csv_header(const LoopConfig& cfg) {
   std::string h = "iteration";
   for(std::size_t k = 0; k < cfg.blue_oracles.size(); ++k)
      h += ",blue_gain_" + std::to_string(k) + "_" + cfg.blue_oracles[k].label();
   for(std::size_t k = 0; k < cfg.red_oracles.size(); ++k)
      h += ",red_gain_" + std::to_string(k) + "_" + cfg.red_oracles[k].label();
   h += ",selected_blue_gain,selected_red_gain,value,exploitability,new_cells,cumulative_evaluations,"
        "epsilon_ptm_blue,epsilon_ptm_red\n";
   return h;
}

inline std::string convergence_csv_row(const IterationRecord& r) {
   std::string row = std::to_string(r.iteration);
   for(const auto& o : r.blue) row += "," + csv_number(o.gain);
   for(const auto& o : r.red) row += "," + csv_number(o.gain);
   row += "," + csv_number(r.best_gain_blue) + "," + csv_number(r.best_gain_red) + "," + csv_number(r.value) + ","
          + csv_number(r.exploitability) + "," + std::to_string(r.new_cells) + ","
          + std::to_string(r.cumulative_evaluations) + ","
          + (r.epsilon_ptm_blue ? csv_number(*r.epsilon_ptm_blue) : "") + ","
          + (r.epsilon_ptm_red ? csv_number(*r.epsilon_ptm_red) : "") + "\n";
   return row;
}

inline std::string convergence_csv(const LoopConfig& cfg, const std::vector< IterationRecord >& records) {
   std::string out = convergence_csv_header(cfg);
   for(const auto& r : records) out += convergence_csv_row(r);
   return out;
}

// ---------------------------------------------------------------------------
// Full trace (records, termination, final game and mixtures).

inline Json record_to_json(const IterationRecord& r) {
   auto outcomes = [](const std::vector< OracleOutcome >& v) {
      Json a = Json::array();
      for(const auto& o : v) {
         Json x;
         x["oracle"] = o.oracle;
         x["policy_id"] = o.policy_id;
         x["gain"] = o.gain;
         x["std_error"] = o.std_error;
         x["ptm_choice"] = o.ptm_choice;
         x["added"] = o.added;
         a.push_back(std::move(x));
      }
      return a;
   };
   auto opt = [](const std::optional< double >& x) { return x ? Json(*x) : Json(nullptr); };
   Json j;
   j["iteration"] = r.iteration;
   j["blue"] = outcomes(r.blue);
   j["red"] = outcomes(r.red);
   j["best_blue"] = r.best_blue;
   j["best_red"] = r.best_red;
   j["best_gain_blue"] = r.best_gain_blue;
   j["best_gain_red"] = r.best_gain_red;
   j["value"] = r.value;
   j["exploitability"] = r.exploitability;
   j["threshold"] = r.threshold;
   j["blue_mixture"] = r.blue_mixture;
   j["red_mixture"] = r.red_mixture;
   j["new_cells"] = r.new_cells;
   j["predicted_cells"] = r.predicted_cells;
   j["cumulative_evaluations"] = r.cumulative_evaluations;
   j["added_blue"] = r.added_blue;
   j["added_red"] = r.added_red;
   j["value_after"] = opt(r.value_after);
   j["value_red_only"] = opt(r.value_red_only);
   j["value_blue_only"] = opt(r.value_blue_only);
   j["epsilon_ptm_blue"] = opt(r.epsilon_ptm_blue);
   j["epsilon_ptm_red"] = opt(r.epsilon_ptm_red);
   return j;
}

inline Json trace_to_json(const RunTrace& t) {
   Json j;
   j["termination"] = to_string(t.reason);
   Json recs = Json::array();
   for(const auto& r : t.records) recs.push_back(record_to_json(r));
   j["records"] = std::move(recs);
   j["empirical_game"] = empirical_game_to_json(t.game);
   j["mixtures"] = mixture_to_json(mixture_file(t.solution, &t.game));
   return j;
}

}  // namespace mro::io

#endif  // MRO_IO_HPP
