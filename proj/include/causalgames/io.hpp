#pragma once

#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "causalgames/bayesian.hpp"
#include "causalgames/decision.hpp"
#include "causalgames/games.hpp"
#include "causalgames/model.hpp"
#include "causalgames/sim.hpp"
#include "causalgames/types.hpp"

namespace causalgames {
namespace io {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;  // outputs keep authored field order

namespace detail {

// Structural demands on input JSON. `where` names the offending node
// (file path plus field trail) so errors point at the problem.
inline void expect_object(const json& j, const std::string& where) {
  if (!j.is_object()) throw ParseError(where + ": expected an object");
}

inline void expect_array(const json& j, const std::string& where) {
  if (!j.is_array()) throw ParseError(where + ": expected an array");
}

inline std::string expect_string(const json& j, const std::string& where) {
  if (!j.is_string()) throw ParseError(where + ": expected a string");
  return j.get<std::string>();
}

inline double expect_number(const json& j, const std::string& where) {
  if (!j.is_number()) throw ParseError(where + ": expected a number");
  return j.get<double>();
}

inline long long expect_integer(const json& j, const std::string& where) {
  if (!j.is_number_integer()) throw ParseError(where + ": expected an integer");
  return j.get<long long>();
}

inline const json& require(const json& j, const std::string& where, const char* field) {
  auto it = j.find(field);
  if (it == j.end()) {
    throw ParseError(where + ": missing field '" + std::string(field) + "'");
  }
  return *it;
}

inline void reject_unknown(const json& j, const std::string& where,
                           std::initializer_list<const char*> allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* field : allowed) {
      if (it.key() == field) {
        known = true;
        break;
      }
    }
    if (!known) throw ParseError(where + ": unknown field '" + it.key() + "'");
  }
}

inline std::string element(const std::string& where, const char* field, std::size_t index) {
  std::ostringstream out;
  out << where << ": " << field << "[" << index << "]";
  return out.str();
}

}  // namespace detail

inline json parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  try {
    return json::parse(in);
  } catch (const json::parse_error& err) {
    throw ParseError(path + ": " + err.what());
  }
}

// Builds a model from its JSON form: `variables` (name + domain, in order),
// `edges` ([parent, child] pairs; a child's parents keep edge order), `cpts`
// (per variable, rows of {given, dist}). Structural problems — wrong shapes,
// names that do not exist, values outside a domain, duplicate rows — are
// ParseErrors; semantic ones (row sums, cycles, missing rows) are left for
// validate() so they surface as domain violations, not parse failures.
inline CausalModel parse_model(const json& j, const std::string& where) {
  detail::expect_object(j, where);
  detail::reject_unknown(j, where, {"variables", "edges", "cpts"});

  std::vector<Variable> variables;
  std::map<std::string, std::size_t> index;
  const json& jvars = detail::require(j, where, "variables");
  detail::expect_array(jvars, where + ": variables");
  for (std::size_t k = 0; k < jvars.size(); ++k) {
    std::string at = detail::element(where, "variables", k);
    const json& jvar = jvars[k];
    detail::expect_object(jvar, at);
    detail::reject_unknown(jvar, at, {"name", "domain"});
    Variable v;
    v.name = detail::expect_string(detail::require(jvar, at, "name"), at + ".name");
    const json& jdomain = detail::require(jvar, at, "domain");
    detail::expect_array(jdomain, at + ".domain");
    for (std::size_t d = 0; d < jdomain.size(); ++d) {
      std::ostringstream slot;
      slot << at << ".domain[" << d << "]";
      v.domain.push_back(detail::expect_string(jdomain[d], slot.str()));
    }
    if (!index.count(v.name)) index.emplace(v.name, k);
    variables.push_back(std::move(v));
  }
  auto known = [&](const std::string& name, const std::string& at) -> const Variable& {
    auto it = index.find(name);
    if (it == index.end()) throw ParseError(at + ": unknown variable '" + name + "'");
    return variables[it->second];
  };

  std::map<std::string, std::vector<std::string>> parents;
  const json& jedges = detail::require(j, where, "edges");
  detail::expect_array(jedges, where + ": edges");
  for (std::size_t k = 0; k < jedges.size(); ++k) {
    std::string at = detail::element(where, "edges", k);
    const json& jedge = jedges[k];
    if (!jedge.is_array() || jedge.size() != 2) {
      throw ParseError(at + ": expected a [parent, child] pair");
    }
    std::string parent = detail::expect_string(jedge[0], at + "[0]");
    std::string child = detail::expect_string(jedge[1], at + "[1]");
    known(parent, at);
    known(child, at);
    parents[child].push_back(parent);
  }

  std::map<std::string, CausalModel::CptRows> cpts;
  const json& jcpts = detail::require(j, where, "cpts");
  detail::expect_object(jcpts, where + ": cpts");
  for (auto it = jcpts.begin(); it != jcpts.end(); ++it) {
    std::string at = where + ": cpts." + it.key();
    const Variable& var = known(it.key(), at);
    static const std::vector<std::string> no_parents;
    const std::vector<std::string>& parent_names =
        parents.count(it.key()) ? parents.at(it.key()) : no_parents;

    std::size_t expected = 1;
    for (const auto& p : parent_names) expected *= known(p, at).domain.size();
    CausalModel::CptRows rows(expected);

    detail::expect_array(*it, at);
    for (std::size_t r = 0; r < it->size(); ++r) {
      std::ostringstream slot;
      slot << at << "[" << r << "]";
      const json& jrow = (*it)[r];
      detail::expect_object(jrow, slot.str());
      detail::reject_unknown(jrow, slot.str(), {"given", "dist"});

      const json& jgiven = detail::require(jrow, slot.str(), "given");
      detail::expect_object(jgiven, slot.str() + ".given");
      if (jgiven.size() != parent_names.size()) {
        throw ParseError(slot.str() + ".given: must assign exactly the parents of '" +
                         it.key() + "'");
      }
      std::size_t row_index = 0;
      for (const auto& pname : parent_names) {
        auto pit = jgiven.find(pname);
        if (pit == jgiven.end()) {
          throw ParseError(slot.str() + ".given: missing parent '" + pname + "'");
        }
        const Variable& pvar = known(pname, slot.str());
        std::string value = detail::expect_string(*pit, slot.str() + ".given." + pname);
        auto vit = std::find(pvar.domain.begin(), pvar.domain.end(), value);
        if (vit == pvar.domain.end()) {
          throw ParseError(slot.str() + ".given: value '" + value +
                           "' is not in the domain of '" + pname + "'");
        }
        row_index = row_index * pvar.domain.size() +
                    static_cast<std::size_t>(vit - pvar.domain.begin());
      }
      if (!rows[row_index].empty()) {
        throw ParseError(slot.str() + ": duplicate CPT row for the same parent assignment");
      }

      const json& jdist = detail::require(jrow, slot.str(), "dist");
      detail::expect_object(jdist, slot.str() + ".dist");
      std::vector<double> row(var.domain.size(), 0.0);  // omitted values mean 0
      for (auto dit = jdist.begin(); dit != jdist.end(); ++dit) {
        auto vit = std::find(var.domain.begin(), var.domain.end(), dit.key());
        if (vit == var.domain.end()) {
          throw ParseError(slot.str() + ".dist: value '" + dit.key() +
                           "' is not in the domain of '" + it.key() + "'");
        }
        row[static_cast<std::size_t>(vit - var.domain.begin())] =
            detail::expect_number(*dit, slot.str() + ".dist." + dit.key());
      }
      rows[row_index] = std::move(row);
    }
    cpts[it.key()] = std::move(rows);
  }

  return CausalModel(std::move(variables), parents, std::move(cpts));
}

inline CausalModel load_model_file(const std::string& path) {
  return parse_model(parse_file(path), path);
}

namespace detail {

// Family entries are either inline model objects or paths to model files,
// resolved relative to the referencing file's directory.
inline std::vector<CausalModel> parse_family(const json& j, const std::string& where,
                                             const std::filesystem::path& base_dir) {
  expect_array(j, where);
  std::vector<CausalModel> models;
  for (std::size_t k = 0; k < j.size(); ++k) {
    std::ostringstream slot;
    slot << where << "[" << k << "]";
    if (j[k].is_string()) {
      std::filesystem::path ref(j[k].get<std::string>());
      if (ref.is_relative()) ref = base_dir / ref;
      models.push_back(load_model_file(ref.string()));
    } else if (j[k].is_object()) {
      models.push_back(parse_model(j[k], slot.str()));
    } else {
      throw ParseError(slot.str() + ": expected a model object or a file path");
    }
  }
  return models;
}

inline UtilityFunction parse_utility(const json& j, const std::string& where) {
  expect_object(j, where);
  UtilityFunction u;
  for (auto it = j.begin(); it != j.end(); ++it) {
    u.values[it.key()] = expect_number(*it, where + "." + it.key());
  }
  return u;
}

inline std::vector<double> parse_weights(const json& j, const std::string& where) {
  expect_array(j, where);
  std::vector<double> weights;
  for (std::size_t k = 0; k < j.size(); ++k) {
    std::ostringstream slot;
    slot << where << "[" << k << "]";
    weights.push_back(expect_number(j[k], slot.str()));
  }
  return weights;
}

}  // namespace detail

inline CausalDecisionProblem load_cdp_file(const std::string& path) {
  json j = parse_file(path);
  detail::expect_object(j, path);
  detail::reject_unknown(
      j, path, {"family", "prior", "action_variable", "consequence_variable", "utility"});
  CausalDecisionProblem cdp;
  cdp.family.models = detail::parse_family(detail::require(j, path, "family"), path + ": family",
                                           std::filesystem::path(path).parent_path());
  cdp.family.action_variables.push_back(detail::expect_string(
      detail::require(j, path, "action_variable"), path + ": action_variable"));
  cdp.family.consequence_variable = detail::expect_string(
      detail::require(j, path, "consequence_variable"), path + ": consequence_variable");
  cdp.utility = detail::parse_utility(detail::require(j, path, "utility"), path + ": utility");
  cdp.prior = BeliefState(detail::parse_weights(detail::require(j, path, "prior"), path + ": prior"));
  return cdp;
}

inline CausalGame load_game_file(const std::string& path) {
  json j = parse_file(path);
  detail::expect_object(j, path);
  detail::reject_unknown(j, path, {"family", "consequence_variable", "players"});
  std::vector<CausalModel> models =
      detail::parse_family(detail::require(j, path, "family"), path + ": family",
                           std::filesystem::path(path).parent_path());
  std::string consequence = detail::expect_string(
      detail::require(j, path, "consequence_variable"), path + ": consequence_variable");

  const json& jplayers = detail::require(j, path, "players");
  detail::expect_array(jplayers, path + ": players");
  std::vector<PlayerSpec> players;
  for (std::size_t k = 0; k < jplayers.size(); ++k) {
    std::string at = detail::element(path, "players", k);
    const json& jp = jplayers[k];
    detail::expect_object(jp, at);
    detail::reject_unknown(jp, at, {"action_variable", "utility", "belief"});
    PlayerSpec p;
    p.action_variable =
        detail::expect_string(detail::require(jp, at, "action_variable"), at + ".action_variable");
    p.utility = detail::parse_utility(detail::require(jp, at, "utility"), at + ".utility");
    p.belief = BeliefState(detail::parse_weights(detail::require(jp, at, "belief"), at + ".belief"));
    players.push_back(std::move(p));
  }
  return make_game(std::move(models), std::move(consequence), std::move(players));
}

inline BayesianCausalGame load_bayesian_game_file(const std::string& path) {
  json j = parse_file(path);
  detail::expect_object(j, path);
  detail::reject_unknown(j, path, {"family", "consequence_variable", "players"});
  std::vector<CausalModel> states =
      detail::parse_family(detail::require(j, path, "family"), path + ": family",
                           std::filesystem::path(path).parent_path());
  const std::size_t num_states = states.size();
  std::string consequence = detail::expect_string(
      detail::require(j, path, "consequence_variable"), path + ": consequence_variable");

  const json& jplayers = detail::require(j, path, "players");
  detail::expect_array(jplayers, path + ": players");
  std::vector<BayesianPlayer> players;
  for (std::size_t k = 0; k < jplayers.size(); ++k) {
    std::string at = detail::element(path, "players", k);
    const json& jp = jplayers[k];
    detail::expect_object(jp, at);
    detail::reject_unknown(jp, at, {"action_variable", "utility", "prior", "types", "signal"});
    BayesianPlayer p;
    p.action_variable =
        detail::expect_string(detail::require(jp, at, "action_variable"), at + ".action_variable");
    p.utility = detail::parse_utility(detail::require(jp, at, "utility"), at + ".utility");
    p.prior = BeliefState(detail::parse_weights(detail::require(jp, at, "prior"), at + ".prior"));

    const json& jtypes = detail::require(jp, at, "types");
    detail::expect_array(jtypes, at + ".types");
    for (std::size_t t = 0; t < jtypes.size(); ++t) {
      std::ostringstream slot;
      slot << at << ".types[" << t << "]";
      p.signal.types.push_back(detail::expect_string(jtypes[t], slot.str()));
    }

    // signal: map from state index (as a string key) to the type observed
    // there; every state must be covered exactly once.
    const json& jsignal = detail::require(jp, at, "signal");
    detail::expect_object(jsignal, at + ".signal");
    p.signal.signal.assign(num_states, std::string());
    std::vector<bool> covered(num_states, false);
    for (auto it = jsignal.begin(); it != jsignal.end(); ++it) {
      std::string slot = at + ".signal." + it.key();
      std::size_t w = 0;
      try {
        std::size_t consumed = 0;
        w = std::stoul(it.key(), &consumed);
        if (consumed != it.key().size()) throw std::invalid_argument(it.key());
      } catch (const std::exception&) {
        throw ParseError(slot + ": key must be a state index");
      }
      if (w >= num_states) {
        std::ostringstream out;
        out << slot << ": state index out of range for " << num_states << " states";
        throw ParseError(out.str());
      }
      p.signal.signal[w] = detail::expect_string(*it, slot);
      covered[w] = true;
    }
    for (std::size_t w = 0; w < num_states; ++w) {
      if (!covered[w]) {
        std::ostringstream out;
        out << at << ".signal: missing entry for state " << w;
        throw ParseError(out.str());
      }
    }
    players.push_back(std::move(p));
  }
  return make_bayesian_game(std::move(states), std::move(consequence), std::move(players));
}

inline SimConfig parse_sim_config(const json& j, const std::string& where) {
  detail::expect_object(j, where);
  detail::reject_unknown(
      j, where, {"true_model_index", "rounds", "exploration_rate", "rng_seed", "log_period"});
  SimConfig config;
  if (j.count("true_model_index")) {
    config.true_model_index = static_cast<int>(
        detail::expect_integer(j["true_model_index"], where + ": true_model_index"));
  }
  if (j.count("rounds")) {
    config.rounds = static_cast<int>(detail::expect_integer(j["rounds"], where + ": rounds"));
  }
  if (j.count("exploration_rate")) {
    config.exploration_rate =
        detail::expect_number(j["exploration_rate"], where + ": exploration_rate");
  }
  if (j.count("rng_seed")) {
    long long seed = detail::expect_integer(j["rng_seed"], where + ": rng_seed");
    if (seed < 0) throw ParseError(where + ": rng_seed: expected a nonnegative integer");
    config.rng_seed = static_cast<std::uint64_t>(seed);
  }
  if (j.count("log_period")) {
    config.log_period =
        static_cast<int>(detail::expect_integer(j["log_period"], where + ": log_period"));
  }
  return config;
}

inline SimConfig load_sim_config_file(const std::string& path) {
  return parse_sim_config(parse_file(path), path);
}

// ---------------------------------------------------------------------------
// Output side. Every artifact embeds the run manifest: JSON documents as a
// "manifest" object, CSV files as leading `# key=value` comment lines.

struct RunManifest {
  std::string command;
  std::vector<std::string> inputs;
  double tolerance = kDefaultTolerance;
  std::size_t max_profiles = kDefaultMaxProfiles;
  std::optional<std::uint64_t> seed;
  std::string version = kVersion;
  std::string timestamp;
};

inline std::string utc_timestamp() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline RunManifest make_manifest(std::string command, std::vector<std::string> inputs,
                                 double tolerance = kDefaultTolerance,
                                 std::size_t max_profiles = kDefaultMaxProfiles,
                                 std::optional<std::uint64_t> seed = std::nullopt) {
  RunManifest m;
  m.command = std::move(command);
  m.inputs = std::move(inputs);
  m.tolerance = tolerance;
  m.max_profiles = max_profiles;
  m.seed = seed;
  m.timestamp = utc_timestamp();
  return m;
}

inline ojson manifest_json(const RunManifest& m) {
  ojson out;
  out["command"] = m.command;
  out["inputs"] = m.inputs;
  out["tolerance"] = m.tolerance;
  out["max_profiles"] = m.max_profiles;
  if (m.seed) out["seed"] = *m.seed;
  out["version"] = m.version;
  out["timestamp"] = m.timestamp;
  return out;
}

namespace detail {

inline void write_manifest_comments(std::ostream& os, const RunManifest& m) {
  os << "# command=" << m.command << "\n";
  os << "# inputs=";
  for (std::size_t k = 0; k < m.inputs.size(); ++k) {
    if (k) os << ";";
    os << m.inputs[k];
  }
  os << "\n";
  os << "# tolerance=" << m.tolerance << "\n";
  os << "# max_profiles=" << m.max_profiles << "\n";
  if (m.seed) os << "# seed=" << *m.seed << "\n";
  os << "# version=" << m.version << "\n";
  os << "# timestamp=" << m.timestamp << "\n";
}

// Full-precision float for CSV cells: survives a round trip through text.
inline std::string csv_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace detail

inline ojson distribution_json(const Distribution& d) {
  ojson out = ojson::array();
  for (std::size_t c = 0; c < d.values.size(); ++c) {
    ojson entry;
    entry["value"] = d.values[c];
    entry["p"] = d.probs[c];
    out.push_back(std::move(entry));
  }
  return out;
}

inline ojson report_json(const EquilibriumReport& report) {
  ojson out;
  out["equilibria"] = ojson::array();
  for (const auto& e : report.equilibria) out["equilibria"].push_back(e.actions);
  out["evaluations"] = ojson::array();
  for (const auto& eval : report.evaluations) {
    ojson row;
    row["profile"] = eval.profile.actions;
    row["utilities"] = eval.utilities;
    if (eval.deviation) {
      ojson dev;
      dev["player"] = eval.deviation->player;
      dev["better_action"] = eval.deviation->better_action;
      dev["improved_utility"] = eval.deviation->improved_utility;
      row["deviation"] = std::move(dev);
    } else {
      row["deviation"] = nullptr;
    }
    out["evaluations"].push_back(std::move(row));
  }
  return out;
}

inline void write_json(std::ostream& os, const ojson& j) { os << j.dump(2) << "\n"; }

// Payoff table of the enumerated profiles: one row per profile, the players'
// actions followed by each player's expected utility.
inline void write_payoff_matrix_csv(std::ostream& os, const CausalGame& game,
                                    const EquilibriumReport& report, const RunManifest& m) {
  detail::write_manifest_comments(os, m);
  for (std::size_t i = 0; i < game.players.size(); ++i) {
    os << game.players[i].action_variable << ",";
  }
  for (std::size_t i = 0; i < game.players.size(); ++i) {
    if (i) os << ",";
    os << "u_" << i;
  }
  os << "\n";
  for (const auto& eval : report.evaluations) {
    for (const auto& action : eval.profile.actions) os << action << ",";
    for (std::size_t i = 0; i < eval.utilities.size(); ++i) {
      if (i) os << ",";
      os << detail::csv_double(eval.utilities[i]);
    }
    os << "\n";
  }
}

inline void write_eu_table_csv(std::ostream& os,
                               const std::vector<std::pair<std::string, double>>& table,
                               const RunManifest& m) {
  detail::write_manifest_comments(os, m);
  os << "action,expected_utility\n";
  for (const auto& [action, eu] : table) {
    os << action << "," << detail::csv_double(eu) << "\n";
  }
}

// Time series of play: kept rows are round 1, every log_period-th round and
// the final round. Columns: round, each player's action, the shared
// consequence, every belief weight, every player's utility of the profile.
inline void write_trace_csv(std::ostream& os, const CausalGame& game, const SimTrace& trace,
                            const RunManifest& m) {
  detail::write_manifest_comments(os, m);
  os << "# generator=" << trace.generator << "\n";
  os << "# rng_seed=" << trace.config.rng_seed << "\n";
  os << "# true_model_index=" << trace.config.true_model_index << "\n";
  os << "# rounds=" << trace.config.rounds << "\n";
  os << "# exploration_rate=" << trace.config.exploration_rate << "\n";
  os << "# log_period=" << trace.config.log_period << "\n";

  os << "round";
  for (const auto& p : game.players) os << "," << p.action_variable;
  os << ",consequence";
  for (std::size_t i = 0; i < game.players.size(); ++i) {
    for (std::size_t k = 0; k < game.family.models.size(); ++k) {
      os << ",belief_p" << i << "_m" << k;
    }
  }
  for (std::size_t i = 0; i < game.players.size(); ++i) os << ",u_p" << i;
  os << "\n";

  const int period = trace.config.log_period;
  for (const auto& record : trace.records) {
    bool keep = record.round == 1 || record.round % period == 0 ||
                record.round == trace.config.rounds;
    if (!keep) continue;
    os << record.round;
    for (const auto& action : record.profile.actions) os << "," << action;
    os << "," << record.consequence;
    for (const auto& belief : record.beliefs) {
      for (double w : belief.weights()) os << "," << detail::csv_double(w);
    }
    for (double u : record.utilities) os << "," << detail::csv_double(u);
    os << "\n";
  }
}

inline ojson sim_summary_json(const CausalGame& game, const SimTrace& trace,
                              const RunManifest& m) {
  ojson out;
  out["manifest"] = manifest_json(m);
  out["generator"] = trace.generator;
  out["rounds"] = trace.config.rounds;
  out["initial_profile"] = trace.initial_profile.actions;
  ojson finals = ojson::array();
  if (!trace.records.empty()) {
    for (const auto& belief : trace.records.back().beliefs) finals.push_back(belief.weights());
  } else {
    for (const auto& p : game.players) finals.push_back(p.belief.weights());
  }
  out["final_beliefs"] = std::move(finals);
  ojson freqs;
  for (const auto& [key, count] : trace.profile_counts) {
    freqs[key] = static_cast<double>(count) / static_cast<double>(trace.records.size());
  }
  out["profile_frequencies"] = std::move(freqs);
  out["hit_window"] = trace.hit_window;
  out["equilibrium_hit_rate"] = trace.equilibrium_hit_rate;
  out["events"] = trace.events;
  return out;
}

// Per-round greedy profile and whether it is an equilibrium at the beliefs
// then in force; the headline hit rate repeats in the comments.
inline void write_convergence_csv(std::ostream& os, const CausalGame& game,
                                  const ConvergenceReport& report, const RunManifest& m) {
  detail::write_manifest_comments(os, m);
  os << "# hit_window=" << report.window << "\n";
  os << "# hit_rate=" << detail::csv_double(report.hit_rate) << "\n";
  os << "round";
  for (const auto& p : game.players) os << ",greedy_" << p.action_variable;
  os << ",greedy_is_equilibrium\n";
  for (std::size_t r = 0; r < report.greedy_profiles.size(); ++r) {
    os << (r + 1);
    for (const auto& action : report.greedy_profiles[r].actions) os << "," << action;
    os << "," << (report.greedy_is_equilibrium[r] ? 1 : 0) << "\n";
  }
}

}  // namespace io
}  // namespace causalgames
