// cgsolve: command-line front end for the causalgames library.
//
// Subcommands: validate, intervene, solve-cdp, equilibria, bayes-equilibria,
// simulate. All structured output is JSON (CSV for time series and payoff
// tables), and every artifact embeds a run manifest. Exit codes: 0 success,
// 1 domain violation, 2 parse/config error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"

#include "causalgames/causalgames.hpp"

namespace {

using namespace causalgames;

std::pair<std::string, std::string> split_pair(const std::string& text) {
  std::size_t eq = text.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ParseError("expected var=value, got '" + text + "'");
  }
  return {text.substr(0, eq), text.substr(eq + 1)};
}

Assignment parse_pairs(const std::vector<std::string>& pairs) {
  Assignment a;
  for (const auto& text : pairs) {
    auto [var, value] = split_pair(text);
    a.set(var, value);
  }
  return a;
}

// Invalid inputs stop a solve with the full violation listing.
void ensure_valid(const std::vector<std::string>& violations) {
  if (violations.empty()) return;
  std::ostringstream out;
  out << "invalid input:";
  for (const auto& v : violations) out << "\n  " << v;
  throw ModelError(out.str());
}

template <typename Fn>
void with_output(const std::string& path, Fn&& fn) {
  if (path.empty()) {
    fn(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw ParseError(path + ": cannot open for writing");
  fn(out);
}

struct Options {
  double tolerance = kDefaultTolerance;
  std::size_t max_profiles = kDefaultMaxProfiles;
  std::uint64_t seed = 0;
  bool seed_given = false;
};

int run_validate(const Options& opts, const std::string& path, const std::string& kind) {
  std::vector<std::string> violations;
  if (kind == "model") {
    violations = validate(io::load_model_file(path), opts.tolerance);
  } else if (kind == "cdp") {
    violations = validate_cdp(io::load_cdp_file(path), opts.tolerance);
  } else if (kind == "game") {
    violations = validate_game(io::load_game_file(path), opts.tolerance);
  } else {
    violations = validate_bayesian_game(io::load_bayesian_game_file(path), opts.tolerance);
  }
  io::ojson out;
  out["manifest"] =
      io::manifest_json(io::make_manifest("validate", {path}, opts.tolerance, opts.max_profiles));
  out["file"] = path;
  out["kind"] = kind;
  out["valid"] = violations.empty();
  out["violations"] = violations;
  io::write_json(std::cout, out);
  return violations.empty() ? 0 : 1;
}

int run_intervene(const Options& opts, const std::string& path,
                  const std::vector<std::string>& do_pairs, const std::string& target,
                  const std::vector<std::string>& evidence_pairs, const std::string& out_path) {
  CausalModel model = io::load_model_file(path);
  ensure_valid(validate(model, opts.tolerance));
  Intervention iv{parse_pairs(do_pairs)};
  Assignment evidence = parse_pairs(evidence_pairs);
  Distribution dist = interventional_query(model, iv, target, evidence);

  io::ojson out;
  out["manifest"] =
      io::manifest_json(io::make_manifest("intervene", {path}, opts.tolerance, opts.max_profiles));
  out["target"] = target;
  io::ojson jdo = io::ojson::object();
  for (const auto& [var, value] : iv.values.entries()) jdo[var] = value;
  out["do"] = std::move(jdo);
  io::ojson jev = io::ojson::object();
  for (const auto& [var, value] : evidence.entries()) jev[var] = value;
  out["evidence"] = std::move(jev);
  out["distribution"] = io::distribution_json(dist);
  with_output(out_path, [&](std::ostream& os) { io::write_json(os, out); });
  return 0;
}

int run_solve_cdp(const Options& opts, const std::string& path, const std::string& out_path,
                  const std::string& csv_path) {
  CausalDecisionProblem cdp = io::load_cdp_file(path);
  ensure_valid(validate_cdp(cdp, opts.tolerance));
  const auto& first = cdp.family.models[0];
  const auto& domain = first.variable(first.index_of(cdp.family.action_variables[0])).domain;
  std::vector<std::pair<std::string, double>> table;
  for (const auto& action : domain) {
    table.emplace_back(action, causal_expected_utility(cdp, action));
  }
  auto [best, best_eu] = optimal_action(cdp);

  io::RunManifest manifest =
      io::make_manifest("solve-cdp", {path}, opts.tolerance, opts.max_profiles);
  io::ojson out;
  out["manifest"] = io::manifest_json(manifest);
  out["action_variable"] = cdp.family.action_variables[0];
  out["optimal_action"] = best;
  out["expected_utility"] = best_eu;
  out["table"] = io::ojson::array();
  for (const auto& [action, eu] : table) {
    io::ojson row;
    row["action"] = action;
    row["expected_utility"] = eu;
    out["table"].push_back(std::move(row));
  }
  with_output(out_path, [&](std::ostream& os) { io::write_json(os, out); });
  if (!csv_path.empty()) {
    with_output(csv_path, [&](std::ostream& os) { io::write_eu_table_csv(os, table, manifest); });
  }
  return 0;
}

int run_equilibria(const Options& opts, const std::string& path, const std::string& out_path,
                   const std::string& csv_path) {
  CausalGame game = io::load_game_file(path);
  ensure_valid(validate_game(game, opts.tolerance));
  EquilibriumReport report = enumerate_equilibria(game, opts.max_profiles, opts.tolerance);

  io::RunManifest manifest =
      io::make_manifest("equilibria", {path}, opts.tolerance, opts.max_profiles);
  io::ojson out;
  out["manifest"] = io::manifest_json(manifest);
  io::ojson vars = io::ojson::array();
  for (const auto& p : game.players) vars.push_back(p.action_variable);
  out["action_variables"] = std::move(vars);
  io::ojson body = io::report_json(report);
  out["equilibria"] = body["equilibria"];
  out["evaluations"] = body["evaluations"];
  with_output(out_path, [&](std::ostream& os) { io::write_json(os, out); });
  if (!csv_path.empty()) {
    with_output(csv_path,
                [&](std::ostream& os) { io::write_payoff_matrix_csv(os, game, report, manifest); });
  }
  return 0;
}

int run_bayes_equilibria(const Options& opts, const std::string& path,
                         const std::string& out_path) {
  BayesianCausalGame game = io::load_bayesian_game_file(path);
  ensure_valid(validate_bayesian_game(game, opts.tolerance));
  InducedGame induced = build_induced_game(game);
  EquilibriumReport report = bayesian_causal_equilibria(game, opts.max_profiles, opts.tolerance);

  io::ojson out;
  out["manifest"] = io::manifest_json(
      io::make_manifest("bayes-equilibria", {path}, opts.tolerance, opts.max_profiles));
  out["induced_players"] = io::ojson::array();
  for (const auto& who : induced.players) {
    io::ojson row;
    row["player"] = who.player;
    row["type"] = who.type;
    row["action_variable"] = who.action_variable;
    row["belief"] = who.belief.weights();
    out["induced_players"].push_back(std::move(row));
  }
  io::ojson body = io::report_json(report);
  out["equilibria"] = body["equilibria"];
  out["evaluations"] = body["evaluations"];
  with_output(out_path, [&](std::ostream& os) { io::write_json(os, out); });
  return 0;
}

struct SimFlags {
  std::string config_path;
  int rounds = 0;
  double epsilon = 0.0;
  int true_model = 0;
  int log_period = 0;
  bool rounds_given = false;
  bool epsilon_given = false;
  bool true_model_given = false;
  bool log_period_given = false;
};

int run_simulate(const Options& opts, const std::string& path, const SimFlags& flags,
                 const std::string& out_path, const std::string& trace_path,
                 const std::string& convergence_path) {
  CausalGame game = io::load_game_file(path);
  ensure_valid(validate_game(game, opts.tolerance));

  SimConfig config;
  std::vector<std::string> inputs{path};
  if (!flags.config_path.empty()) {
    config = io::load_sim_config_file(flags.config_path);
    inputs.push_back(flags.config_path);
  }
  // Flags beat the config file.
  if (flags.rounds_given) config.rounds = flags.rounds;
  if (flags.epsilon_given) config.exploration_rate = flags.epsilon;
  if (flags.true_model_given) config.true_model_index = flags.true_model;
  if (flags.log_period_given) config.log_period = flags.log_period;
  if (opts.seed_given) config.rng_seed = opts.seed;

  SimTrace trace = run_simulation(game, config, opts.tolerance);
  io::RunManifest manifest = io::make_manifest("simulate", inputs, opts.tolerance,
                                               opts.max_profiles, config.rng_seed);
  with_output(out_path, [&](std::ostream& os) {
    io::write_json(os, io::sim_summary_json(game, trace, manifest));
  });
  if (!trace_path.empty()) {
    with_output(trace_path,
                [&](std::ostream& os) { io::write_trace_csv(os, game, trace, manifest); });
  }
  if (!convergence_path.empty()) {
    ConvergenceReport convergence = convergence_report(trace, game, opts.tolerance);
    with_output(convergence_path, [&](std::ostream& os) {
      io::write_convergence_csv(os, game, convergence, manifest);
    });
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"causal decision problems and causal games: exact interventions, "
               "optimal actions, pure equilibria, repeated-play simulation"};
  app.set_version_flag("--version", std::string("cgsolve ") + kVersion);
  app.require_subcommand(1);

  Options opts;
  app.add_option("--tolerance", opts.tolerance,
                 "numeric tolerance for normalization checks and utility comparisons")
      ->capture_default_str();
  app.add_option("--max-profiles", opts.max_profiles,
                 "cap on exhaustively enumerated profiles")
      ->capture_default_str();
  auto* seed_opt =
      app.add_option("--seed", opts.seed, "RNG seed (simulate; overrides the config file)");

  auto* cmd_validate = app.add_subcommand("validate", "check a file against its invariants");
  std::string validate_path, validate_kind = "model";
  cmd_validate->add_option("file", validate_path, "input file")->required();
  cmd_validate->add_option("--kind", validate_kind, "file kind")
      ->check(CLI::IsMember({"model", "cdp", "game", "bayes"}))
      ->capture_default_str();
  cmd_validate->fallthrough();

  auto* cmd_intervene =
      app.add_subcommand("intervene", "interventional distribution of a target variable");
  std::string intervene_path, intervene_target, intervene_out;
  std::vector<std::string> do_pairs, evidence_pairs;
  cmd_intervene->add_option("file", intervene_path, "model file")->required();
  cmd_intervene->add_option("--do", do_pairs, "intervention var=value (repeatable)");
  cmd_intervene->add_option("--target", intervene_target, "variable to query")->required();
  cmd_intervene->add_option("--evidence", evidence_pairs,
                            "observational evidence var=value (repeatable)");
  cmd_intervene->add_option("--out", intervene_out, "write JSON here instead of stdout");
  cmd_intervene->fallthrough();

  auto* cmd_cdp = app.add_subcommand("solve-cdp", "optimal action of a decision problem");
  std::string cdp_path, cdp_out, cdp_csv;
  cmd_cdp->add_option("file", cdp_path, "decision problem file")->required();
  cmd_cdp->add_option("--out", cdp_out, "write JSON here instead of stdout");
  cmd_cdp->add_option("--csv", cdp_csv, "also write the expected-utility table as CSV");
  cmd_cdp->fallthrough();

  auto* cmd_eq = app.add_subcommand("equilibria", "enumerate pure equilibria of a game");
  std::string eq_path, eq_out, eq_csv;
  cmd_eq->add_option("file", eq_path, "game file")->required();
  cmd_eq->add_option("--out", eq_out, "write JSON here instead of stdout");
  cmd_eq->add_option("--csv", eq_csv, "also write the payoff table as CSV");
  cmd_eq->fallthrough();

  auto* cmd_bayes = app.add_subcommand(
      "bayes-equilibria", "equilibria over type-contingent strategies of a typed game");
  std::string bayes_path, bayes_out;
  cmd_bayes->add_option("file", bayes_path, "typed game file")->required();
  cmd_bayes->add_option("--out", bayes_out, "write JSON here instead of stdout");
  cmd_bayes->fallthrough();

  auto* cmd_sim = app.add_subcommand("simulate", "repeated play against a fixed true model");
  std::string sim_path, sim_out, sim_trace, sim_convergence;
  SimFlags sim_flags;
  cmd_sim->add_option("file", sim_path, "game file")->required();
  cmd_sim->add_option("--config", sim_flags.config_path, "simulation config JSON");
  auto* rounds_opt = cmd_sim->add_option("--rounds", sim_flags.rounds, "number of rounds");
  auto* eps_opt = cmd_sim->add_option("--epsilon", sim_flags.epsilon, "exploration rate");
  auto* true_opt =
      cmd_sim->add_option("--true-model", sim_flags.true_model, "index of the true model");
  auto* period_opt =
      cmd_sim->add_option("--log-period", sim_flags.log_period, "trace CSV row stride");
  cmd_sim->add_option("--out", sim_out, "write the JSON summary here instead of stdout");
  cmd_sim->add_option("--trace", sim_trace, "write the per-round trace CSV here");
  cmd_sim->add_option("--convergence", sim_convergence, "write the convergence CSV here");
  cmd_sim->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;  // flag/usage problems are config errors
  }

  opts.seed_given = seed_opt->count() > 0;
  sim_flags.rounds_given = rounds_opt->count() > 0;
  sim_flags.epsilon_given = eps_opt->count() > 0;
  sim_flags.true_model_given = true_opt->count() > 0;
  sim_flags.log_period_given = period_opt->count() > 0;

  try {
    if (*cmd_validate) return run_validate(opts, validate_path, validate_kind);
    if (*cmd_intervene) {
      return run_intervene(opts, intervene_path, do_pairs, intervene_target, evidence_pairs,
                           intervene_out);
    }
    if (*cmd_cdp) return run_solve_cdp(opts, cdp_path, cdp_out, cdp_csv);
    if (*cmd_eq) return run_equilibria(opts, eq_path, eq_out, eq_csv);
    if (*cmd_bayes) return run_bayes_equilibria(opts, bayes_path, bayes_out);
    if (*cmd_sim) {
      return run_simulate(opts, sim_path, sim_flags, sim_out, sim_trace, sim_convergence);
    }
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ModelError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
