#pragma once

// Shared fixtures and random-instance generators. Random probabilities sit
// on the dyadic grid k/64 so rows sum to exactly 1.0 and expected utilities
// of small instances are exactly representable — comparisons against the
// oracles then cannot wobble on summation order.

#include <algorithm>
#include <cstddef>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "causalgames/causalgames.hpp"

namespace helpers {

using namespace causalgames;

inline double grid_prob(std::mt19937& rng) {
  return static_cast<double>(1 + rng() % 63) / 64.0;
}

// A full distribution over m values with every entry a positive multiple of
// 1/64; entries sum to exactly 1.0.
inline std::vector<double> grid_row(std::mt19937& rng, std::size_t m) {
  std::vector<int> cuts;
  while (cuts.size() + 1 < m) {
    int c = 1 + static_cast<int>(rng() % 63);
    if (std::find(cuts.begin(), cuts.end(), c) == cuts.end()) cuts.push_back(c);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.insert(cuts.begin(), 0);
  cuts.push_back(64);
  std::vector<double> row;
  for (std::size_t i = 1; i < cuts.size(); ++i) {
    row.push_back(static_cast<double>(cuts[i] - cuts[i - 1]) / 64.0);
  }
  return row;
}

// Storm raises the barometer's chance of reading "down"; forcing the
// barometer tells you nothing about the storm.
inline CausalModel barometer_model() {
  std::vector<Variable> variables{{"Storm", {"calm", "storm"}},
                                  {"Barometer", {"steady", "down"}}};
  std::map<std::string, std::vector<std::string>> parents{{"Barometer", {"Storm"}}};
  std::map<std::string, CausalModel::CptRows> cpts;
  cpts["Storm"] = {{0.8, 0.2}};
  cpts["Barometer"] = {{0.9, 0.1},   // calm
                       {0.1, 0.9}};  // storm
  return CausalModel(variables, parents, cpts);
}

// Two binary variables, one edge; P(A=1, B=1) = 0.3 * 0.9 = 0.27.
inline CausalModel chain_model() {
  std::vector<Variable> variables{{"A", {"0", "1"}}, {"B", {"0", "1"}}};
  std::map<std::string, std::vector<std::string>> parents{{"B", {"A"}}};
  std::map<std::string, CausalModel::CptRows> cpts;
  cpts["A"] = {{0.7, 0.3}};
  cpts["B"] = {{0.8, 0.2}, {0.1, 0.9}};
  return CausalModel(variables, parents, cpts);
}

// Consequence variable spelling out who stayed silent/confessed; classic
// payoffs 3/0/5/1. Unique pure equilibrium: both confess.
inline CausalGame prisoners_dilemma() {
  std::vector<Variable> variables{{"A1", {"silent", "confess"}},
                                  {"A2", {"silent", "confess"}},
                                  {"C", {"ss", "sc", "cs", "cc"}}};
  std::map<std::string, std::vector<std::string>> parents{{"C", {"A1", "A2"}}};
  std::map<std::string, CausalModel::CptRows> cpts;
  cpts["A1"] = {{0.5, 0.5}};
  cpts["A2"] = {{0.5, 0.5}};
  cpts["C"] = {{1, 0, 0, 0},   // silent, silent
               {0, 1, 0, 0},   // silent, confess
               {0, 0, 1, 0},   // confess, silent
               {0, 0, 0, 1}};  // confess, confess
  CausalModel model(variables, parents, cpts);

  UtilityFunction u1{{{"ss", 3}, {"sc", 0}, {"cs", 5}, {"cc", 1}}};
  UtilityFunction u2{{{"ss", 3}, {"sc", 5}, {"cs", 0}, {"cc", 1}}};
  return make_game({model}, "C",
                   {PlayerSpec{"A1", u1, BeliefState({1.0})},
                    PlayerSpec{"A2", u2, BeliefState({1.0})}});
}

// Zero-sum coin game: player 1 wants the coins to match, player 2 wants a
// mismatch. No pure equilibrium exists.
inline CausalGame matching_pennies() {
  std::vector<Variable> variables{{"A1", {"heads", "tails"}},
                                  {"A2", {"heads", "tails"}},
                                  {"C", {"match", "mismatch"}}};
  std::map<std::string, std::vector<std::string>> parents{{"C", {"A1", "A2"}}};
  std::map<std::string, CausalModel::CptRows> cpts;
  cpts["A1"] = {{0.5, 0.5}};
  cpts["A2"] = {{0.5, 0.5}};
  cpts["C"] = {{1, 0}, {0, 1}, {0, 1}, {1, 0}};
  CausalModel model(variables, parents, cpts);

  UtilityFunction u1{{{"match", 1}, {"mismatch", 0}}};
  UtilityFunction u2{{{"match", 0}, {"mismatch", 1}}};
  return make_game({model}, "C",
                   {PlayerSpec{"A1", u1, BeliefState({1.0})},
                    PlayerSpec{"A2", u2, BeliefState({1.0})}});
}

// Two candidate worlds a single agent can tell apart by acting: the arms'
// success rates flip between the models.
inline CausalGame learner_game() {
  std::vector<Variable> variables{{"A", {"a0", "a1"}}, {"C", {"c0", "c1"}}};
  std::map<std::string, std::vector<std::string>> parents{{"C", {"A"}}};
  std::map<std::string, CausalModel::CptRows> cpts0, cpts1;
  cpts0["A"] = {{0.5, 0.5}};
  cpts0["C"] = {{0.2, 0.8},   // a0
                {0.7, 0.3}};  // a1
  cpts1["A"] = {{0.5, 0.5}};
  cpts1["C"] = {{0.8, 0.2},   // a0
                {0.4, 0.6}};  // a1
  CausalModel model0(variables, parents, cpts0);
  CausalModel model1(variables, parents, cpts1);

  UtilityFunction u{{{"c0", 0}, {"c1", 1}}};
  return make_game({model0, model1}, "C",
                   {PlayerSpec{"A", u, BeliefState({0.5, 0.5})}});
}

// Decision problem with a clean closed-form answer: EU(go) = 7, EU(stay) = 3
// under the (0.75, 0.25) prior.
inline CausalDecisionProblem two_model_cdp() {
  std::vector<Variable> variables{{"A", {"go", "stay"}}, {"C", {"low", "high"}}};
  std::map<std::string, std::vector<std::string>> parents{{"C", {"A"}}};
  std::map<std::string, CausalModel::CptRows> cpts0, cpts1;
  cpts0["A"] = {{0.5, 0.5}};
  cpts0["C"] = {{0.1, 0.9},   // go
                {0.8, 0.2}};  // stay
  cpts1["A"] = {{0.5, 0.5}};
  cpts1["C"] = {{0.9, 0.1},   // go
                {0.4, 0.6}};  // stay
  CausalDecisionProblem cdp;
  cdp.family.models = {CausalModel(variables, parents, cpts0),
                       CausalModel(variables, parents, cpts1)};
  cdp.family.action_variables = {"A"};
  cdp.family.consequence_variable = "C";
  cdp.prior = BeliefState({0.75, 0.25});
  cdp.utility = UtilityFunction{{{"low", 0}, {"high", 10}}};
  return cdp;
}

// Two states of the world that invert which coordination wins; both players
// learn the state exactly through their signals, so the induced game has
// four two-action players and sixteen strategy profiles.
inline BayesianCausalGame two_type_game() {
  std::vector<Variable> variables{{"A1", {"l", "r"}}, {"A2", {"l", "r"}},
                                  {"C", {"win", "lose"}}};
  std::map<std::string, std::vector<std::string>> parents{{"C", {"A1", "A2"}}};
  std::map<std::string, CausalModel::CptRows> cpts0, cpts1;
  cpts0["A1"] = {{0.5, 0.5}};
  cpts0["A2"] = {{0.5, 0.5}};
  cpts0["C"] = {{1, 0}, {0, 1}, {0, 1}, {1, 0}};  // win iff the actions agree
  cpts1["A1"] = {{0.5, 0.5}};
  cpts1["A2"] = {{0.5, 0.5}};
  cpts1["C"] = {{0, 1}, {1, 0}, {1, 0}, {0, 1}};  // win iff they differ
  CausalModel state0(variables, parents, cpts0);
  CausalModel state1(variables, parents, cpts1);

  UtilityFunction u1{{{"win", 3}, {"lose", 0}}};
  UtilityFunction u2{{{"win", 4}, {"lose", 1}}};
  SignalFunction revealing{{"s0", "s1"}, {"s0", "s1"}};
  return make_bayesian_game(
      {state0, state1}, "C",
      {BayesianPlayer{"A1", u1, BeliefState({0.5, 0.5}), revealing},
       BayesianPlayer{"A2", u2, BeliefState({0.25, 0.75}), revealing}});
}

// Random DAG over 2–5 binary variables: each forward pair is an edge with
// probability 0.4, CPT entries on the 1/64 grid.
inline CausalModel random_binary_model(std::mt19937& rng) {
  const int n = 2 + static_cast<int>(rng() % 4);
  std::vector<Variable> variables;
  for (int i = 0; i < n; ++i) {
    variables.push_back(Variable{"V" + std::to_string(i), {"0", "1"}});
  }
  std::map<std::string, std::vector<std::string>> parents;
  for (int j = 1; j < n; ++j) {
    for (int i = 0; i < j; ++i) {
      if (rng() % 10 < 4) parents[variables[j].name].push_back(variables[i].name);
    }
  }
  std::map<std::string, CausalModel::CptRows> cpts;
  for (int i = 0; i < n; ++i) {
    std::size_t rows = 1;
    if (parents.count(variables[i].name)) {
      rows = std::size_t{1} << parents[variables[i].name].size();
    }
    CausalModel::CptRows table;
    for (std::size_t r = 0; r < rows; ++r) {
      double p = grid_prob(rng);
      table.push_back({1.0 - p, p});
    }
    cpts[variables[i].name] = std::move(table);
  }
  return CausalModel(variables, parents, cpts);
}

// One deterministic-consequence model: the consequence is a one-hot function
// of all the action variables.
inline CausalModel deterministic_game_model(std::mt19937& rng,
                                            const std::vector<Variable>& variables,
                                            const std::vector<std::string>& action_vars,
                                            const std::string& consequence_var) {
  std::map<std::string, std::vector<std::string>> parents{{consequence_var, action_vars}};
  std::map<std::string, CausalModel::CptRows> cpts;
  std::size_t consequence_size = 0;
  std::size_t rows = 1;
  for (const auto& v : variables) {
    if (v.name == consequence_var) {
      consequence_size = v.domain.size();
    } else {
      cpts[v.name] = {grid_row(rng, v.domain.size())};
      rows *= v.domain.size();
    }
  }
  CausalModel::CptRows table;
  for (std::size_t r = 0; r < rows; ++r) {
    std::vector<double> row(consequence_size, 0.0);
    row[rng() % consequence_size] = 1.0;
    table.push_back(std::move(row));
  }
  cpts[consequence_var] = std::move(table);
  return CausalModel(variables, parents, cpts);
}

// 2–3 players with 2–3 actions each, integer utilities in 0..9, and one
// deterministic-consequence model per family member.
inline CausalGame random_deterministic_game(std::mt19937& rng, std::size_t num_models = 1) {
  const std::size_t n = 2 + rng() % 2;
  std::vector<Variable> variables;
  std::vector<std::string> action_vars;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t arity = 2 + rng() % 2;
    std::vector<std::string> domain;
    for (std::size_t a = 0; a < arity; ++a) domain.push_back("a" + std::to_string(a));
    variables.push_back(Variable{"A" + std::to_string(i), domain});
    action_vars.push_back(variables.back().name);
  }
  variables.push_back(Variable{"C", {"c0", "c1", "c2", "c3"}});

  std::vector<CausalModel> models;
  for (std::size_t k = 0; k < num_models; ++k) {
    models.push_back(deterministic_game_model(rng, variables, action_vars, "C"));
  }
  std::vector<double> belief_weights;
  if (num_models == 1) {
    belief_weights = {1.0};
  } else {
    belief_weights = grid_row(rng, num_models);
  }

  std::vector<PlayerSpec> players;
  for (std::size_t i = 0; i < n; ++i) {
    UtilityFunction u;
    for (const auto& c : variables.back().domain) {
      u.values[c] = static_cast<double>(rng() % 10);
    }
    players.push_back(PlayerSpec{action_vars[i], u, BeliefState(belief_weights)});
  }
  return make_game(std::move(models), "C", std::move(players));
}

// Decision problems over variables A (action), Z (background), C
// (consequence): per model, C's parent set and all CPTs are random.
inline CausalDecisionProblem random_cdp(std::mt19937& rng, std::size_t num_models) {
  std::size_t num_actions = 2 + rng() % 2;
  std::size_t num_consequences = 2 + rng() % 3;
  std::vector<std::string> action_domain, consequence_domain;
  for (std::size_t a = 0; a < num_actions; ++a) action_domain.push_back("a" + std::to_string(a));
  for (std::size_t c = 0; c < num_consequences; ++c) {
    consequence_domain.push_back("c" + std::to_string(c));
  }
  std::vector<Variable> variables{{"A", action_domain},
                                  {"Z", {"0", "1"}},
                                  {"C", consequence_domain}};

  CausalDecisionProblem cdp;
  for (std::size_t k = 0; k < num_models; ++k) {
    std::map<std::string, std::vector<std::string>> parents;
    std::size_t rows = 1;
    if (rng() % 2) {
      parents["C"].push_back("A");
      rows *= num_actions;
    }
    if (rng() % 2) {
      parents["C"].push_back("Z");
      rows *= 2;
    }
    std::map<std::string, CausalModel::CptRows> cpts;
    cpts["A"] = {grid_row(rng, num_actions)};
    cpts["Z"] = {grid_row(rng, 2)};
    CausalModel::CptRows table;
    for (std::size_t r = 0; r < rows; ++r) table.push_back(grid_row(rng, num_consequences));
    cpts["C"] = std::move(table);
    cdp.family.models.push_back(CausalModel(variables, parents, cpts));
  }
  cdp.family.action_variables = {"A"};
  cdp.family.consequence_variable = "C";
  cdp.prior = BeliefState(num_models == 1 ? std::vector<double>{1.0} : grid_row(rng, num_models));
  for (const auto& c : consequence_domain) {
    cdp.utility.values[c] = static_cast<double>(rng() % 10);
  }
  return cdp;
}

// Random incomplete-information game: 2 players over shared action variables,
// 2–4 states with random consequence CPTs, random signals; only types that
// actually occur are declared, so every type has positive prior mass.
inline BayesianCausalGame random_bayesian_game(std::mt19937& rng) {
  const std::size_t num_states = 2 + rng() % 3;
  std::vector<Variable> variables{{"A0", {"a0", "a1"}}, {"A1", {"a0", "a1"}},
                                  {"C", {"c0", "c1", "c2"}}};
  std::vector<std::string> action_vars{"A0", "A1"};

  std::vector<CausalModel> states;
  for (std::size_t w = 0; w < num_states; ++w) {
    std::map<std::string, std::vector<std::string>> parents{{"C", action_vars}};
    std::map<std::string, CausalModel::CptRows> cpts;
    cpts["A0"] = {grid_row(rng, 2)};
    cpts["A1"] = {grid_row(rng, 2)};
    CausalModel::CptRows table;
    for (std::size_t r = 0; r < 4; ++r) table.push_back(grid_row(rng, 3));
    cpts["C"] = std::move(table);
    states.push_back(CausalModel(variables, parents, cpts));
  }

  std::vector<BayesianPlayer> players;
  for (std::size_t i = 0; i < 2; ++i) {
    BayesianPlayer p;
    p.action_variable = action_vars[i];
    for (const auto& c : variables.back().domain) {
      p.utility.values[c] = static_cast<double>(rng() % 10);
    }
    p.prior = BeliefState(grid_row(rng, num_states));
    std::size_t num_labels = 1 + rng() % 3;
    std::vector<std::string> drawn;
    for (std::size_t w = 0; w < num_states; ++w) {
      drawn.push_back("t" + std::to_string(rng() % num_labels));
    }
    for (std::size_t t = 0; t < num_labels; ++t) {
      std::string label = "t" + std::to_string(t);
      if (std::find(drawn.begin(), drawn.end(), label) != drawn.end()) {
        p.signal.types.push_back(label);
      }
    }
    p.signal.signal = drawn;
    players.push_back(std::move(p));
  }
  return make_bayesian_game(std::move(states), "C", std::move(players));
}

}  // namespace helpers
