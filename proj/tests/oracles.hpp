#pragma once

// Reference implementations the test suites compare the library against.
// Deliberately written from the raw definitions — no graph surgery, no
// conditional-query machinery, no shared helpers — so agreement between the
// two code paths is evidence, not tautology.

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "causalgames/causalgames.hpp"

namespace oracles {

using namespace causalgames;

// P(target | do(iv)) the long way: walk every joint assignment of the
// ORIGINAL model, keep the ones consistent with the intervention, weight each
// by the product of the non-intervened CPT factors, accumulate, normalize.
inline Distribution truncated_factorization(const CausalModel& m, const Intervention& iv,
                                            const std::string& target) {
  const int n = m.num_variables();
  std::vector<bool> intervened(static_cast<std::size_t>(n), false);
  std::vector<int> forced(static_cast<std::size_t>(n), -1);
  for (const auto& [name, value] : iv.values.entries()) {
    int v = m.index_of(name);
    intervened[static_cast<std::size_t>(v)] = true;
    forced[static_cast<std::size_t>(v)] = m.value_index(v, value);
  }
  const int t = m.index_of(target);
  std::vector<double> mass(m.variable(t).domain.size(), 0.0);

  std::vector<int> value(static_cast<std::size_t>(n), 0);
  while (true) {
    bool consistent = true;
    for (int v = 0; v < n; ++v) {
      if (intervened[static_cast<std::size_t>(v)] &&
          value[static_cast<std::size_t>(v)] != forced[static_cast<std::size_t>(v)]) {
        consistent = false;
        break;
      }
    }
    if (consistent) {
      double p = 1.0;
      for (int v = 0; v < n; ++v) {
        if (intervened[static_cast<std::size_t>(v)]) continue;
        std::size_t row = 0;
        for (int par : m.parents_of(v)) {
          row = row * m.variable(par).domain.size() +
                static_cast<std::size_t>(value[static_cast<std::size_t>(par)]);
        }
        p *= m.cpt(v)[row][static_cast<std::size_t>(value[static_cast<std::size_t>(v)])];
      }
      mass[static_cast<std::size_t>(value[static_cast<std::size_t>(t)])] += p;
    }
    int k = n - 1;
    while (k >= 0) {
      if (++value[static_cast<std::size_t>(k)] <
          static_cast<int>(m.variable(k).domain.size())) {
        break;
      }
      value[static_cast<std::size_t>(k)] = 0;
      --k;
    }
    if (k < 0) break;
  }
  double total = 0.0;
  for (double p : mass) total += p;
  for (double& p : mass) p /= total;
  return Distribution{m.variable(t).domain, std::move(mass)};
}

// Σ_g Σ_c nesting of the belief-weighted expected utility, straight off the
// definition, one intervention per candidate action.
inline double weighted_expected_utility(const CausalDecisionProblem& cdp,
                                        const std::string& action) {
  const auto& action_var = cdp.family.action_variables[0];
  double eu = 0.0;
  for (std::size_t g = 0; g < cdp.family.models.size(); ++g) {
    Distribution d = truncated_factorization(cdp.family.models[g],
                                             Intervention{Assignment{{action_var, action}}},
                                             cdp.family.consequence_variable);
    double inner = 0.0;
    for (std::size_t c = 0; c < d.values.size(); ++c) {
      inner += cdp.utility.at(d.values[c]) * d.probs[c];
    }
    eu += cdp.prior.at(g) * inner;
  }
  return eu;
}

// Classical von Neumann–Morgenstern argmax for a known single model: best
// expected utility over the action domain, first maximum wins.
inline std::pair<std::string, double> vnm_argmax(const CausalModel& m,
                                                 const std::string& action_var,
                                                 const std::string& consequence_var,
                                                 const UtilityFunction& utility) {
  const auto& domain = m.variable(m.index_of(action_var)).domain;
  std::string best;
  double best_eu = 0.0;
  bool have = false;
  for (const auto& action : domain) {
    Distribution d = truncated_factorization(
        m, Intervention{Assignment{{action_var, action}}}, consequence_var);
    double eu = 0.0;
    for (std::size_t c = 0; c < d.values.size(); ++c) {
      eu += utility.at(d.values[c]) * d.probs[c];
    }
    if (!have || eu > best_eu) {
      best = action;
      best_eu = eu;
      have = true;
    }
  }
  return {best, best_eu};
}

// For a game whose (single) model fixes the consequence as a deterministic
// function of the action variables: read the one-hot CPT row, no inference.
inline std::string deterministic_consequence(const CausalModel& m,
                                             const std::vector<std::string>& action_vars,
                                             const std::vector<std::string>& actions,
                                             const std::string& consequence_var) {
  const int c = m.index_of(consequence_var);
  std::size_t row = 0;
  for (int par : m.parents_of(c)) {
    const auto& pvar = m.variable(par);
    int chosen = -1;
    for (std::size_t i = 0; i < action_vars.size(); ++i) {
      if (action_vars[i] == pvar.name) {
        chosen = m.value_index(par, actions[i]);
        break;
      }
    }
    row = row * pvar.domain.size() + static_cast<std::size_t>(chosen);
  }
  const auto& entries = m.cpt(c)[row];
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i] == 1.0) return m.variable(c).domain[i];
  }
  throw ModelError("consequence row is not deterministic");
}

// Textbook pure-Nash scan on the payoff matrix induced by a deterministic
// single-model game: build every payoff from the one-hot CPT and utilities,
// then keep profiles where nobody has any strictly better own-action swap.
inline std::vector<ActionProfile> pure_nash_deterministic(const CausalGame& game) {
  const auto& m = game.family.models[0];
  const std::size_t n = game.players.size();
  std::vector<const std::vector<std::string>*> domains(n);
  std::vector<std::string> action_vars(n);
  for (std::size_t i = 0; i < n; ++i) {
    action_vars[i] = game.players[i].action_variable;
    domains[i] = &m.variable(m.index_of(action_vars[i])).domain;
  }
  auto payoff = [&](const std::vector<std::string>& actions, std::size_t player) {
    std::string c =
        deterministic_consequence(m, action_vars, actions, game.family.consequence_variable);
    return game.players[player].utility.at(c);
  };

  std::vector<ActionProfile> equilibria;
  std::vector<std::size_t> counter(n, 0);
  while (true) {
    std::vector<std::string> actions(n);
    for (std::size_t i = 0; i < n; ++i) actions[i] = (*domains[i])[counter[i]];
    bool nash = true;
    for (std::size_t i = 0; i < n && nash; ++i) {
      double mine = payoff(actions, i);
      for (const auto& alternative : *domains[i]) {
        std::vector<std::string> deviated = actions;
        deviated[i] = alternative;
        if (payoff(deviated, i) > mine) {
          nash = false;
          break;
        }
      }
    }
    if (nash) equilibria.push_back(ActionProfile{actions});

    std::size_t k = n;
    while (k-- > 0) {
      if (++counter[k] < domains[k]->size()) break;
      counter[k] = 0;
      if (k == 0) return equilibria;
    }
  }
}

// Interim utilities of every (player, type) pair under one type-contingent
// strategy profile, straight from the definition: condition the player's own
// prior on the type's preimage, average the per-state utility of the action
// profile the signals dictate there.
inline std::vector<double> interim_utilities(const BayesianCausalGame& game,
                                             const ActionProfile& strategies) {
  const std::size_t num_states = game.states.models.size();
  std::vector<std::size_t> offset(game.players.size(), 0);
  for (std::size_t i = 1; i < game.players.size(); ++i) {
    offset[i] = offset[i - 1] + game.players[i - 1].signal.types.size();
  }
  std::vector<double> utilities;
  for (std::size_t i = 0; i < game.players.size(); ++i) {
    const auto& player = game.players[i];
    for (const auto& type : player.signal.types) {
      double mass = 0.0;
      for (std::size_t w = 0; w < num_states; ++w) {
        if (player.signal.signal[w] == type) mass += player.prior.at(w);
      }
      double eu = 0.0;
      for (std::size_t w = 0; w < num_states; ++w) {
        if (player.signal.signal[w] != type) continue;
        Intervention iv;
        for (std::size_t k = 0; k < game.players.size(); ++k) {
          const auto& sig = game.players[k].signal;
          std::size_t t = static_cast<std::size_t>(sig.type_index(sig.signal[w]));
          iv.values.set(game.players[k].action_variable, strategies.actions[offset[k] + t]);
        }
        Distribution d = truncated_factorization(game.states.models[w], iv,
                                                 game.states.consequence_variable);
        double inner = 0.0;
        for (std::size_t c = 0; c < d.values.size(); ++c) {
          inner += player.utility.at(d.values[c]) * d.probs[c];
        }
        eu += (player.prior.at(w) / mass) * inner;
      }
      utilities.push_back(eu);
    }
  }
  return utilities;
}

// Brute-force equilibrium scan over all type-contingent strategy profiles
// using interim_utilities only.
inline std::vector<ActionProfile> interim_equilibria(const BayesianCausalGame& game,
                                                     double tolerance = kDefaultTolerance) {
  const auto& m = game.states.models[0];
  std::vector<const std::vector<std::string>*> domains;
  for (const auto& player : game.players) {
    for (std::size_t t = 0; t < player.signal.types.size(); ++t) {
      domains.push_back(&m.variable(m.index_of(player.action_variable)).domain);
    }
  }
  const std::size_t n = domains.size();

  std::vector<ActionProfile> equilibria;
  std::vector<std::size_t> counter(n, 0);
  while (true) {
    ActionProfile profile;
    for (std::size_t j = 0; j < n; ++j) profile.actions.push_back((*domains[j])[counter[j]]);
    std::vector<double> mine = interim_utilities(game, profile);
    bool nash = true;
    for (std::size_t j = 0; j < n && nash; ++j) {
      for (const auto& alternative : *domains[j]) {
        if (alternative == profile.actions[j]) continue;
        ActionProfile deviated = profile;
        deviated.actions[j] = alternative;
        if (interim_utilities(game, deviated)[j] > mine[j] + tolerance) {
          nash = false;
          break;
        }
      }
    }
    if (nash) equilibria.push_back(profile);

    std::size_t k = n;
    while (k-- > 0) {
      if (++counter[k] < domains[k]->size()) break;
      counter[k] = 0;
      if (k == 0) return equilibria;
    }
  }
}

// Exact Bayes replay of a simulation's (profile, consequence) sequence,
// mirroring the "impossible observation leaves the belief alone" rule.
inline BeliefState replay_posterior(const CausalGame& game, const BeliefState& prior,
                                    const SimTrace& trace) {
  std::vector<double> weights = prior.weights();
  for (const auto& record : trace.records) {
    Intervention iv;
    for (std::size_t i = 0; i < game.players.size(); ++i) {
      iv.values.set(game.players[i].action_variable, record.profile.actions[i]);
    }
    std::vector<double> updated(weights.size(), 0.0);
    double total = 0.0;
    for (std::size_t k = 0; k < weights.size(); ++k) {
      Distribution d = truncated_factorization(game.family.models[k], iv,
                                               game.family.consequence_variable);
      updated[k] = weights[k] * d.at(record.consequence);
      total += updated[k];
    }
    if (total == 0.0) continue;
    for (double& w : updated) w /= total;
    weights = updated;
  }
  return BeliefState(weights);
}

}  // namespace oracles
