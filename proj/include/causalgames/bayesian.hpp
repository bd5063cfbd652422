#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "causalgames/decision.hpp"
#include "causalgames/games.hpp"
#include "causalgames/model.hpp"
#include "causalgames/types.hpp"

namespace causalgames {

// What a player privately learns before acting: each state of the world
// (candidate model) emits one of the player's type labels. signal[w] is the
// label observed when state w is the true one.
struct SignalFunction {
  std::vector<std::string> types;
  std::vector<std::string> signal;

  int type_index(const std::string& type) const {
    auto it = std::find(types.begin(), types.end(), type);
    if (it == types.end()) throw ModelError("unknown type '" + type + "'");
    return static_cast<int>(it - types.begin());
  }
};

struct BayesianPlayer {
  std::string action_variable;
  UtilityFunction utility;
  BeliefState prior;      // over states, before observing the signal
  SignalFunction signal;
};

// Game of incomplete information over which causal model is in force. The
// states of the world are the family's models; players observe only their
// own signal and update their prior on its preimage.
struct BayesianCausalGame {
  ModelFamily states;
  std::vector<BayesianPlayer> players;
};

inline BayesianCausalGame make_bayesian_game(std::vector<CausalModel> states,
                                             std::string consequence_variable,
                                             std::vector<BayesianPlayer> players) {
  BayesianCausalGame game;
  game.states.models = std::move(states);
  game.states.consequence_variable = std::move(consequence_variable);
  for (const auto& p : players) game.states.action_variables.push_back(p.action_variable);
  game.players = std::move(players);
  return game;
}

inline std::vector<std::string> validate_bayesian_game(const BayesianCausalGame& game,
                                                       double tolerance = kDefaultTolerance) {
  std::vector<std::string> violations = validate_family(game.states, tolerance);
  if (game.players.empty()) violations.push_back("game has no players");
  if (game.states.action_variables.size() != game.players.size()) {
    violations.push_back("family action variables do not match the player list");
  }
  if (!violations.empty()) return violations;
  const std::size_t num_states = game.states.models.size();
  const auto& first = game.states.models[0];
  const auto& consequence_domain =
      first.variable(first.index_of(game.states.consequence_variable)).domain;
  for (std::size_t i = 0; i < game.players.size(); ++i) {
    std::ostringstream prefix;
    prefix << "player " << i << ": ";
    const auto& player = game.players[i];
    if (player.prior.size() != num_states) {
      std::ostringstream out;
      out << prefix.str() << "prior has " << player.prior.size() << " weights for "
          << num_states << " states";
      violations.push_back(out.str());
    }
    if (player.signal.signal.size() != num_states) {
      std::ostringstream out;
      out << prefix.str() << "signal function covers " << player.signal.signal.size()
          << " states, expected " << num_states;
      violations.push_back(out.str());
    }
    if (player.signal.types.empty()) {
      violations.push_back(prefix.str() + "no types declared");
    }
    for (std::size_t a = 0; a < player.signal.types.size(); ++a) {
      for (std::size_t b = a + 1; b < player.signal.types.size(); ++b) {
        if (player.signal.types[a] == player.signal.types[b]) {
          violations.push_back(prefix.str() + "duplicate type '" + player.signal.types[a] + "'");
        }
      }
    }
    for (std::size_t w = 0; w < player.signal.signal.size(); ++w) {
      const auto& label = player.signal.signal[w];
      if (std::find(player.signal.types.begin(), player.signal.types.end(), label) ==
          player.signal.types.end()) {
        std::ostringstream out;
        out << prefix.str() << "state " << w << " signals unknown type '" << label << "'";
        violations.push_back(out.str());
      }
    }
    // A type the player assigns no prior mass to cannot be conditioned on.
    if (player.prior.size() == num_states && player.signal.signal.size() == num_states) {
      for (const auto& type : player.signal.types) {
        double mass = 0.0;
        for (std::size_t w = 0; w < num_states; ++w) {
          if (player.signal.signal[w] == type) mass += player.prior.at(w);
        }
        if (mass == 0.0) {
          violations.push_back(prefix.str() + "type '" + type + "' has zero prior probability");
        }
      }
    }
    for (const auto& v : validate_utility(player.utility, consequence_domain)) {
      violations.push_back(prefix.str() + v);
    }
  }
  return violations;
}

// Bayes-consistent belief over states after observing one's own type: the
// prior restricted to the type's preimage, renormalized.
inline BeliefState posterior_given_signal(const BayesianCausalGame& game, int player,
                                          const std::string& type) {
  const auto& p = game.players[static_cast<std::size_t>(player)];
  std::ostringstream who;
  who << "player " << player;
  int t = -1;
  for (std::size_t k = 0; k < p.signal.types.size(); ++k) {
    if (p.signal.types[k] == type) t = static_cast<int>(k);
  }
  if (t < 0) throw ModelError(who.str() + " has no type '" + type + "'");
  std::vector<double> weights(p.prior.size(), 0.0);
  double mass = 0.0;
  for (std::size_t w = 0; w < p.prior.size(); ++w) {
    if (p.signal.signal[w] == type) {
      weights[w] = p.prior.at(w);
      mass += weights[w];
    }
  }
  if (mass == 0.0) {
    throw ModelError("type '" + type + "' has zero prior probability for " + who.str());
  }
  for (double& w : weights) w /= mass;
  return BeliefState(std::move(weights));
}

// One row of the induced complete-information game: an original player
// paired with one of their possible types, carrying the posterior that type
// commits them to.
struct InducedPlayer {
  int player = 0;
  std::string type;
  std::string action_variable;
  BeliefState belief;
};

struct InducedGame {
  std::vector<InducedPlayer> players;
};

// Expands (player, type) pairs in player order, types in declared order.
inline InducedGame build_induced_game(const BayesianCausalGame& game) {
  InducedGame induced;
  for (std::size_t i = 0; i < game.players.size(); ++i) {
    for (const auto& type : game.players[i].signal.types) {
      induced.players.push_back(InducedPlayer{static_cast<int>(i), type,
                                              game.players[i].action_variable,
                                              posterior_given_signal(game, static_cast<int>(i), type)});
    }
  }
  return induced;
}

namespace detail {

// Interim expected utility of every induced player under one strategy
// profile (an action per induced player). In each state the realized joint
// action is fixed by the signals, so the per-state consequence distribution
// is computed once and shared.
inline std::vector<double> strategy_utilities(const BayesianCausalGame& game,
                                              const InducedGame& induced,
                                              const ActionProfile& strategies) {
  const std::size_t num_states = game.states.models.size();
  const auto& first = game.states.models[0];
  const auto& domain = first.variable(first.index_of(game.states.consequence_variable)).domain;

  // induced_index[i][t] locates (player i, type t) in the induced list.
  std::vector<std::size_t> offset(game.players.size(), 0);
  for (std::size_t i = 1; i < game.players.size(); ++i) {
    offset[i] = offset[i - 1] + game.players[i - 1].signal.types.size();
  }

  // value[w][i]: player i's expected utility of the consequence in state w
  // when everyone plays what their signal dictates there.
  std::vector<std::vector<double>> value(num_states,
                                         std::vector<double>(game.players.size(), 0.0));
  for (std::size_t w = 0; w < num_states; ++w) {
    Intervention iv;
    for (std::size_t i = 0; i < game.players.size(); ++i) {
      std::size_t t = static_cast<std::size_t>(
          game.players[i].signal.type_index(game.players[i].signal.signal[w]));
      iv.values.set(game.players[i].action_variable, strategies.actions[offset[i] + t]);
    }
    Distribution d =
        interventional_query(game.states.models[w], iv, game.states.consequence_variable);
    for (std::size_t i = 0; i < game.players.size(); ++i) {
      double eu = 0.0;
      for (std::size_t c = 0; c < domain.size(); ++c) {
        eu += game.players[i].utility.at(domain[c]) * d.probs[c];
      }
      value[w][i] = eu;
    }
  }

  // Average over states with the induced player's posterior; the posterior
  // is zero off the type's preimage, so those states add an exact 0.
  std::vector<double> utilities(induced.players.size(), 0.0);
  for (std::size_t j = 0; j < induced.players.size(); ++j) {
    const auto& who = induced.players[j];
    double eu = 0.0;
    for (std::size_t w = 0; w < num_states; ++w) {
      eu += who.belief.at(w) * value[w][static_cast<std::size_t>(who.player)];
    }
    utilities[j] = eu;
  }
  return utilities;
}

}  // namespace detail

// Pure equilibria of the induced game: exhaustive search over type-contingent
// strategies, one action per (player, type) pair, lexicographic in induced
// player order. A deviation changes a single induced player's action, i.e.
// what one player does upon receiving one particular signal.
inline EquilibriumReport bayesian_causal_equilibria(const BayesianCausalGame& game,
                                                    std::size_t max_profiles = kDefaultMaxProfiles,
                                                    double tolerance = kDefaultTolerance) {
  InducedGame induced = build_induced_game(game);
  const std::size_t n = induced.players.size();
  const auto& first = game.states.models[0];
  std::vector<const std::vector<std::string>*> domains(n);
  for (std::size_t j = 0; j < n; ++j) {
    domains[j] = &first.variable(first.index_of(induced.players[j].action_variable)).domain;
  }
  std::size_t total = 1;
  for (std::size_t j = 0; j < n; ++j) {
    std::size_t size = domains[j]->size();
    if (size == 0) {
      total = 0;
      break;
    }
    if (total > max_profiles / size) {
      total = max_profiles + 1;
      break;
    }
    total *= size;
  }
  if (total > max_profiles) {
    std::ostringstream out;
    out << "search space too large: more than " << max_profiles << " strategy profiles";
    throw ModelError(out.str());
  }

  std::vector<std::size_t> strides(n, 1);
  for (std::size_t j = n; j-- > 1;) {
    strides[j - 1] = strides[j] * domains[j]->size();
  }

  std::vector<std::vector<double>> table(total);
  std::vector<int> counter(n, 0);
  for (std::size_t p = 0; p < total; ++p) {
    ActionProfile strategies;
    for (std::size_t j = 0; j < n; ++j) {
      strategies.actions.push_back((*domains[j])[static_cast<std::size_t>(counter[j])]);
    }
    table[p] = detail::strategy_utilities(game, induced, strategies);
    for (std::size_t j = n; j-- > 0;) {
      if (++counter[j] < static_cast<int>(domains[j]->size())) break;
      counter[j] = 0;
    }
  }

  EquilibriumReport report;
  std::fill(counter.begin(), counter.end(), 0);
  for (std::size_t p = 0; p < total; ++p) {
    ProfileEvaluation eval;
    for (std::size_t j = 0; j < n; ++j) {
      eval.profile.actions.push_back((*domains[j])[static_cast<std::size_t>(counter[j])]);
    }
    eval.utilities = table[p];
    for (std::size_t j = 0; j < n && !eval.deviation; ++j) {
      std::size_t base = p - static_cast<std::size_t>(counter[j]) * strides[j];
      for (std::size_t a = 0; a < domains[j]->size(); ++a) {
        if (a == static_cast<std::size_t>(counter[j])) continue;
        std::size_t q = base + a * strides[j];
        if (table[q][j] > eval.utilities[j] + tolerance) {
          eval.deviation = DeviationWitness{static_cast<int>(j), (*domains[j])[a], table[q][j]};
          break;
        }
      }
    }
    if (!eval.deviation) report.equilibria.push_back(eval.profile);
    report.evaluations.push_back(std::move(eval));
    for (std::size_t j = n; j-- > 0;) {
      if (++counter[j] < static_cast<int>(domains[j]->size())) break;
      counter[j] = 0;
    }
  }
  return report;
}

}  // namespace causalgames
