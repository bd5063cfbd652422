#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "causalgames/decision.hpp"
#include "causalgames/model.hpp"
#include "causalgames/types.hpp"

namespace causalgames {

// One participant in a causal game: the variable they set, what they want,
// and what they believe about which model is the true one. Players are
// identified by their position in the game's player list.
struct PlayerSpec {
  std::string action_variable;
  UtilityFunction utility;
  BeliefState belief;
};

// Simultaneous-move game played on a family of candidate causal models.
// Each player picks a value for their own action variable; the profile is
// applied as one joint intervention; payoffs are expected utilities of the
// consequence under each player's own belief over the models.
struct CausalGame {
  ModelFamily family;
  std::vector<PlayerSpec> players;
};

inline CausalGame make_game(std::vector<CausalModel> models, std::string consequence_variable,
                            std::vector<PlayerSpec> players) {
  CausalGame game;
  game.family.models = std::move(models);
  game.family.consequence_variable = std::move(consequence_variable);
  for (const auto& p : players) game.family.action_variables.push_back(p.action_variable);
  game.players = std::move(players);
  return game;
}

inline std::vector<std::string> validate_game(const CausalGame& game,
                                              double tolerance = kDefaultTolerance) {
  std::vector<std::string> violations = validate_family(game.family, tolerance);
  if (game.players.empty()) violations.push_back("game has no players");
  if (game.family.action_variables.size() != game.players.size()) {
    violations.push_back("family action variables do not match the player list");
  } else {
    for (std::size_t i = 0; i < game.players.size(); ++i) {
      if (game.family.action_variables[i] != game.players[i].action_variable) {
        std::ostringstream out;
        out << "player " << i << ": action variable differs from the family's";
        violations.push_back(out.str());
      }
    }
  }
  if (!violations.empty()) return violations;
  const auto& first = game.family.models[0];
  const auto& consequence_domain =
      first.variable(first.index_of(game.family.consequence_variable)).domain;
  for (std::size_t i = 0; i < game.players.size(); ++i) {
    std::ostringstream prefix;
    prefix << "player " << i << ": ";
    if (game.players[i].belief.size() != game.family.models.size()) {
      std::ostringstream out;
      out << prefix.str() << "belief has " << game.players[i].belief.size() << " weights for "
          << game.family.models.size() << " models";
      violations.push_back(out.str());
    }
    for (const auto& v : validate_utility(game.players[i].utility, consequence_domain)) {
      violations.push_back(prefix.str() + v);
    }
  }
  return violations;
}

// One action per player, in player order.
struct ActionProfile {
  std::vector<std::string> actions;

  friend bool operator==(const ActionProfile& a, const ActionProfile& b) {
    return a.actions == b.actions;
  }
};

// A profitable unilateral deviation: `player` switching to `better_action`
// earns `improved_utility` instead of their payoff in the profile at hand.
struct DeviationWitness {
  int player = 0;
  std::string better_action;
  double improved_utility = 0.0;
};

struct EquilibriumCheck {
  bool is_equilibrium = false;
  std::optional<DeviationWitness> witness;
};

// A profile together with each player's payoff and, when one exists, the
// first profitable deviation (lowest player, then their domain order).
struct ProfileEvaluation {
  ActionProfile profile;
  std::vector<double> utilities;
  std::optional<DeviationWitness> deviation;
};

struct EquilibriumReport {
  std::vector<ActionProfile> equilibria;
  std::vector<ProfileEvaluation> evaluations;
};

namespace detail {

inline Intervention profile_intervention(const CausalGame& game, const ActionProfile& profile) {
  if (profile.actions.size() != game.players.size()) {
    std::ostringstream out;
    out << "profile has " << profile.actions.size() << " actions for " << game.players.size()
        << " players";
    throw ModelError(out.str());
  }
  Intervention iv;
  for (std::size_t i = 0; i < game.players.size(); ++i) {
    iv.values.set(game.players[i].action_variable, profile.actions[i]);
  }
  return iv;
}

// Every player's payoff for one profile under the given beliefs, sharing the
// per-model consequence distributions (they do not depend on who is asking).
inline std::vector<double> profile_utilities(const CausalGame& game, const ActionProfile& profile,
                                             const std::vector<BeliefState>& beliefs) {
  Intervention iv = profile_intervention(game, profile);
  const auto& first = game.family.models[0];
  const auto& domain = first.variable(first.index_of(game.family.consequence_variable)).domain;
  std::vector<std::vector<double>> mixtures(game.players.size(),
                                            std::vector<double>(domain.size(), 0.0));
  for (std::size_t k = 0; k < game.family.models.size(); ++k) {
    Distribution d =
        interventional_query(game.family.models[k], iv, game.family.consequence_variable);
    for (std::size_t i = 0; i < game.players.size(); ++i) {
      for (std::size_t c = 0; c < domain.size(); ++c) {
        mixtures[i][c] += beliefs[i].at(k) * d.probs[c];
      }
    }
  }
  std::vector<double> utilities(game.players.size(), 0.0);
  for (std::size_t i = 0; i < game.players.size(); ++i) {
    for (std::size_t c = 0; c < domain.size(); ++c) {
      utilities[i] += game.players[i].utility.at(domain[c]) * mixtures[i][c];
    }
  }
  return utilities;
}

inline std::vector<double> profile_utilities(const CausalGame& game,
                                             const ActionProfile& profile) {
  std::vector<BeliefState> beliefs;
  for (const auto& p : game.players) beliefs.push_back(p.belief);
  return profile_utilities(game, profile, beliefs);
}

}  // namespace detail

// Player's belief-weighted distribution over consequences when the whole
// profile is imposed as a joint intervention.
inline Distribution consequence_distribution(const CausalGame& game, int player,
                                             const ActionProfile& profile) {
  return detail::mixture_consequence_distribution(
      game.family, game.players[static_cast<std::size_t>(player)].belief,
      detail::profile_intervention(game, profile));
}

// Expected utility of the profile for one player under their own belief.
inline double causal_utility(const CausalGame& game, int player, const ActionProfile& profile) {
  Distribution mixture = consequence_distribution(game, player, profile);
  const auto& utility = game.players[static_cast<std::size_t>(player)].utility;
  double eu = 0.0;
  for (std::size_t c = 0; c < mixture.values.size(); ++c) {
    eu += utility.at(mixture.values[c]) * mixture.probs[c];
  }
  return eu;
}

// A profile is an equilibrium when no player can gain more than `tolerance`
// by changing only their own action. Returns the first profitable deviation
// found (players in order, alternatives in domain order) when there is one.
inline EquilibriumCheck is_causal_nash_equilibrium(const CausalGame& game,
                                                   const ActionProfile& profile,
                                                   double tolerance = kDefaultTolerance) {
  std::vector<double> utilities = detail::profile_utilities(game, profile);
  const auto& first = game.family.models[0];
  for (std::size_t i = 0; i < game.players.size(); ++i) {
    const auto& domain =
        first.variable(first.index_of(game.players[i].action_variable)).domain;
    for (const auto& alternative : domain) {
      if (alternative == profile.actions[i]) continue;
      ActionProfile deviated = profile;
      deviated.actions[i] = alternative;
      double eu = causal_utility(game, static_cast<int>(i), deviated);
      if (eu > utilities[i] + tolerance) {
        return {false, DeviationWitness{static_cast<int>(i), alternative, eu}};
      }
    }
  }
  return {true, std::nullopt};
}

// Exhaustive pure-profile search. Evaluates every profile in lexicographic
// order (first player's action most significant), computing all payoffs once
// and checking deviations by table lookup.
inline EquilibriumReport enumerate_equilibria(const CausalGame& game,
                                              std::size_t max_profiles = kDefaultMaxProfiles,
                                              double tolerance = kDefaultTolerance) {
  const auto& first = game.family.models[0];
  const std::size_t n = game.players.size();
  std::vector<const std::vector<std::string>*> domains(n);
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) {
    domains[i] = &first.variable(first.index_of(game.players[i].action_variable)).domain;
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t size = domains[i]->size();
    if (size == 0) {
      total = 0;  // a player with no actions leaves nothing to enumerate
      break;
    }
    if (total > max_profiles / size) {
      total = max_profiles + 1;  // saturate, exact count no longer matters
      break;
    }
    total *= size;
  }
  if (total > max_profiles) {
    std::ostringstream out;
    out << "search space too large: more than " << max_profiles << " action profiles";
    throw ModelError(out.str());
  }

  // Last player varies fastest; strides let a unilateral deviation jump
  // straight to the deviated profile's table entry.
  std::vector<std::size_t> strides(n, 1);
  for (std::size_t i = n; i-- > 1;) {
    strides[i - 1] = strides[i] * domains[i]->size();
  }

  std::vector<std::vector<double>> table(total);
  std::vector<int> counter(n, 0);
  for (std::size_t p = 0; p < total; ++p) {
    ActionProfile profile;
    for (std::size_t i = 0; i < n; ++i) {
      profile.actions.push_back((*domains[i])[static_cast<std::size_t>(counter[i])]);
    }
    table[p] = detail::profile_utilities(game, profile);
    for (std::size_t i = n; i-- > 0;) {
      if (++counter[i] < static_cast<int>(domains[i]->size())) break;
      counter[i] = 0;
    }
  }

  EquilibriumReport report;
  std::fill(counter.begin(), counter.end(), 0);
  for (std::size_t p = 0; p < total; ++p) {
    ProfileEvaluation eval;
    for (std::size_t i = 0; i < n; ++i) {
      eval.profile.actions.push_back((*domains[i])[static_cast<std::size_t>(counter[i])]);
    }
    eval.utilities = table[p];
    for (std::size_t i = 0; i < n && !eval.deviation; ++i) {
      std::size_t base = p - static_cast<std::size_t>(counter[i]) * strides[i];
      for (std::size_t a = 0; a < domains[i]->size(); ++a) {
        if (a == static_cast<std::size_t>(counter[i])) continue;
        std::size_t q = base + a * strides[i];
        if (table[q][i] > eval.utilities[i] + tolerance) {
          eval.deviation = DeviationWitness{static_cast<int>(i), (*domains[i])[a], table[q][i]};
          break;
        }
      }
    }
    if (!eval.deviation) report.equilibria.push_back(eval.profile);
    report.evaluations.push_back(std::move(eval));
    for (std::size_t i = n; i-- > 0;) {
      if (++counter[i] < static_cast<int>(domains[i]->size())) break;
      counter[i] = 0;
    }
  }
  return report;
}

// Same game, different state of mind: replaces every player's belief.
inline CausalGame with_beliefs(const CausalGame& game, const std::vector<BeliefState>& beliefs) {
  if (beliefs.size() != game.players.size()) {
    throw ModelError("belief count does not match player count");
  }
  CausalGame updated = game;
  for (std::size_t i = 0; i < beliefs.size(); ++i) {
    updated.players[i].belief = beliefs[i];
  }
  return updated;
}

}  // namespace causalgames
