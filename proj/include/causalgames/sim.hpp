#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "causalgames/decision.hpp"
#include "causalgames/games.hpp"
#include "causalgames/model.hpp"
#include "causalgames/types.hpp"

namespace causalgames {

struct SimConfig {
  int true_model_index = 0;   // which family member actually generates outcomes
  int rounds = 1;
  double exploration_rate = 0.0;  // chance a player ignores the greedy choice
  std::uint64_t rng_seed = 0;
  int log_period = 1;  // trace CSV keeps every log_period-th round
};

// One round as it happened: the profile actually played, the shared outcome,
// payoffs as the players valued them when choosing (pre-update beliefs), and
// beliefs after everyone processed the outcome.
struct RoundRecord {
  int round = 0;  // 1-based
  ActionProfile profile;
  std::string consequence;
  std::vector<double> utilities;
  std::vector<BeliefState> beliefs;
};

struct SimTrace {
  std::string generator = "mt19937_64";
  SimConfig config;
  ActionProfile initial_profile;  // fictitious round-0 play everyone responds to first
  std::vector<RoundRecord> records;
  std::vector<std::string> events;
  std::map<std::string, std::size_t> profile_counts;  // key: actions joined with '|'
  std::size_t hit_window = 0;        // number of final rounds scored
  double equilibrium_hit_rate = 0.0; // fraction of them whose greedy play is an equilibrium
};

// Per-round convergence diagnostics: for every round, the profile greedy
// (exploration-free) play would have produced, and whether that profile is an
// equilibrium of the game under the beliefs the players held going in.
struct ConvergenceReport {
  std::size_t window = 0;
  double hit_rate = 0.0;
  std::vector<ActionProfile> greedy_profiles;
  std::vector<bool> greedy_is_equilibrium;
};

namespace detail {

// 53-bit uniform in [0,1); spelled out so traces do not depend on how a
// standard-library distribution consumes the generator.
inline double u01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);
}

inline std::string profile_key(const ActionProfile& profile) {
  std::ostringstream out;
  for (std::size_t i = 0; i < profile.actions.size(); ++i) {
    if (i) out << "|";
    out << profile.actions[i];
  }
  return out.str();
}

// Player's best reply to the others' last observed actions under an explicit
// belief; ties break toward the action declared first in the domain.
inline std::string best_response(const CausalGame& game, std::size_t player,
                                 const BeliefState& belief, const ActionProfile& previous) {
  const auto& first = game.family.models[0];
  const auto& domain = first.variable(first.index_of(game.players[player].action_variable)).domain;
  const auto& utility = game.players[player].utility;
  std::string best;
  double best_eu = 0.0;
  bool have = false;
  for (const auto& action : domain) {
    ActionProfile candidate = previous;
    candidate.actions[player] = action;
    Distribution mixture = mixture_consequence_distribution(
        game.family, belief, profile_intervention(game, candidate));
    double eu = 0.0;
    for (std::size_t c = 0; c < mixture.values.size(); ++c) {
      eu += utility.at(mixture.values[c]) * mixture.probs[c];
    }
    if (!have || eu > best_eu) {
      best = action;
      best_eu = eu;
      have = true;
    }
  }
  return best;
}

inline ActionProfile greedy_profile(const CausalGame& game,
                                    const std::vector<BeliefState>& beliefs,
                                    const ActionProfile& previous) {
  ActionProfile greedy = previous;
  for (std::size_t i = 0; i < game.players.size(); ++i) {
    greedy.actions[i] = best_response(game, i, beliefs[i], previous);
  }
  return greedy;
}

inline std::string sample_value(const Distribution& d, double u) {
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t c = 0; c < d.values.size(); ++c) {
    if (d.probs[c] > 0.0) last_positive = c;
    cumulative += d.probs[c];
    if (u < cumulative) return d.values[c];
  }
  return d.values[last_positive];  // u landed in rounding slack past the last step
}

}  // namespace detail

// Scores the greedy (exploration-free) profile of every round: recomputes
// what best response to the previous round's observed play would have been
// under the beliefs in force at decision time, and asks whether that profile
// is an equilibrium of the game evaluated at those beliefs. The headline
// hit rate covers the final 10% of rounds (at least one).
inline ConvergenceReport convergence_report(const SimTrace& trace, const CausalGame& game,
                                            double tolerance = kDefaultTolerance) {
  ConvergenceReport report;
  const std::size_t rounds = trace.records.size();
  std::vector<BeliefState> beliefs;
  for (const auto& p : game.players) beliefs.push_back(p.belief);
  const ActionProfile* previous = &trace.initial_profile;
  for (std::size_t r = 0; r < rounds; ++r) {
    ActionProfile greedy = detail::greedy_profile(game, beliefs, *previous);
    EquilibriumCheck check =
        is_causal_nash_equilibrium(with_beliefs(game, beliefs), greedy, tolerance);
    report.greedy_profiles.push_back(std::move(greedy));
    report.greedy_is_equilibrium.push_back(check.is_equilibrium);
    previous = &trace.records[r].profile;
    beliefs = trace.records[r].beliefs;
  }
  report.window = rounds == 0 ? 0 : (rounds + 9) / 10;
  std::size_t hits = 0;
  for (std::size_t r = rounds - report.window; r < rounds; ++r) {
    if (report.greedy_is_equilibrium[r]) ++hits;
  }
  report.hit_rate = report.window == 0 ? 0.0 : static_cast<double>(hits) /
                                                   static_cast<double>(report.window);
  return report;
}

// Repeated play against a fixed ground truth. Each round every player best
// responds to the previous round's observed profile under her current belief
// (round 1 responds to a uniformly drawn opening profile), explores uniformly
// with probability exploration_rate, then the true model generates one shared
// consequence under do(full profile) and everyone updates beliefs with the
// full-profile interventional likelihood. Identical (game, config) inputs
// reproduce the trace bit for bit.
inline SimTrace run_simulation(const CausalGame& game, const SimConfig& config,
                               double tolerance = kDefaultTolerance) {
  if (config.true_model_index < 0 ||
      static_cast<std::size_t>(config.true_model_index) >= game.family.models.size()) {
    std::ostringstream out;
    out << "true_model_index " << config.true_model_index << " is out of range for "
        << game.family.models.size() << " models";
    throw ModelError(out.str());
  }
  if (config.rounds < 1) throw ModelError("rounds must be positive");
  if (config.exploration_rate < 0.0 || config.exploration_rate > 1.0) {
    throw ModelError("exploration_rate must be in [0,1]");
  }
  if (config.log_period < 1) throw ModelError("log_period must be positive");

  const auto& first = game.family.models[0];
  const CausalModel& truth =
      game.family.models[static_cast<std::size_t>(config.true_model_index)];
  std::vector<const std::vector<std::string>*> domains(game.players.size());
  for (std::size_t i = 0; i < game.players.size(); ++i) {
    domains[i] = &first.variable(first.index_of(game.players[i].action_variable)).domain;
  }

  std::mt19937_64 rng(config.rng_seed);
  SimTrace trace;
  trace.config = config;

  for (std::size_t i = 0; i < game.players.size(); ++i) {
    trace.initial_profile.actions.push_back(
        (*domains[i])[static_cast<std::size_t>(rng() % domains[i]->size())]);
  }

  std::vector<BeliefState> beliefs;
  for (const auto& p : game.players) beliefs.push_back(p.belief);
  ActionProfile previous = trace.initial_profile;

  for (int r = 1; r <= config.rounds; ++r) {
    ActionProfile played = detail::greedy_profile(game, beliefs, previous);
    for (std::size_t i = 0; i < game.players.size(); ++i) {
      if (detail::u01(rng) < config.exploration_rate) {
        played.actions[i] = (*domains[i])[static_cast<std::size_t>(rng() % domains[i]->size())];
      }
    }

    Intervention iv = detail::profile_intervention(game, played);
    Distribution outcome_dist =
        interventional_query(truth, iv, game.family.consequence_variable);
    std::string consequence = detail::sample_value(outcome_dist, detail::u01(rng));

    RoundRecord record;
    record.round = r;
    record.profile = played;
    record.consequence = consequence;
    record.utilities = detail::profile_utilities(game, played, beliefs);

    for (std::size_t i = 0; i < game.players.size(); ++i) {
      try {
        beliefs[i] = update_beliefs(game.family, beliefs[i], iv, consequence);
      } catch (const ModelError& err) {
        std::ostringstream event;
        event << "round " << r << ": player " << i << " belief unchanged (" << err.what() << ")";
        trace.events.push_back(event.str());
      }
    }
    record.beliefs = beliefs;
    ++trace.profile_counts[detail::profile_key(played)];
    trace.records.push_back(std::move(record));
    previous = played;
  }

  ConvergenceReport convergence = convergence_report(trace, game, tolerance);
  trace.hit_window = convergence.window;
  trace.equilibrium_hit_rate = convergence.hit_rate;
  return trace;
}

}  // namespace causalgames
