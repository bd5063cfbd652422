#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "causalgames/model.hpp"
#include "causalgames/types.hpp"

namespace causalgames {

// Probability vector over hypotheses (candidate models). Construction checks
// nonnegativity and normalization, so a BeliefState is valid by existence.
class BeliefState {
 public:
  BeliefState() = default;

  explicit BeliefState(std::vector<double> weights, double tolerance = kDefaultTolerance)
      : weights_(std::move(weights)) {
    double sum = 0.0;
    for (double w : weights_) {
      if (w < 0.0) throw ModelError("belief weight is negative");
      sum += w;
    }
    if (std::abs(sum - 1.0) > tolerance) {
      std::ostringstream out;
      out << "belief weights sum to " << sum << ", expected 1";
      throw ModelError(out.str());
    }
  }

  std::size_t size() const { return weights_.size(); }
  double at(std::size_t i) const { return weights_[i]; }
  const std::vector<double>& weights() const { return weights_; }

  friend bool operator==(const BeliefState& a, const BeliefState& b) {
    return a.weights_ == b.weights_;
  }

 private:
  std::vector<double> weights_;
};

// A set of candidate models of the same situation: identical variables and
// domains, differing only in structure and/or CPT entries. The decision maker
// controls the action variables; outcomes are read off the consequence
// variable. One action variable for a single decision maker, one per player
// in a game.
struct ModelFamily {
  std::vector<CausalModel> models;
  std::vector<std::string> action_variables;
  std::string consequence_variable;
};

inline std::vector<std::string> validate_family(const ModelFamily& f,
                                                double tolerance = kDefaultTolerance) {
  std::vector<std::string> violations;
  if (f.models.empty()) {
    violations.push_back("model family is empty");
    return violations;
  }
  for (std::size_t k = 0; k < f.models.size(); ++k) {
    std::ostringstream prefix;
    prefix << "model " << k << ": ";
    for (const auto& v : validate(f.models[k], tolerance)) {
      violations.push_back(prefix.str() + v);
    }
  }
  const auto& reference = f.models[0].variables();
  for (std::size_t k = 1; k < f.models.size(); ++k) {
    if (f.models[k].variables() != reference) {
      std::ostringstream out;
      out << "model " << k << ": variables differ from model 0";
      violations.push_back(out.str());
    }
  }
  for (std::size_t a = 0; a < f.action_variables.size(); ++a) {
    const auto& name = f.action_variables[a];
    if (!f.models[0].has_variable(name)) {
      violations.push_back("action variable '" + name + "' is not in the model");
    }
    for (std::size_t b = a + 1; b < f.action_variables.size(); ++b) {
      if (f.action_variables[b] == name) {
        violations.push_back("duplicate action variable '" + name + "'");
      }
    }
    if (name == f.consequence_variable) {
      violations.push_back("action variable '" + name + "' is also the consequence variable");
    }
  }
  if (!f.models[0].has_variable(f.consequence_variable)) {
    violations.push_back("consequence variable '" + f.consequence_variable +
                         "' is not in the model");
  }
  return violations;
}

// Real-valued payoff over the consequence variable's domain.
struct UtilityFunction {
  std::map<std::string, double> values;

  double at(const std::string& consequence) const {
    auto it = values.find(consequence);
    if (it == values.end()) {
      throw ModelError("no utility assigned to consequence '" + consequence + "'");
    }
    return it->second;
  }
};

inline std::vector<std::string> validate_utility(const UtilityFunction& u,
                                                 const std::vector<std::string>& domain) {
  std::vector<std::string> violations;
  for (const auto& value : domain) {
    if (!u.values.count(value)) {
      violations.push_back("no utility assigned to consequence '" + value + "'");
    }
  }
  for (const auto& [value, payoff] : u.values) {
    if (std::find(domain.begin(), domain.end(), value) == domain.end()) {
      violations.push_back("utility assigned to unknown consequence '" + value + "'");
    }
    if (!std::isfinite(payoff)) {
      violations.push_back("utility for consequence '" + value + "' is not finite");
    }
  }
  return violations;
}

// Single decision maker who is unsure which causal model is the true one:
// a family of candidates, a prior over them, and a utility on consequences.
struct CausalDecisionProblem {
  ModelFamily family;
  BeliefState prior;
  UtilityFunction utility;
};

inline std::vector<std::string> validate_cdp(const CausalDecisionProblem& cdp,
                                             double tolerance = kDefaultTolerance) {
  std::vector<std::string> violations = validate_family(cdp.family, tolerance);
  if (cdp.family.action_variables.size() != 1) {
    std::ostringstream out;
    out << "decision problem needs exactly 1 action variable, got "
        << cdp.family.action_variables.size();
    violations.push_back(out.str());
  }
  if (cdp.prior.size() != cdp.family.models.size()) {
    std::ostringstream out;
    out << "prior has " << cdp.prior.size() << " weights for " << cdp.family.models.size()
        << " models";
    violations.push_back(out.str());
  }
  if (!violations.empty()) return violations;
  const auto& domain =
      cdp.family.models[0].variable(cdp.family.models[0].index_of(cdp.family.consequence_variable))
          .domain;
  for (const auto& v : validate_utility(cdp.utility, domain)) violations.push_back(v);
  return violations;
}

namespace detail {

// Belief-weighted consequence distribution under do(iv): the mixture
// sum_k belief_k * P_k(consequence | do(iv)). The workhorse shared by the
// decision, game and simulation layers.
inline Distribution mixture_consequence_distribution(const ModelFamily& family,
                                                     const BeliefState& belief,
                                                     const Intervention& iv) {
  const auto& first = family.models[0];
  const auto& domain = first.variable(first.index_of(family.consequence_variable)).domain;
  std::vector<double> mixture(domain.size(), 0.0);
  for (std::size_t k = 0; k < family.models.size(); ++k) {
    Distribution d = interventional_query(family.models[k], iv, family.consequence_variable);
    for (std::size_t c = 0; c < domain.size(); ++c) {
      mixture[c] += belief.at(k) * d.probs[c];
    }
  }
  return Distribution{domain, std::move(mixture)};
}

}  // namespace detail

// Expected utility of do(action), averaging the interventional consequence
// distribution over the belief: sum_c u(c) * sum_k P_k(c | do(action)) * b_k.
// With a point-mass belief this reduces exactly (not approximately) to the
// expected utility under the believed model, because zero-weight terms
// contribute an exact 0.0 to the inner sum.
inline double causal_expected_utility(const CausalDecisionProblem& cdp,
                                      const std::string& action) {
  const auto& first = cdp.family.models[0];
  const auto& action_var = cdp.family.action_variables[0];
  first.value_index(first.index_of(action_var), action);  // rejects unknown actions
  Intervention iv{Assignment{{action_var, action}}};
  Distribution mixture =
      detail::mixture_consequence_distribution(cdp.family, cdp.prior, iv);
  double eu = 0.0;
  for (std::size_t c = 0; c < mixture.values.size(); ++c) {
    eu += cdp.utility.at(mixture.values[c]) * mixture.probs[c];
  }
  return eu;
}

// Best action and its expected utility. Ties break toward the value declared
// first in the action variable's domain (strict improvement to switch).
inline std::pair<std::string, double> optimal_action(const CausalDecisionProblem& cdp) {
  const auto& first = cdp.family.models[0];
  const auto& domain =
      first.variable(first.index_of(cdp.family.action_variables[0])).domain;
  std::string best;
  double best_eu = 0.0;
  bool have = false;
  for (const auto& action : domain) {
    double eu = causal_expected_utility(cdp, action);
    if (!have || eu > best_eu) {
      best = action;
      best_eu = eu;
      have = true;
    }
  }
  if (!have) throw ModelError("action variable has an empty domain");
  return {best, best_eu};
}

// Bayes update of the belief over models after intervening and observing the
// consequence: posterior_k proportional to P_k(observed | do(iv)) * prior_k.
// An observation no believed model can produce leaves nothing to normalize.
inline BeliefState update_beliefs(const ModelFamily& family, const BeliefState& prior,
                                  const Intervention& iv, const std::string& observed) {
  std::vector<double> posterior(family.models.size(), 0.0);
  double total = 0.0;
  for (std::size_t k = 0; k < family.models.size(); ++k) {
    Distribution d = interventional_query(family.models[k], iv, family.consequence_variable);
    double likelihood = d.at(observed);
    posterior[k] = likelihood * prior.at(k);
    total += posterior[k];
  }
  if (total == 0.0) {
    throw ModelError("observation impossible under all believed models");
  }
  for (double& w : posterior) w /= total;
  return BeliefState(std::move(posterior));
}

// Single-action-variable convenience used by the decision layer.
inline BeliefState update_beliefs(const ModelFamily& family, const BeliefState& prior,
                                  const std::string& action, const std::string& observed) {
  return update_beliefs(family, prior,
                        Intervention{Assignment{{family.action_variables[0], action}}},
                        observed);
}

}  // namespace causalgames
