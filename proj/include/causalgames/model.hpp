#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "causalgames/types.hpp"

namespace causalgames {

// Discrete causal graphical model: a directed graph over categorical
// variables, one conditional probability table per variable.
//
// CPT layout: cpt(v) holds one row per joint parent assignment. Rows are
// ordered lexicographically in the declared parent order (first parent most
// significant); entries within a row follow the variable's domain order.
// An empty row marks a missing table entry, reported by validate().
//
// Models are immutable after construction; every query below is a pure
// function, safe for concurrent reads.
class CausalModel {
 public:
  using CptRows = std::vector<std::vector<double>>;

  CausalModel() = default;

  // parents/cpts are keyed by variable name; a variable absent from either
  // map gets no parents / no rows. Unknown names throw ModelError
  // immediately since they cannot be represented.
  CausalModel(std::vector<Variable> variables,
              const std::map<std::string, std::vector<std::string>>& parents,
              std::map<std::string, CptRows> cpts)
      : variables_(std::move(variables)) {
    for (int i = 0; i < static_cast<int>(variables_.size()); ++i) {
      index_.emplace(variables_[i].name, i);  // keeps first on duplicates
    }
    parents_.resize(variables_.size());
    cpts_.resize(variables_.size());
    for (const auto& [child, parent_names] : parents) {
      int c = index_of(child);
      for (const auto& p : parent_names) {
        parents_[c].push_back(index_of(p));
      }
    }
    for (auto& [name, rows] : cpts) {
      cpts_[index_of(name)] = std::move(rows);
    }
  }

  int num_variables() const { return static_cast<int>(variables_.size()); }
  const std::vector<Variable>& variables() const { return variables_; }
  const Variable& variable(int i) const { return variables_[i]; }

  bool has_variable(const std::string& name) const { return index_.count(name) != 0; }

  int index_of(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw ModelError("unknown variable '" + name + "'");
    return it->second;
  }

  const std::vector<int>& parents_of(int i) const { return parents_[i]; }
  const CptRows& cpt(int i) const { return cpts_[i]; }

  int value_index(int var, const std::string& value) const {
    const auto& domain = variables_[var].domain;
    auto it = std::find(domain.begin(), domain.end(), value);
    if (it == domain.end()) {
      throw ModelError("value '" + value + "' is not in the domain of '" +
                       variables_[var].name + "'");
    }
    return static_cast<int>(it - domain.begin());
  }

  // Number of CPT rows the parent set calls for.
  std::size_t expected_rows(int var) const {
    std::size_t n = 1;
    for (int p : parents_[var]) n *= variables_[p].domain.size();
    return n;
  }

  // Row index for a total assignment given as per-variable value indices.
  std::size_t cpt_row_index(int var, const std::vector<int>& full) const {
    std::size_t row = 0;
    for (int p : parents_[var]) {
      row = row * variables_[p].domain.size() + static_cast<std::size_t>(full[p]);
    }
    return row;
  }

  friend bool operator==(const CausalModel& a, const CausalModel& b) {
    return a.variables_ == b.variables_ && a.parents_ == b.parents_ && a.cpts_ == b.cpts_;
  }

 private:
  std::vector<Variable> variables_;
  std::vector<std::vector<int>> parents_;
  std::vector<CptRows> cpts_;
  std::unordered_map<std::string, int> index_;
};

namespace detail {

// Value indices for a (possibly partial) assignment; -1 marks unassigned.
inline std::vector<int> to_value_indices(const CausalModel& m, const Assignment& a) {
  std::vector<int> idx(static_cast<std::size_t>(m.num_variables()), -1);
  for (const auto& [name, value] : a.entries()) {
    int v = m.index_of(name);
    idx[static_cast<std::size_t>(v)] = m.value_index(v, value);
  }
  return idx;
}

inline std::string render_assignment(const CausalModel& m, int var, std::size_t row) {
  const auto& parents = m.parents_of(var);
  std::vector<int> values(parents.size());
  for (std::size_t k = parents.size(); k-- > 0;) {
    std::size_t d = m.variable(parents[k]).domain.size();
    values[k] = static_cast<int>(row % d);
    row /= d;
  }
  std::ostringstream out;
  for (std::size_t k = 0; k < parents.size(); ++k) {
    if (k) out << ",";
    out << m.variable(parents[k]).name << "="
        << m.variable(parents[k]).domain[static_cast<std::size_t>(values[k])];
  }
  return out.str();
}

// CPT factor P(var = full[var] | parent values in full). Missing rows are a
// validation matter; hitting one here is an error.
inline double factor(const CausalModel& m, int var, const std::vector<int>& full) {
  const auto& rows = m.cpt(var);
  std::size_t row = m.cpt_row_index(var, full);
  if (row >= rows.size() || rows[row].empty()) {
    throw ModelError(m.variable(var).name + ": missing CPT row" +
                     (m.parents_of(var).empty() ? "" : " for " + render_assignment(m, var, row)));
  }
  return rows[row][static_cast<std::size_t>(full[var])];
}

// Runs fn on every completion of the partial assignment `idx` (-1 entries
// iterate their full domain, earlier variables most significant).
template <typename Fn>
inline void for_each_completion(const CausalModel& m, std::vector<int>& idx, Fn&& fn) {
  std::vector<int> free_vars;
  for (int v = 0; v < m.num_variables(); ++v) {
    if (idx[static_cast<std::size_t>(v)] < 0) free_vars.push_back(v);
  }
  for (int v : free_vars) idx[static_cast<std::size_t>(v)] = 0;
  while (true) {
    fn(idx);
    std::size_t k = free_vars.size();
    while (k-- > 0) {
      int v = free_vars[k];
      if (++idx[static_cast<std::size_t>(v)] <
          static_cast<int>(m.variable(v).domain.size())) {
        break;
      }
      idx[static_cast<std::size_t>(v)] = 0;
      if (k == 0) return;
    }
    if (free_vars.empty()) return;
  }
}

// Locates one directed cycle among the nodes Kahn's algorithm could not
// remove, and renders its members in declared variable order.
inline std::string find_cycle(const CausalModel& m, const std::vector<bool>& remaining) {
  int start = 0;
  while (!remaining[static_cast<std::size_t>(start)]) ++start;
  std::vector<int> path;
  std::vector<int> pos(static_cast<std::size_t>(m.num_variables()), -1);
  int cur = start;
  while (pos[static_cast<std::size_t>(cur)] < 0) {
    pos[static_cast<std::size_t>(cur)] = static_cast<int>(path.size());
    path.push_back(cur);
    for (int p : m.parents_of(cur)) {
      if (remaining[static_cast<std::size_t>(p)]) {
        cur = p;
        break;
      }
    }
  }
  std::vector<int> cycle(path.begin() + pos[static_cast<std::size_t>(cur)], path.end());
  std::sort(cycle.begin(), cycle.end());
  std::ostringstream out;
  out << "cycle: ";
  for (std::size_t k = 0; k < cycle.size(); ++k) {
    if (k) out << ",";
    out << m.variable(cycle[k]).name;
  }
  return out.str();
}

}  // namespace detail

// Checks every model invariant and returns one message per violation
// (empty means well-formed). Violations are values, not failures.
inline std::vector<std::string> validate(const CausalModel& m,
                                         double tolerance = kDefaultTolerance) {
  std::vector<std::string> violations;
  const int n = m.num_variables();

  for (int i = 0; i < n; ++i) {
    const auto& v = m.variable(i);
    for (int j = i + 1; j < n; ++j) {
      if (m.variable(j).name == v.name) {
        violations.push_back("duplicate variable name '" + v.name + "'");
      }
    }
    if (v.domain.empty()) violations.push_back(v.name + ": empty domain");
    for (std::size_t a = 0; a < v.domain.size(); ++a) {
      for (std::size_t b = a + 1; b < v.domain.size(); ++b) {
        if (v.domain[a] == v.domain[b]) {
          violations.push_back(v.name + ": duplicate domain value '" + v.domain[a] + "'");
        }
      }
    }
    const auto& parents = m.parents_of(i);
    for (std::size_t a = 0; a < parents.size(); ++a) {
      for (std::size_t b = a + 1; b < parents.size(); ++b) {
        if (parents[a] == parents[b]) {
          violations.push_back(v.name + ": duplicate parent '" +
                               m.variable(parents[a]).name + "'");
        }
      }
    }
  }

  // Acyclicity (Kahn). Nodes that never reach in-degree zero sit on or
  // behind a cycle; report one concrete cycle.
  {
    std::vector<int> in_degree(static_cast<std::size_t>(n), 0);
    for (int i = 0; i < n; ++i) {
      in_degree[static_cast<std::size_t>(i)] = static_cast<int>(m.parents_of(i).size());
    }
    std::vector<int> queue;
    for (int i = 0; i < n; ++i) {
      if (in_degree[static_cast<std::size_t>(i)] == 0) queue.push_back(i);
    }
    std::vector<bool> remaining(static_cast<std::size_t>(n), true);
    std::size_t removed = 0;
    while (!queue.empty()) {
      int v = queue.back();
      queue.pop_back();
      remaining[static_cast<std::size_t>(v)] = false;
      ++removed;
      for (int c = 0; c < n; ++c) {
        if (!remaining[static_cast<std::size_t>(c)]) continue;
        for (int p : m.parents_of(c)) {
          if (p == v && --in_degree[static_cast<std::size_t>(c)] == 0) {
            queue.push_back(c);
          }
        }
      }
    }
    if (removed < static_cast<std::size_t>(n)) {
      violations.push_back(detail::find_cycle(m, remaining));
    }
  }

  for (int i = 0; i < n; ++i) {
    const auto& v = m.variable(i);
    const auto& rows = m.cpt(i);
    const std::size_t expected = m.expected_rows(i);
    if (rows.size() != expected) {
      std::ostringstream out;
      out << v.name << ": expected " << expected << " CPT rows, got " << rows.size();
      violations.push_back(out.str());
      continue;
    }
    for (std::size_t r = 0; r < rows.size(); ++r) {
      std::string where = m.parents_of(i).empty()
                              ? v.name + ": row"
                              : v.name + ": row for " + detail::render_assignment(m, i, r);
      if (rows[r].empty()) {
        violations.push_back(where + " is missing");
        continue;
      }
      if (rows[r].size() != v.domain.size()) {
        std::ostringstream out;
        out << where << " has " << rows[r].size() << " entries, expected " << v.domain.size();
        violations.push_back(out.str());
        continue;
      }
      double sum = 0.0;
      bool negative = false;
      for (double p : rows[r]) {
        if (p < 0.0) negative = true;
        sum += p;
      }
      if (negative) violations.push_back(where + " has a negative entry");
      if (std::abs(sum - 1.0) > tolerance) {
        std::ostringstream out;
        out << where << " sums to " << sum;
        violations.push_back(out.str());
      }
    }
  }
  return violations;
}

// Chain-rule product over the DAG. The assignment must be total.
inline double joint_probability(const CausalModel& m, const Assignment& total) {
  std::vector<int> idx = detail::to_value_indices(m, total);
  for (int v = 0; v < m.num_variables(); ++v) {
    if (idx[static_cast<std::size_t>(v)] < 0) {
      throw ModelError("incomplete assignment: variable '" + m.variable(v).name +
                       "' unassigned");
    }
  }
  double p = 1.0;
  for (int v = 0; v < m.num_variables(); ++v) {
    p *= detail::factor(m, v, idx);
  }
  return p;
}

// Exact conditional by enumeration: sums the joint over all completions of
// the evidence, then normalizes over the target's domain.
inline Distribution observational_query(const CausalModel& m, const std::string& target,
                                        const Assignment& evidence = {}) {
  int t = m.index_of(target);
  if (evidence.contains(target)) {
    throw ModelError("evidence assigns the query target '" + target + "'");
  }
  std::vector<int> idx = detail::to_value_indices(m, evidence);
  const auto& domain = m.variable(t).domain;
  std::vector<double> mass(domain.size(), 0.0);
  detail::for_each_completion(m, idx, [&](const std::vector<int>& full) {
    double p = 1.0;
    for (int v = 0; v < m.num_variables(); ++v) {
      p *= detail::factor(m, v, full);
    }
    mass[static_cast<std::size_t>(full[static_cast<std::size_t>(t)])] += p;
  });
  double total = 0.0;
  for (double p : mass) total += p;
  if (total == 0.0) {
    throw ModelError("conditioning on null event: evidence has probability 0");
  }
  for (double& p : mass) p /= total;
  return Distribution{domain, std::move(mass)};
}

// Graph surgery for do(): every intervened variable loses its parents and
// gets a one-point CPT on the forced value; everything else is untouched.
inline CausalModel mutilate(const CausalModel& m, const Intervention& iv) {
  std::map<std::string, std::vector<std::string>> parents;
  std::map<std::string, CausalModel::CptRows> cpts;
  for (int v = 0; v < m.num_variables(); ++v) {
    const auto& var = m.variable(v);
    if (iv.values.contains(var.name)) {
      int forced = m.value_index(v, iv.values.at(var.name));
      std::vector<double> row(var.domain.size(), 0.0);
      row[static_cast<std::size_t>(forced)] = 1.0;
      cpts[var.name] = {row};
    } else {
      std::vector<std::string> names;
      for (int p : m.parents_of(v)) names.push_back(m.variable(p).name);
      parents[var.name] = std::move(names);
      cpts[var.name] = m.cpt(v);
    }
  }
  // Unknown intervened names would otherwise pass through silently.
  for (const auto& [name, value] : iv.values.entries()) {
    m.value_index(m.index_of(name), value);
  }
  return CausalModel(m.variables(), parents, std::move(cpts));
}

// P(target | do(iv), extra_evidence): the conditional in the mutilated model,
// i.e. the truncated-factorization distribution.
inline Distribution interventional_query(const CausalModel& m, const Intervention& iv,
                                         const std::string& target,
                                         const Assignment& extra_evidence = {}) {
  if (iv.values.contains(target)) {
    throw ModelError("query target '" + target + "' is intervened on");
  }
  return observational_query(mutilate(m, iv), target, extra_evidence);
}

}  // namespace causalgames
