#pragma once

#include <cstddef>
#include <initializer_list>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace causalgames {

inline constexpr const char* kVersion = "0.1.0";

// Absolute tolerance used for normalization checks and for the strictness
// margin when comparing utilities. One value for the whole library; the CLI
// can override it per invocation.
inline constexpr double kDefaultTolerance = 1e-9;

// Cap on exhaustive profile scans (action profiles or type-contingent
// strategy profiles).
inline constexpr std::size_t kDefaultMaxProfiles = 1'000'000;

// Violation of a domain rule: invalid model, impossible observation,
// ill-posed query. Maps to exit code 1 in the CLI.
class ModelError : public std::runtime_error {
 public:
  explicit ModelError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed file or configuration. Maps to exit code 2 in the CLI.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// A categorical variable with an ordered domain. Domain order is load-bearing
// throughout: CPT columns, tie-breaking and profile enumeration follow it.
struct Variable {
  std::string name;
  std::vector<std::string> domain;

  friend bool operator==(const Variable&, const Variable&) = default;
};

// Partial or total map variable name -> domain value. Validity against a
// concrete model is checked at the point of use.
class Assignment {
 public:
  Assignment() = default;
  Assignment(std::initializer_list<std::pair<const std::string, std::string>> init)
      : entries_(init) {}

  void set(const std::string& var, const std::string& value) { entries_[var] = value; }
  bool contains(const std::string& var) const { return entries_.count(var) != 0; }

  const std::string& at(const std::string& var) const {
    auto it = entries_.find(var);
    if (it == entries_.end()) {
      throw ModelError("assignment does not cover variable '" + var + "'");
    }
    return it->second;
  }

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::map<std::string, std::string>& entries() const { return entries_; }

  friend bool operator==(const Assignment&, const Assignment&) = default;

 private:
  std::map<std::string, std::string> entries_;
};

// do(X1=x1,...,Xk=xk). Distinct from observational evidence: applying an
// intervention severs the incoming edges of every intervened variable.
struct Intervention {
  Assignment values;

  friend bool operator==(const Intervention&, const Intervention&) = default;
};

// A probability distribution over one variable's domain, kept in domain order
// so iteration and argmax are deterministic.
struct Distribution {
  std::vector<std::string> values;
  std::vector<double> probs;

  double at(const std::string& value) const {
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (values[i] == value) return probs[i];
    }
    throw ModelError("value '" + value + "' is not in the distribution's domain");
  }

  friend bool operator==(const Distribution&, const Distribution&) = default;
};

}  // namespace causalgames
