#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace dnlearn {

enum class VariableKind { Action, Before, Outcome };

std::string to_string(VariableKind k);
VariableKind kind_from_string(const std::string& s);

/// Partial assignment of Boolean variables, kept sorted by variable name.
class Assignment {
 public:
  Assignment() = default;
  explicit Assignment(std::initializer_list<std::pair<std::string, bool>> items);

  void set(const std::string& var, bool value);
  void erase(const std::string& var);
  [[nodiscard]] std::optional<bool> get(const std::string& var) const;
  [[nodiscard]] bool at(const std::string& var) const;  // throws if absent
  [[nodiscard]] bool contains(const std::string& var) const;
  [[nodiscard]] std::size_t size() const { return items_.size(); }
  [[nodiscard]] bool empty() const { return items_.empty(); }

  [[nodiscard]] Assignment restricted_to(const std::set<std::string>& vars) const;
  /// Union of two assignments; returns nullopt if they disagree on a shared variable.
  [[nodiscard]] std::optional<Assignment> merged_with(const Assignment& other) const;
  [[nodiscard]] bool consistent_with(const Assignment& other) const;
  /// True when every (var, value) pair of `other` also appears here.
  [[nodiscard]] bool extends(const Assignment& other) const;

  [[nodiscard]] std::set<std::string> variables() const;

  auto begin() const { return items_.begin(); }
  auto end() const { return items_.end(); }

  bool operator==(const Assignment& other) const = default;
  bool operator<(const Assignment& other) const { return items_ < other.items_; }

  [[nodiscard]] std::string to_string() const;

 private:
  std::vector<std::pair<std::string, bool>> items_;
};

/// One interaction: what the agent saw before acting, what it did, what followed.
struct Trial {
  Assignment before;
  Assignment action;
  Assignment outcome;
  double reward = 0.0;

  [[nodiscard]] Assignment full_state() const;
};

/// Single-stage decision network over Boolean variables.
///
/// Chance variables split into Before (non-descendants of actions) and
/// Outcome (descendants of actions); actions are parentless.  A reward table
/// over reward_domain (a subset of the chance variables) plays the utility
/// node.  Tables use the canonical enumeration: the first-listed parent (or
/// reward-domain variable) is the least-significant bit and value 0 precedes 1.
class DecisionNetwork {
 public:
  struct Variable {
    std::string name;
    VariableKind kind = VariableKind::Before;
  };

  DecisionNetwork() = default;

  int add_variable(const std::string& name, VariableKind kind);
  void set_parents(const std::string& var, const std::vector<std::string>& parents);
  void set_cpt(const std::string& var, std::vector<double> table);
  void set_reward(const std::vector<std::string>& domain, std::vector<double> table);

  [[nodiscard]] int num_variables() const { return static_cast<int>(vars_.size()); }
  [[nodiscard]] bool has_variable(const std::string& name) const;
  [[nodiscard]] int index_of(const std::string& name) const;  // throws if unknown
  [[nodiscard]] const Variable& variable(int idx) const { return vars_.at(idx); }
  [[nodiscard]] const std::string& name_of(int idx) const { return vars_.at(idx).name; }
  [[nodiscard]] VariableKind kind_of(const std::string& name) const;
  [[nodiscard]] const std::vector<Variable>& variables() const { return vars_; }

  [[nodiscard]] const std::vector<int>& parent_indices(int idx) const { return parents_.at(idx); }
  [[nodiscard]] std::vector<std::string> parents_of(const std::string& name) const;
  [[nodiscard]] const std::vector<double>& cpt_of(int idx) const { return cpt_.at(idx); }

  [[nodiscard]] const std::vector<int>& reward_domain_indices() const { return reward_domain_; }
  [[nodiscard]] std::vector<std::string> reward_domain() const;
  [[nodiscard]] const std::vector<double>& reward_table() const { return reward_table_; }

  [[nodiscard]] std::vector<std::string> names_of_kind(VariableKind k) const;
  /// Topological order over variable indices (parents before children).
  [[nodiscard]] std::vector<int> topological_order() const;
  [[nodiscard]] std::set<int> ancestors_of(int idx) const;
  [[nodiscard]] std::set<int> descendants_of(int idx) const;

  /// Canonical table index for an ordered variable list (first = LSB).
  static std::size_t table_index(const std::vector<int>& ordered_vars,
                                 const std::vector<bool>& full_state);
  static std::size_t table_index(const std::vector<std::string>& ordered_vars,
                                 const Assignment& values);

 private:
  std::vector<Variable> vars_;
  std::map<std::string, int> index_;
  std::vector<std::vector<int>> parents_;
  std::vector<std::vector<double>> cpt_;  // empty for actions
  std::vector<int> reward_domain_;
  std::vector<double> reward_table_;
};

/// Structural and numeric well-formedness; returns human-readable violations,
/// empty when the network is valid.
std::vector<std::string> validate(const DecisionNetwork& dn);

/// P(v=1 | parent assignment); requires all parents assigned.
double cpt_lookup(const DecisionNetwork& dn, const std::string& var,
                  const Assignment& parent_values);

/// Reward of a state; requires at least the reward domain assigned.
double reward_of(const DecisionNetwork& dn, const Assignment& state);

/// Extends a partial action assignment to all of dn's actions, defaulting
/// unmentioned ones to 0 (unaware actions are performed negatively).
Assignment total_action(const DecisionNetwork& dn, const Assignment& partial);

/// Forward-samples all chance variables given a total action assignment.
Trial sample(const DecisionNetwork& dn, const Assignment& action, std::mt19937_64& rng);

/// Samples only the Before variables (they never depend on actions).
Assignment sample_before(const DecisionNetwork& dn, std::mt19937_64& rng);

/// Samples the Outcome variables given full before + action assignments.
Assignment sample_outcome(const DecisionNetwork& dn, const Assignment& before,
                          const Assignment& action, std::mt19937_64& rng);

}  // namespace dnlearn
