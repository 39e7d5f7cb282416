#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "dnlearn/dn.hpp"

namespace dnlearn {

/// Which distinguished set a Membership atom places its variable in.
enum class SetKind { Before, Outcome, Action, RewardDomain, ParentsOf };

/// var is a member of the named set; for ParentsOf, `parent_of` names the
/// child whose parent set is meant.
struct Membership {
  std::string var;
  SetKind set = SetKind::Before;
  std::string parent_of;  // only for SetKind::ParentsOf

  bool operator==(const Membership&) const = default;
  bool operator<(const Membership& o) const {
    return std::tie(var, set, parent_of) < std::tie(o.var, o.set, o.parent_of);
  }
};

struct RewardCmp {
  enum Kind { Eq, Gt } kind = Eq;
  double value = 0.0;

  bool operator==(const RewardCmp&) const = default;
};

/// Some state consistent with `literals` earns reward `cmp` the given value.
struct StateExists {
  Assignment literals;
  RewardCmp cmp;

  bool operator==(const StateExists&) const = default;
};

using Formula = std::variant<Membership, StateExists>;

/// The membership set naming a variable's kind.
SetKind set_kind_for(VariableKind k);

std::string to_string(const Formula& f);

/// Monotone conjunction of Membership and StateExists formulas.  Conjuncts
/// keep arrival order; duplicates are dropped.
class PartialDescription {
 public:
  void conjoin(const Formula& f);
  [[nodiscard]] const std::vector<Formula>& conjuncts() const { return conjuncts_; }
  [[nodiscard]] std::size_t size() const { return conjuncts_.size(); }

  /// Conjunction-elimination entailment for Membership atoms.
  [[nodiscard]] bool entails(const Membership& m) const;

  /// Variables the description requires as parents of `child`.
  [[nodiscard]] std::set<std::string> required_parents(const std::string& child) const;
  [[nodiscard]] std::set<std::string> members_of(SetKind kind) const;
  [[nodiscard]] std::vector<StateExists> state_constraints() const;

  [[nodiscard]] std::string to_string() const;

 private:
  std::vector<Formula> conjuncts_;
  std::set<Membership> memberships_;
};

/// Literal content of a completed trial: the observed state exists and earns
/// exactly the observed reward.
Formula trial_description(const Trial& t);

/// Monotone content of advice "a_alt would have beaten what you did":
/// some state consistent with a_alt and the observed before-state earns more
/// than the received reward; plus Membership(A, Actions) for each named
/// action the hearer may not know.
std::vector<Formula> advice_content(const Assignment& a_alt, const Assignment& before_obs,
                                    double reward, const std::vector<std::string>& new_actions);

/// Model checking dn |= f.  StateExists searches for a witness by fixing the
/// mentioned literals and enumerating only unmentioned reward-domain
/// variables; unmentioned non-reward variables never matter.
bool satisfies(const DecisionNetwork& dn, const Formula& f);
bool satisfies(const DecisionNetwork& dn, const PartialDescription& delta);

}  // namespace dnlearn
