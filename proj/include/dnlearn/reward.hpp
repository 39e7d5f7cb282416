#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "dnlearn/desc.hpp"

namespace dnlearn {

/// The agent's current conceptualisation, read off the description.
struct Vocabulary {
  std::set<std::string> before;
  std::set<std::string> actions;
  std::set<std::string> outcomes;
  std::set<std::string> reward_domain;

  [[nodiscard]] std::set<std::string> chance() const;
  [[nodiscard]] std::set<std::string> all() const;
  bool operator==(const Vocabulary&) const = default;
};

/// Each estimated set is exactly the corresponding Membership conjuncts
/// of the description.
Vocabulary estimate_vocabulary(const PartialDescription& delta);

/// Solved reward constraints: for each constrained reward-domain state
/// (canonical index over `domain`), either an exact value or a strict lower
/// bound.  Witness choices per constraint are recorded for inspection.
struct RewardSolution {
  std::vector<std::string> domain;  // sorted reward-domain variables
  std::map<std::size_t, double> equalities;
  std::map<std::size_t, double> lower_bounds;
  std::vector<std::size_t> witnesses;  // chosen state per constraint, in order
};

struct RewardUnsat {
  std::size_t failed_constraint = 0;  // index into the description's constraints
};

using RewardSolveResult = std::variant<RewardSolution, RewardUnsat>;

/// Skolemizes every StateExists conjunct and searches for consistent
/// witnesses.  Constraints are processed oldest-first; candidate witnesses
/// lexicographically smallest first; backtracking with forward checking on
/// the equality map.  Only the reward-domain projection of a witness matters.
RewardSolveResult solve_reward(const PartialDescription& delta, const Vocabulary& vocab);

/// Completes a solution into a total reward table over the sorted domain:
/// equalities win, inequality-only states get their largest lower bound plus
/// `margin`, unconstrained states get 0.
std::vector<double> complete_reward(const RewardSolution& sol, double margin = 0.1);

struct RewardEstimate {
  std::vector<std::string> domain;  // sorted
  std::vector<double> table;
};

/// Raised reward-conflict marker: the evidence admits no consistent reward
/// function over the current domain, so the agent must ask about it.
struct UnforeseenReward {
  std::set<std::string> known_domain;
};

using RewardUpdateResult = std::variant<RewardEstimate, UnforeseenReward>;

RewardUpdateResult reward_update(const PartialDescription& delta, const Vocabulary& vocab,
                                 double margin = 0.1);

/// Stateful equivalent of reward_update for a monotonically growing
/// description: the witness search resumes from its last position instead of
/// restarting, so a run of updates costs one full solve in total.  Results
/// are identical to re-solving from scratch after every conjunct.
class IncrementalRewardSolver {
 public:
  /// Fixes the reward domain and forgets all processed conjuncts.
  void reset(const Vocabulary& vocab);

  [[nodiscard]] const std::set<std::string>& domain_set() const { return domain_set_; }

  /// Processes conjuncts added since the last call.
  RewardUpdateResult update(const PartialDescription& delta, double margin = 0.1);

  /// Current solution in solve_reward's format (valid unless unsatisfiable).
  [[nodiscard]] RewardSolveResult current() const;

 private:
  struct Constraint {
    std::size_t base = 0;
    RewardCmp cmp;
    std::vector<std::size_t> free_bits;  // unmentioned domain variables, ascending
  };
  struct Frame {
    std::size_t next_j = 0;  // next candidate completion to try
    std::size_t state = 0;
    bool placed_eq = false;
    bool eq_existed = false;
    bool lb_existed = false;
    double lb_prev = 0.0;
  };

  bool add_constraint(const StateExists& se);  // false: immediate contradiction
  bool place_all();                            // resume the search; false: unsatisfiable

  std::set<std::string> domain_set_;
  std::vector<std::string> domain_;
  std::size_t next_conjunct_ = 0;
  bool unsat_ = false;
  std::size_t deepest_fail_ = 0;
  std::vector<Constraint> cs_;
  std::vector<Frame> frames_;
  std::size_t pos_ = 0;  // constraints [0, pos_) hold placed witnesses
  std::map<std::size_t, double> eq_;
  std::map<std::size_t, double> lb_;
  // Cells forced by fully-pinned constraints; doomed candidates are pruned
  // against these before placement.
  std::map<std::size_t, double> pinned_eq_;
  std::map<std::size_t, double> pinned_lb_;
};

}  // namespace dnlearn
