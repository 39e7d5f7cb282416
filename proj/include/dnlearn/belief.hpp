#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dnlearn/dn.hpp"
#include "dnlearn/desc.hpp"
#include "dnlearn/reward.hpp"

namespace dnlearn {

struct HyperParams {
  double rho = 0.1;           // prior probability of a single parenthood
  double asleep_c = 0.001;    // lattice pruning threshold C
  double k_equiv = 20.0;      // equivalent sample size K when repacking alphas
  double unexplored = 0.05;   // probability mass p reserved for unexplored parent sets
  double alpha0 = 0.5;        // symmetric Dirichlet parameter
  bool conservative = true;   // carry beliefs and alphas across vocabulary growth
  std::size_t max_lattice_nodes = 4'000'000;  // memory guard across all variables
};

/// Raised when the configured lattice budget would be exceeded.
struct BudgetExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ExpertUpdateOutcome { Ok, AllZero };

/// Per-variable parent-set belief: a lattice of candidate parent sets with
/// unnormalized log posteriors, plus sufficient statistics for the current
/// vocabulary epoch.  Masks index the variable's candidate list (ascending
/// name order, bit k = k-th candidate).
class BeliefState {
 public:
  BeliefState() = default;

  /// Product priors from the description (zero where kinds forbid an edge,
  /// one where the description requires it, rho otherwise), then an initial
  /// structural update on empty evidence builds each lattice.
  static BeliefState initial(const Vocabulary& vocab, const PartialDescription& delta,
                             const HyperParams& hyper);

  [[nodiscard]] const HyperParams& hyper() const { return hyper_; }
  [[nodiscard]] const std::vector<std::string>& universe() const { return universe_; }
  [[nodiscard]] std::size_t trial_count() const { return trials_.size(); }
  [[nodiscard]] std::size_t total_lattice_nodes() const;
  [[nodiscard]] std::vector<std::string> tracked_variables() const;

  /// Normalized probabilities over the lattice members of `var`.
  [[nodiscard]] std::map<std::set<std::string>, double> member_probabilities(
      const std::string& var) const;

  /// Probability of an arbitrary candidate parent set: lattice members keep
  /// (1-p) of the mass, the rest is split uniformly over non-members; when
  /// the lattice holds the whole powerset no mass is reserved.
  [[nodiscard]] double full_set_probability(const std::string& var,
                                            const std::set<std::string>& parent_set) const;

  /// P(candidate in parents(var)) per candidate, from member probabilities.
  [[nodiscard]] std::map<std::string, double> containment_probabilities(
      const std::string& var) const;

  /// Sequential Bayesian update from one completed trial; counts include the
  /// trial itself before the weight factor is applied.
  void parameter_update_trial(const Trial& t);

  /// Zeroes lattice members that do not contain every required parent.
  ExpertUpdateOutcome parameter_update_expert(const std::string& var,
                                              const std::set<std::string>& parents);

  /// Rebuilds one lattice from the epoch prior and the epoch evidence.
  void structural_update(const std::string& var, double asleep_c);
  void structural_update_all(double asleep_c);

  /// Conservative vocabulary growth: expands the epoch prior around the new
  /// variable, repacks alphas from the given network snapshot, resets counts
  /// and trials.  Call structural_update_all on the old evidence first.
  void extend_vocabulary(const std::string& new_var, const Vocabulary& vocab_new,
                         const PartialDescription& delta, const DecisionNetwork& dn_snapshot);

  /// Non-conservative growth: fresh product priors and flat alphas.
  void reset_vocabulary(const Vocabulary& vocab_new, const PartialDescription& delta);

  /// CPT column for `var` given a chosen parent list (ascending name order):
  /// theta_{v=1|j} = (n + alpha) / (n_total + alpha_total).
  [[nodiscard]] std::vector<double> estimate_theta(const std::string& var,
                                                   const std::vector<std::string>& parents) const;

  [[nodiscard]] const std::set<std::string>& required_parents(const std::string& var) const;

  /// True when the variable appears in at least one lattice member of some
  /// tracked belief (the reasonable-parent-set test).
  [[nodiscard]] bool appears_in_some_member(const std::string& var) const;

 private:
  // Sparse per-configuration counts: only observed parent configurations are
  // stored, so node memory is bounded by the epoch trial count.
  using CountTable = std::map<std::uint32_t, std::array<std::uint32_t, 2>>;

  struct Node {
    double log_weight = 0.0;
    CountTable counts;
  };

  struct VarBelief {
    int self = -1;                // universe index of the variable itself
    std::vector<int> candidates;  // universe indices, ascending
    std::map<std::uint64_t, Node> nodes;
    std::set<std::string> required;
    bool is_outcome = false;
  };

  /// Epoch-start prior: either a product over single-edge probabilities or an
  /// expansion of the previous epoch's posterior around one new variable.
  struct PriorSource {
    std::vector<double> edge_prob;  // aligned with candidates (product form)
    struct Expansion {
      std::map<std::uint64_t, double> old_member_prob;  // over old candidate masks
      double old_unexplored_log = 0.0;                  // log share per non-member
      bool old_has_unexplored = false;
      double rho = 0.1;
      int z_pos = -1;                // new-candidate position of the new variable
      std::vector<int> new_to_old;   // new candidate position -> old position (z -> -1)
    };
    std::optional<Expansion> expansion;
  };

  struct AlphaSource {
    double flat = 0.5;
    double k_equiv = 20.0;
    std::shared_ptr<const DecisionNetwork> snapshot;  // null => flat alphas
    std::string new_var;
  };

  [[nodiscard]] double log_prior(const std::string& var, const VarBelief& vb,
                                 std::uint64_t mask) const;
  [[nodiscard]] std::vector<std::array<double, 2>> alpha_table(
      const std::string& var, const std::vector<std::string>& parents) const;
  [[nodiscard]] CountTable count_table(const VarBelief& vb, std::uint64_t mask) const;
  [[nodiscard]] double log_marginal_likelihood(const std::string& var, const VarBelief& vb,
                                               std::uint64_t mask) const;
  [[nodiscard]] std::vector<std::string> mask_names(const VarBelief& vb,
                                                    std::uint64_t mask) const;
  void build_universe(const Vocabulary& vocab);
  void build_candidates(const Vocabulary& vocab);
  void build_product_priors(const Vocabulary& vocab, const PartialDescription& delta);
  [[nodiscard]] std::uint32_t trial_bits(const Trial& t) const;

  HyperParams hyper_;
  Vocabulary vocab_;
  std::vector<std::string> universe_;  // sorted names of the current vocabulary
  std::map<std::string, int> universe_index_;
  std::vector<std::uint32_t> trials_;  // epoch trials, value of universe var i at bit i
  std::map<std::string, VarBelief> beliefs_;
  std::map<std::string, PriorSource> priors_;
  AlphaSource alphas_;
  mutable std::map<std::pair<std::string, std::string>, std::vector<std::array<double, 2>>>
      alpha_cache_;  // keyed by (var, joined parent names)
};

}  // namespace dnlearn
