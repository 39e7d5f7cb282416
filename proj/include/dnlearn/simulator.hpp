#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "dnlearn/belief.hpp"
#include "dnlearn/dialogue.hpp"
#include "dnlearn/dn.hpp"
#include "dnlearn/reward.hpp"
#include "dnlearn/structure.hpp"

namespace dnlearn {

enum class AgentVariant {
  Default,          // sparse priors, pruning, conservative growth, static exploration
  SlightlyMin,      // parenthood prior 0.5
  Maximal,          // prior 0.5, no pruning, reward estimated over every known chance variable
  NonConservative,  // vocabulary growth resets priors and alphas
  Decay,            // exploration rate decays per step
  FullVocab,        // starts aware of the whole vocabulary and true reward domain
  Baseline,         // frozen initial network, empirical parameters, no dialogue
};

AgentVariant agent_variant_from_string(const std::string& s);
std::string to_string(AgentVariant v);

struct AgentConfig {
  HyperParams hyper;
  bool reward_domain_all = false;  // reward over all known chance variables
  bool full_vocabulary = false;
  bool baseline = false;
  double epsilon0 = 0.3;
  double epsilon_decay = 1.0;  // applied once per simulation step
  int su_period = 100;         // trials between scheduled lattice rebuilds

  static AgentConfig for_variant(AgentVariant v);
};

struct ExperimentConfig {
  AgentConfig agent;
  double expert_beta = 0.9;
  int expert_gamma = 50;
  int steps = 3000;
  int pe_period = 50;  // policy-error cadence in steps; 0 disables
  int runs = 1;
  std::uint64_t seed = 0;
  bool timing = false;             // fill the ms column (off keeps output reproducible)
  bool check_consistency = false;  // assert validity + description satisfaction per revision
  std::ostream* transcript = nullptr;  // one line per utterance when set
};

struct MetricsRow {
  int run = 0;
  int step = 0;
  std::string event;  // trial | advice | answer
  double reward = 0.0;
  double cum_reward = 0.0;
  std::optional<double> policy_error;
  int n_vars = 0;
  std::size_t n_lattice_nodes = 0;
  std::int64_t ms = 0;
};

/// Kind and reward-domain memberships of an existing conceptualisation.
PartialDescription initial_description(const DecisionNetwork& dn0);
/// Smallest useful start: the lexicographically first action, plus the first
/// reward-domain outcome marked as a reward factor.
PartialDescription minimal_description(const DecisionNetwork& dn_plus);
/// Aware of every variable and the true reward factors, but nothing else.
PartialDescription full_description(const DecisionNetwork& dn_plus);

/// Random layered single-stage decision network: kind-legal edges drawn with
/// probability 2/(n-1), a reward domain of `reward_vars` chance variables with
/// at least one outcome, then minimal edge repairs until well-formed.
DecisionNetwork generate_random_dn(std::uint64_t seed, int n_actions = 7, int n_before = 7,
                                   int n_outcomes = 7, int reward_vars = 5,
                                   double reward_max = 50.0);

/// The learning agent: holds the growing description, parent-set beliefs,
/// reward estimate and current network, and runs the revision pipeline
/// (vocabulary, reward, structure, parameters) after every piece of evidence.
class LearnerAgent {
 public:
  /// Estimating agent; the initial description must not raise questions.
  LearnerAgent(const AgentConfig& cfg, const PartialDescription& delta0, std::uint64_t seed);
  /// Baseline agent: keeps `frozen`'s variables and dependencies forever,
  /// learning only parameters and observed rewards.
  LearnerAgent(const AgentConfig& cfg, const PartialDescription& delta0, DecisionNetwork frozen,
               std::uint64_t seed);

  [[nodiscard]] const DecisionNetwork& model() const { return dn_; }
  [[nodiscard]] const Vocabulary& vocabulary() const { return vocab_; }
  [[nodiscard]] const PartialDescription& description() const { return delta_; }
  [[nodiscard]] const BeliefState& beliefs() const { return belief_; }
  [[nodiscard]] const std::optional<Question>& pending_question() const { return pending_; }
  [[nodiscard]] std::size_t lattice_nodes() const;
  [[nodiscard]] double epsilon() const { return epsilon_; }
  [[nodiscard]] bool is_baseline() const { return cfg_.baseline; }

  void set_consistency_checks(bool on) { check_consistency_ = on; }

  /// Epsilon-greedy over the agent's own action vocabulary.
  Assignment choose_action(const Assignment& before_view);
  void decay_epsilon() { epsilon_ *= cfg_.epsilon_decay; }

  /// The learner's restriction of a full environment state.
  [[nodiscard]] Trial restrict_trial(const Trial& full) const;

  void observe_trial(int step, const Trial& view);
  void observe_advice(const AdviceSignal& sig);
  void observe_answer(const Answer& ans);

 private:
  void revise(const Trial* fresh_trial);
  void rebuild_model();
  void baseline_observe(const Trial& view);
  void check_new_variables(const std::vector<Formula>& conjuncts) const;
  [[nodiscard]] Vocabulary reward_solve_vocab() const;

  AgentConfig cfg_;
  PartialDescription delta_;
  Vocabulary vocab_;
  BeliefState belief_;
  IncrementalRewardSolver reward_solver_;
  RewardEstimate reward_;
  std::map<std::string, std::vector<std::string>> parents_;
  DecisionNetwork dn_;
  std::optional<Question> pending_;
  MisunderstandingMonitor monitor_;
  std::map<int, Trial> trial_log_;  // learner views by step
  std::set<std::pair<std::string, std::string>> expert_edges_seen_;
  int trials_since_su_ = 0;
  double epsilon_;
  std::mt19937_64 rng_;
  bool check_consistency_ = false;
  bool reward_stuck_ = false;  // baseline: evidence contradicts the frozen domain
  std::map<std::string, std::vector<std::array<std::uint64_t, 2>>> counts_;  // baseline
};

/// Expected-reward gap between the true optimal policy and the agent's,
/// weighted by the true before-state distribution.  True-side quantities are
/// cached, so build one evaluator per true network and reuse it.
class PolicyErrorEvaluator {
 public:
  explicit PolicyErrorEvaluator(DecisionNetwork dn_plus);
  double evaluate(const DecisionNetwork& dn_agent);

 private:
  DecisionNetwork dn_;
  std::vector<Assignment> befores_;
  std::vector<double> prior_;
  std::vector<double> opt_eu_;
};

/// Full experiment: `runs` independent simulations against dn_plus.  The
/// optional initial model fixes the starting conceptualisation (and the
/// baseline's frozen network); otherwise a minimal one is derived.
std::vector<MetricsRow> run_simulation(const DecisionNetwork& dn_plus,
                                       const DecisionNetwork* initial_model,
                                       const ExperimentConfig& cfg);

void emit_metrics(const std::vector<MetricsRow>& rows, std::ostream& out);

}  // namespace dnlearn
