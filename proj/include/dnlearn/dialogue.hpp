#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "dnlearn/desc.hpp"
#include "dnlearn/dn.hpp"

namespace dnlearn {

/// Unsolicited advice: in the situation of the referenced trial, the
/// preferred partial action beats the one taken.  Monotonic content for the
/// learner: some state extending preferred-action-plus-observed-context has
/// reward above the trial's.
struct AdviceSignal {
  Assignment preferred;  // over the actions the expert may mention
  Assignment taken;      // the performed action projected onto the same set
  int trial_step = 0;
  double reward = 0.0;
  std::optional<std::string> new_action;  // at most one unfamiliar variable
};

struct AskMissingB {
  int step_a = 0;  // earlier trial
  int step_b = 0;  // later trial
};
struct AskUnforeseenReward {
  std::set<std::string> known_domain;
};
struct AskWhichEffect {
  std::string variable;
};
using Question = std::variant<AskMissingB, AskUnforeseenReward, AskWhichEffect>;

struct Answer {
  std::vector<Formula> conjuncts;
};

/// Cooperative domain expert: sees every trial in full, answers every
/// question truthfully, and volunteers advice when the learner keeps acting
/// suboptimally.  Signals contain at most one variable the learner has not
/// yet encountered, with its kind declared.
class Expert {
 public:
  Expert(DecisionNetwork dn_plus, double beta, int gamma, std::uint64_t seed);

  /// Variables of the initial shared description count as already mentioned.
  void observe_initial_description(const PartialDescription& delta0);

  /// Full state of a completed trial, keyed by its simulation step.
  void observe_trial(int step, const Trial& t);

  /// Advice when both trigger conditions hold: enough recent suboptimal
  /// trials, and an expressible strictly better alternative exists for the
  /// latest trial.
  std::optional<AdviceSignal> maybe_advise(int step);

  Answer answer(const Question& q);

  [[nodiscard]] const std::set<std::string>& aware_chance() const { return ce_; }
  [[nodiscard]] const std::set<std::string>& aware_actions() const { return ae_; }
  [[nodiscard]] const DecisionNetwork& network() const { return dn_; }

 private:
  void mention(const std::string& name);
  double optimal_eu(const Assignment& before);
  [[nodiscard]] bool reward_witness_above(const Assignment& literals, double reward) const;

  DecisionNetwork dn_;
  double beta_;
  int gamma_;
  std::mt19937_64 rng_;
  std::set<std::string> ce_, ae_;  // chance/action variables known to be shared
  int last_advice_step_ = 0;
  struct LoggedTrial {
    int step;
    Trial trial;
    bool suboptimal;
  };
  std::vector<LoggedTrial> log_;
  std::map<int, std::size_t> step_index_;
  std::map<Assignment, double> opt_eu_cache_;
};

/// Learner-side consistency check over received advice: two pieces of advice
/// with the same observed context but opposite strict preferences on the same
/// action pair reveal an unobserved context variable.
class MisunderstandingMonitor {
 public:
  struct Conflict {
    int step_a = 0;  // earlier trial
    int step_b = 0;  // later trial
  };

  /// Records the advice and reports a conflict with the most recent
  /// contradictory record, if any.
  std::optional<Conflict> observe_advice(const Assignment& context, const Assignment& preferred,
                                         const Assignment& taken, int trial_step);

  /// Called when a new context variable enters the vocabulary: older signals
  /// no longer participate in consistency checks.
  void forget();

 private:
  struct Record {
    Assignment context, preferred, taken;
    int trial_step;
  };
  std::vector<Record> records_;
};

}  // namespace dnlearn
