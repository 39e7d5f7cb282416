#pragma once

#include <map>
#include <random>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "dnlearn/belief.hpp"
#include "dnlearn/desc.hpp"
#include "dnlearn/reward.hpp"

namespace dnlearn {

/// Required-parenthood pairs entailed by a description: (parent, child).
using RequiredEdges = std::set<std::pair<std::string, std::string>>;

RequiredEdges required_edges(const PartialDescription& delta, const Vocabulary& vocab);

/// Construction-order conditions.  Returns 0 when the order is acceptable,
/// otherwise the number of the first violated condition:
///   1: a required parent does not precede its child
///   2: actions do not form a prefix of the order
///   3: an outcome has no action before it
///   4: a before variable comes after an outcome
///   5: a known reward-domain variable precedes a same-kind variable outside
///      the domain without a chain of required parenthoods forcing it
int check_order(const std::vector<std::string>& order, const Vocabulary& vocab,
                const RequiredEdges& required, const std::set<std::string>& reward_domain);

/// Random order passing conditions 1-4, biased to satisfy condition 5:
/// actions shuffled first, then each chance block grown by a topological pass
/// over required edges preferring variables outside the known reward domain.
std::vector<std::string> random_valid_order(const Vocabulary& vocab, const RequiredEdges& required,
                                            const std::set<std::string>& reward_domain,
                                            std::mt19937_64& rng);

/// P(Y is a parent of X) for ordered pairs: the summed probability of X's
/// lattice members containing Y when Y precedes X in the order, else zero.
std::map<std::pair<std::string, std::string>, double> edge_probs(
    const BeliefState& beliefs, const Vocabulary& vocab, const std::vector<std::string>& order);

struct StructureEdges {
  std::map<std::string, std::vector<std::string>> parents;  // ascending name order
  double objective = 0.0;
};

struct StructureInfeasible {
  std::string variable;  // the variable whose covering constraint is empty
};

using SolveResult = std::variant<StructureEdges, StructureInfeasible>;

/// Most likely edge set for one order-masked probability matrix: maximizes
/// agreement with the pairwise probabilities subject to zero-probability
/// edges staying absent, every variable outside the known reward domain
/// having a child, and every outcome having an action-or-outcome parent.
/// Closed-form relaxation plus the two-phase rounding; ties broken by name.
SolveResult solve_structure(const std::map<std::pair<std::string, std::string>, double>& probs,
                            const Vocabulary& vocab, const std::set<std::string>& reward_domain,
                            const RequiredEdges& required);

struct UnknownEffects {
  std::vector<std::string> variables;  // no lattice member anywhere contains them
};

struct NoValidStructure {};

using EstimateOutcome = std::variant<StructureEdges, UnknownEffects, NoValidStructure>;

/// Full structure step: the unknown-effects membership test, then greedy
/// local search over construction orders (adjacent transpositions, best
/// strictly-improving neighbor, ties keep the incumbent).
EstimateOutcome estimate_structure(const BeliefState& beliefs, const Vocabulary& vocab,
                                   const PartialDescription& delta,
                                   const std::set<std::string>& reward_domain,
                                   std::mt19937_64& rng);

}  // namespace dnlearn
