#pragma once

#include <set>
#include <string>
#include <vector>

#include "dnlearn/dn.hpp"

namespace dnlearn {

/// Raised when conditioning evidence has probability zero.
struct ImpossibleEvidenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Exact joint posterior over `targets`, canonical enumeration (first target
/// listed = least-significant bit), targets sorted by name.
struct Distribution {
  std::vector<std::string> variables;
  std::vector<double> probabilities;  // size 2^|variables|, sums to 1

  [[nodiscard]] double probability_of(const Assignment& values) const;
};

/// Exact posterior P(targets | evidence) by variable elimination with a
/// min-degree ordering.  Every action that is an ancestor of a target or of
/// an evidence variable must be assigned in the evidence.
Distribution marginal(const DecisionNetwork& dn, const std::set<std::string>& targets,
                      const Assignment& evidence);

/// Expected reward of a total action assignment given evidence, computed by
/// marginalizing onto the reward domain.
double expected_utility(const DecisionNetwork& dn, const Assignment& action,
                        const Assignment& evidence);

/// Maximizes expected utility over all total action assignments; ties broken
/// lexicographically on the action bit-vector (variables sorted by name).
Assignment optimal_action(const DecisionNetwork& dn, const Assignment& evidence);

}  // namespace dnlearn
