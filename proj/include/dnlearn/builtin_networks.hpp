#pragma once

#include "dnlearn/dn.hpp"

namespace dnlearn {

/// The 18-variable barley domain (5 actions, 5 before, 8 outcomes).
DecisionNetwork barley_network();

/// The agent's initial barley model: the vocabulary of its starting
/// description, a sparse edge set missing several true dependencies,
/// uninformed CPTs and an all-zero reward table.
DecisionNetwork barley_initial_model();

/// Best-case benchmark network (7 actions / 7 before / 7 outcomes).
DecisionNetwork dn_best_network();

/// Worst-case benchmark network (7 actions / 7 before / 7 outcomes).
DecisionNetwork dn_worst_network();

}  // namespace dnlearn
