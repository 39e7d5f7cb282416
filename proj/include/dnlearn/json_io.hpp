#pragma once

#include <string>

#include "dnlearn/dn.hpp"

namespace dnlearn {

/// JSON document layout:
///   variables:     [{name, kind}, ...]           kind in {action, before, outcome}
///   parents:       {var: [parent, ...], ...}     listed order fixes CPT bit order
///   cpt:           {var: [P(v=1|cfg0), ...], ...}
///   reward_domain: [var, ...]                    listed order fixes table bit order
///   reward_table:  [r0, r1, ...]
DecisionNetwork dn_from_json(const std::string& text);
std::string dn_to_json(const DecisionNetwork& dn);

DecisionNetwork load_dn(const std::string& path);
void save_dn(const DecisionNetwork& dn, const std::string& path);

}  // namespace dnlearn
