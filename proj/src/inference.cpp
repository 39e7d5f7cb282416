#include "dnlearn/inference.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace dnlearn {

namespace {

// Factor over network variable indices; scope order fixes the table layout
// (first scope variable = least-significant bit).
struct Factor {
  std::vector<int> scope;
  std::vector<double> table;
};

Factor reduce(const Factor& f, const std::map<int, bool>& evidence) {
  std::vector<int> kept;
  for (int v : f.scope)
    if (!evidence.count(v)) kept.push_back(v);
  if (kept.size() == f.scope.size()) return f;
  Factor out;
  out.scope = kept;
  out.table.assign(std::size_t{1} << kept.size(), 0.0);
  for (std::size_t idx = 0; idx < f.table.size(); ++idx) {
    bool match = true;
    std::size_t out_idx = 0;
    std::size_t out_bit = 0;
    for (std::size_t k = 0; k < f.scope.size(); ++k) {
      bool val = (idx >> k) & 1;
      auto it = evidence.find(f.scope[k]);
      if (it != evidence.end()) {
        if (it->second != val) {
          match = false;
          break;
        }
      } else {
        if (val) out_idx |= (std::size_t{1} << out_bit);
        ++out_bit;
      }
    }
    if (match) out.table[out_idx] += f.table[idx];
  }
  return out;
}

Factor multiply(const Factor& a, const Factor& b) {
  Factor out;
  out.scope = a.scope;
  for (int v : b.scope)
    if (std::find(out.scope.begin(), out.scope.end(), v) == out.scope.end())
      out.scope.push_back(v);
  out.table.assign(std::size_t{1} << out.scope.size(), 0.0);
  std::vector<std::size_t> a_pos(a.scope.size()), b_pos(b.scope.size());
  for (std::size_t k = 0; k < a.scope.size(); ++k)
    a_pos[k] = std::find(out.scope.begin(), out.scope.end(), a.scope[k]) - out.scope.begin();
  for (std::size_t k = 0; k < b.scope.size(); ++k)
    b_pos[k] = std::find(out.scope.begin(), out.scope.end(), b.scope[k]) - out.scope.begin();
  for (std::size_t idx = 0; idx < out.table.size(); ++idx) {
    std::size_t ia = 0, ib = 0;
    for (std::size_t k = 0; k < a_pos.size(); ++k)
      if ((idx >> a_pos[k]) & 1) ia |= (std::size_t{1} << k);
    for (std::size_t k = 0; k < b_pos.size(); ++k)
      if ((idx >> b_pos[k]) & 1) ib |= (std::size_t{1} << k);
    out.table[idx] = a.table[ia] * b.table[ib];
  }
  return out;
}

Factor sum_out(const Factor& f, int var) {
  auto it = std::find(f.scope.begin(), f.scope.end(), var);
  if (it == f.scope.end()) return f;
  std::size_t pos = it - f.scope.begin();
  Factor out;
  out.scope = f.scope;
  out.scope.erase(out.scope.begin() + pos);
  out.table.assign(std::size_t{1} << out.scope.size(), 0.0);
  for (std::size_t idx = 0; idx < f.table.size(); ++idx) {
    std::size_t lo = idx & ((std::size_t{1} << pos) - 1);
    std::size_t hi = idx >> (pos + 1);
    out.table[lo | (hi << pos)] += f.table[idx];
  }
  return out;
}

}  // namespace

double Distribution::probability_of(const Assignment& values) const {
  std::size_t idx = DecisionNetwork::table_index(variables, values);
  return probabilities.at(idx);
}

Distribution marginal(const DecisionNetwork& dn, const std::set<std::string>& targets,
                      const Assignment& evidence) {
  if (targets.empty()) throw std::invalid_argument("marginal: no target variables");
  std::map<int, bool> ev;
  for (const auto& [name, val] : evidence) ev[dn.index_of(name)] = val;

  std::vector<int> target_idx;
  for (const auto& t : targets) {
    int ti = dn.index_of(t);
    if (ev.count(ti)) throw std::invalid_argument("marginal: target is also evidence: " + t);
    target_idx.push_back(ti);
  }

  // Unassigned actions have no distribution, so they must not influence the
  // queried or conditioned variables.
  std::set<int> relevant;
  for (int t : target_idx) {
    relevant.insert(t);
    auto anc = dn.ancestors_of(t);
    relevant.insert(anc.begin(), anc.end());
  }
  for (const auto& [v, val] : ev) {
    relevant.insert(v);
    auto anc = dn.ancestors_of(v);
    relevant.insert(anc.begin(), anc.end());
  }
  for (int v : relevant)
    if (dn.variable(v).kind == VariableKind::Action && !ev.count(v))
      throw std::invalid_argument("marginal: unassigned action influences the query: " +
                                  dn.name_of(v));

  std::vector<Factor> factors;
  for (int v : relevant) {
    if (dn.variable(v).kind == VariableKind::Action) continue;
    Factor f;
    f.scope = dn.parent_indices(v);
    f.scope.push_back(v);
    f.table.resize(std::size_t{1} << f.scope.size());
    const auto& cpt = dn.cpt_of(v);
    std::size_t np = dn.parent_indices(v).size();
    for (std::size_t idx = 0; idx < f.table.size(); ++idx) {
      std::size_t cfg = idx & ((std::size_t{1} << np) - 1);
      bool val = (idx >> np) & 1;
      f.table[idx] = val ? cpt[cfg] : 1.0 - cpt[cfg];
    }
    factors.push_back(reduce(f, ev));
  }
  if (factors.empty()) {
    // Targets are all actions (impossible: actions rejected above) or the
    // network degenerates; treat as no-factor uniform seed.
    factors.push_back(Factor{{}, {1.0}});
  }

  // Hidden variables: in-scope, not target.
  std::set<int> hidden;
  for (const auto& f : factors)
    for (int v : f.scope)
      if (std::find(target_idx.begin(), target_idx.end(), v) == target_idx.end())
        hidden.insert(v);

  // Min-degree elimination on the interaction graph.
  std::map<int, std::set<int>> neigh;
  for (const auto& f : factors)
    for (int a : f.scope)
      for (int b : f.scope)
        if (a != b) neigh[a].insert(b);
  std::set<int> to_eliminate = hidden;
  while (!to_eliminate.empty()) {
    int best = -1;
    std::size_t best_deg = 0;
    for (int v : to_eliminate) {
      std::size_t deg = neigh[v].size();
      if (best == -1 || deg < best_deg || (deg == best_deg && v < best)) {
        best = v;
        best_deg = deg;
      }
    }
    to_eliminate.erase(best);
    // Connect neighbors, drop the eliminated node.
    for (int a : neigh[best])
      for (int b : neigh[best])
        if (a != b) neigh[a].insert(b);
    for (int a : neigh[best]) neigh[a].erase(best);

    Factor combined{{}, {1.0}};
    std::vector<Factor> rest;
    for (auto& f : factors) {
      if (std::find(f.scope.begin(), f.scope.end(), best) != f.scope.end())
        combined = multiply(combined, f);
      else
        rest.push_back(std::move(f));
    }
    rest.push_back(sum_out(combined, best));
    factors = std::move(rest);
  }

  Factor joint{{}, {1.0}};
  for (const auto& f : factors) joint = multiply(joint, f);

  // Lay out onto sorted target names, first = LSB.
  std::vector<std::string> names;
  for (int t : target_idx) names.push_back(dn.name_of(t));
  std::sort(names.begin(), names.end());

  Distribution out;
  out.variables = names;
  out.probabilities.assign(std::size_t{1} << names.size(), 0.0);
  std::vector<std::size_t> pos(names.size());
  for (std::size_t k = 0; k < names.size(); ++k) {
    int vi = dn.index_of(names[k]);
    auto it = std::find(joint.scope.begin(), joint.scope.end(), vi);
    if (it == joint.scope.end())
      throw std::logic_error("marginal: target missing from final factor");
    pos[k] = it - joint.scope.begin();
  }
  double total = 0.0;
  for (std::size_t idx = 0; idx < joint.table.size(); ++idx) {
    std::size_t oi = 0;
    for (std::size_t k = 0; k < pos.size(); ++k)
      if ((idx >> pos[k]) & 1) oi |= (std::size_t{1} << k);
    out.probabilities[oi] += joint.table[idx];
    total += joint.table[idx];
  }
  if (total <= 0.0)
    throw ImpossibleEvidenceError("marginal: evidence has probability zero");
  for (double& p : out.probabilities) p /= total;
  return out;
}

double expected_utility(const DecisionNetwork& dn, const Assignment& action,
                        const Assignment& evidence) {
  for (const auto& a : dn.names_of_kind(VariableKind::Action))
    if (!action.contains(a))
      throw std::invalid_argument("expected_utility: action assignment misses " + a);
  auto merged = action.merged_with(evidence);
  if (!merged) throw std::invalid_argument("expected_utility: action conflicts with evidence");

  std::set<std::string> rd;
  std::vector<std::string> rd_order = dn.reward_domain();
  Assignment given_rd;  // reward-domain variables already pinned by evidence
  for (const auto& v : rd_order) {
    if (merged->contains(v))
      given_rd.set(v, merged->at(v));
    else
      rd.insert(v);
  }
  if (rd.empty()) {
    Assignment full = given_rd;
    return reward_of(dn, full);
  }
  Distribution dist = marginal(dn, rd, *merged);
  double eu = 0.0;
  for (std::size_t idx = 0; idx < dist.probabilities.size(); ++idx) {
    if (dist.probabilities[idx] == 0.0) continue;
    Assignment state = given_rd;
    for (std::size_t k = 0; k < dist.variables.size(); ++k)
      state.set(dist.variables[k], (idx >> k) & 1);
    eu += dist.probabilities[idx] * reward_of(dn, state);
  }
  return eu;
}

Assignment optimal_action(const DecisionNetwork& dn, const Assignment& evidence) {
  std::vector<std::string> actions = dn.names_of_kind(VariableKind::Action);
  std::sort(actions.begin(), actions.end());
  std::size_t n = actions.size();
  if (n == 0) throw std::invalid_argument("optimal_action: network has no actions");
  Assignment best;
  double best_eu = 0.0;
  bool have = false;
  // Ascending j with bit (n-1-k) for the k-th name enumerates action
  // bit-vectors in lexicographic order, so the first maximum wins ties.
  for (std::size_t j = 0; j < (std::size_t{1} << n); ++j) {
    Assignment a;
    for (std::size_t k = 0; k < n; ++k) a.set(actions[k], (j >> (n - 1 - k)) & 1);
    double eu = expected_utility(dn, a, evidence);
    if (!have || eu > best_eu) {
      best = a;
      best_eu = eu;
      have = true;
    }
  }
  return best;
}

}  // namespace dnlearn
