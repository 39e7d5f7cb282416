#include "dnlearn/dn.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

namespace dnlearn {

std::string to_string(VariableKind k) {
  switch (k) {
    case VariableKind::Action: return "action";
    case VariableKind::Before: return "before";
    case VariableKind::Outcome: return "outcome";
  }
  throw std::logic_error("unreachable variable kind");
}

VariableKind kind_from_string(const std::string& s) {
  if (s == "action") return VariableKind::Action;
  if (s == "before") return VariableKind::Before;
  if (s == "outcome") return VariableKind::Outcome;
  throw std::invalid_argument("unknown variable kind: " + s);
}

Assignment::Assignment(std::initializer_list<std::pair<std::string, bool>> items) {
  for (const auto& [k, v] : items) set(k, v);
}

void Assignment::set(const std::string& var, bool value) {
  auto it = std::lower_bound(items_.begin(), items_.end(), var,
                             [](const auto& p, const std::string& v) { return p.first < v; });
  if (it != items_.end() && it->first == var) {
    it->second = value;
  } else {
    items_.insert(it, {var, value});
  }
}

void Assignment::erase(const std::string& var) {
  auto it = std::lower_bound(items_.begin(), items_.end(), var,
                             [](const auto& p, const std::string& v) { return p.first < v; });
  if (it != items_.end() && it->first == var) items_.erase(it);
}

std::optional<bool> Assignment::get(const std::string& var) const {
  auto it = std::lower_bound(items_.begin(), items_.end(), var,
                             [](const auto& p, const std::string& v) { return p.first < v; });
  if (it != items_.end() && it->first == var) return it->second;
  return std::nullopt;
}

bool Assignment::at(const std::string& var) const {
  auto v = get(var);
  if (!v) throw std::invalid_argument("assignment lacks variable: " + var);
  return *v;
}

bool Assignment::contains(const std::string& var) const { return get(var).has_value(); }

Assignment Assignment::restricted_to(const std::set<std::string>& vars) const {
  Assignment out;
  for (const auto& [k, v] : items_)
    if (vars.count(k)) out.set(k, v);
  return out;
}

std::optional<Assignment> Assignment::merged_with(const Assignment& other) const {
  Assignment out = *this;
  for (const auto& [k, v] : other.items_) {
    auto existing = out.get(k);
    if (existing && *existing != v) return std::nullopt;
    out.set(k, v);
  }
  return out;
}

bool Assignment::consistent_with(const Assignment& other) const {
  return merged_with(other).has_value();
}

bool Assignment::extends(const Assignment& other) const {
  for (const auto& [k, v] : other.items_) {
    auto mine = get(k);
    if (!mine || *mine != v) return false;
  }
  return true;
}

std::set<std::string> Assignment::variables() const {
  std::set<std::string> out;
  for (const auto& [k, v] : items_) out.insert(k);
  return out;
}

std::string Assignment::to_string() const {
  std::ostringstream os;
  os << "{";
  bool first = true;
  for (const auto& [k, v] : items_) {
    if (!first) os << ", ";
    first = false;
    os << k << "=" << (v ? 1 : 0);
  }
  os << "}";
  return os.str();
}

Assignment Trial::full_state() const {
  auto m1 = before.merged_with(action);
  if (!m1) throw std::logic_error("trial assignments overlap inconsistently");
  auto m2 = m1->merged_with(outcome);
  if (!m2) throw std::logic_error("trial assignments overlap inconsistently");
  return *m2;
}

int DecisionNetwork::add_variable(const std::string& name, VariableKind kind) {
  if (name.empty()) throw std::invalid_argument("variable name must be non-empty");
  if (index_.count(name)) throw std::invalid_argument("duplicate variable: " + name);
  int idx = static_cast<int>(vars_.size());
  vars_.push_back({name, kind});
  index_[name] = idx;
  parents_.emplace_back();
  cpt_.emplace_back();
  return idx;
}

void DecisionNetwork::set_parents(const std::string& var, const std::vector<std::string>& parents) {
  int idx = index_of(var);
  std::vector<int> ps;
  ps.reserve(parents.size());
  for (const auto& p : parents) ps.push_back(index_of(p));
  parents_[idx] = std::move(ps);
}

void DecisionNetwork::set_cpt(const std::string& var, std::vector<double> table) {
  int idx = index_of(var);
  cpt_[idx] = std::move(table);
}

void DecisionNetwork::set_reward(const std::vector<std::string>& domain,
                                 std::vector<double> table) {
  reward_domain_.clear();
  for (const auto& d : domain) reward_domain_.push_back(index_of(d));
  reward_table_ = std::move(table);
}

bool DecisionNetwork::has_variable(const std::string& name) const { return index_.count(name) > 0; }

int DecisionNetwork::index_of(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw std::invalid_argument("unknown variable: " + name);
  return it->second;
}

VariableKind DecisionNetwork::kind_of(const std::string& name) const {
  return vars_[index_of(name)].kind;
}

std::vector<std::string> DecisionNetwork::parents_of(const std::string& name) const {
  std::vector<std::string> out;
  for (int p : parents_[index_of(name)]) out.push_back(vars_[p].name);
  return out;
}

std::vector<std::string> DecisionNetwork::reward_domain() const {
  std::vector<std::string> out;
  for (int p : reward_domain_) out.push_back(vars_[p].name);
  return out;
}

std::vector<std::string> DecisionNetwork::names_of_kind(VariableKind k) const {
  std::vector<std::string> out;
  for (const auto& v : vars_)
    if (v.kind == k) out.push_back(v.name);
  return out;
}

std::vector<int> DecisionNetwork::topological_order() const {
  int n = num_variables();
  std::vector<int> indeg(n, 0);
  std::vector<std::vector<int>> children(n);
  for (int v = 0; v < n; ++v) {
    for (int p : parents_[v]) {
      children[p].push_back(v);
      indeg[v]++;
    }
  }
  std::vector<int> order;
  std::vector<int> ready;
  for (int v = 0; v < n; ++v)
    if (indeg[v] == 0) ready.push_back(v);
  while (!ready.empty()) {
    int v = ready.front();
    ready.erase(ready.begin());
    order.push_back(v);
    for (int c : children[v])
      if (--indeg[c] == 0) ready.push_back(c);
  }
  if (static_cast<int>(order.size()) != n)
    throw std::invalid_argument("network contains a directed cycle");
  return order;
}

std::set<int> DecisionNetwork::ancestors_of(int idx) const {
  std::set<int> out;
  std::vector<int> stack{idx};
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int p : parents_[v])
      if (out.insert(p).second) stack.push_back(p);
  }
  return out;
}

std::set<int> DecisionNetwork::descendants_of(int idx) const {
  int n = num_variables();
  std::vector<std::vector<int>> children(n);
  for (int v = 0; v < n; ++v)
    for (int p : parents_[v]) children[p].push_back(v);
  std::set<int> out;
  std::vector<int> stack{idx};
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int c : children[v])
      if (out.insert(c).second) stack.push_back(c);
  }
  return out;
}

std::size_t DecisionNetwork::table_index(const std::vector<int>& ordered_vars,
                                         const std::vector<bool>& full_state) {
  std::size_t idx = 0;
  for (std::size_t k = 0; k < ordered_vars.size(); ++k)
    if (full_state[ordered_vars[k]]) idx |= (std::size_t{1} << k);
  return idx;
}

std::size_t DecisionNetwork::table_index(const std::vector<std::string>& ordered_vars,
                                         const Assignment& values) {
  std::size_t idx = 0;
  for (std::size_t k = 0; k < ordered_vars.size(); ++k)
    if (values.at(ordered_vars[k])) idx |= (std::size_t{1} << k);
  return idx;
}

std::vector<std::string> validate(const DecisionNetwork& dn) {
  std::vector<std::string> out;
  int n = dn.num_variables();
  if (n == 0) {
    out.push_back("network has no variables");
    return out;
  }

  bool acyclic = true;
  try {
    static_cast<void>(dn.topological_order());
  } catch (const std::invalid_argument&) {
    acyclic = false;
    out.push_back("parent relation contains a directed cycle");
  }

  bool any_action = false;
  for (int v = 0; v < n; ++v) {
    const auto& var = dn.variable(v);
    if (var.kind == VariableKind::Action) {
      any_action = true;
      if (!dn.parent_indices(v).empty())
        out.push_back("action variable has parents: " + var.name);
      if (!dn.cpt_of(v).empty())
        out.push_back("action variable carries a CPT: " + var.name);
    } else {
      std::size_t want = std::size_t{1} << dn.parent_indices(v).size();
      if (dn.cpt_of(v).size() != want)
        out.push_back("CPT size mismatch for " + var.name + ": expected " +
                      std::to_string(want) + ", got " + std::to_string(dn.cpt_of(v).size()));
      for (double p : dn.cpt_of(v))
        if (!(p >= 0.0 && p <= 1.0)) {
          out.push_back("CPT entry outside [0,1] for " + var.name);
          break;
        }
    }
  }
  if (!any_action) out.push_back("network has no action variable");

  if (acyclic) {
    for (int v = 0; v < n; ++v) {
      const auto& var = dn.variable(v);
      auto anc = dn.ancestors_of(v);
      bool action_anc = false, ao_anc = false;
      for (int a : anc) {
        if (dn.variable(a).kind == VariableKind::Action) action_anc = true;
        if (dn.variable(a).kind != VariableKind::Before) ao_anc = true;
      }
      if (var.kind == VariableKind::Before && ao_anc)
        out.push_back("before variable has an action or outcome ancestor: " + var.name);
      if (var.kind == VariableKind::Outcome && !action_anc)
        out.push_back("outcome variable has no action ancestor: " + var.name);
    }
  }

  const auto& rd = dn.reward_domain_indices();
  if (rd.empty()) out.push_back("reward domain is empty");
  std::set<int> rd_set(rd.begin(), rd.end());
  if (rd_set.size() != rd.size()) out.push_back("reward domain lists a variable twice");
  for (int v : rd)
    if (dn.variable(v).kind == VariableKind::Action)
      out.push_back("reward domain contains an action variable: " + dn.name_of(v));
  std::size_t want = std::size_t{1} << rd.size();
  if (dn.reward_table().size() != want)
    out.push_back("reward table size mismatch: expected " + std::to_string(want) + ", got " +
                  std::to_string(dn.reward_table().size()));

  if (acyclic && !rd.empty()) {
    // Connectivity to the utility node: every variable needs a descendant
    // (or itself) inside the reward domain.
    for (int v = 0; v < n; ++v) {
      if (rd_set.count(v)) continue;
      auto desc = dn.descendants_of(v);
      bool connected = false;
      for (int d : desc)
        if (rd_set.count(d)) {
          connected = true;
          break;
        }
      if (!connected)
        out.push_back("variable has no path to the utility node: " + dn.name_of(v));
    }
  }
  return out;
}

double cpt_lookup(const DecisionNetwork& dn, const std::string& var,
                  const Assignment& parent_values) {
  int idx = dn.index_of(var);
  if (dn.variable(idx).kind == VariableKind::Action)
    throw std::invalid_argument("action variables have no CPT: " + var);
  const auto& ps = dn.parent_indices(idx);
  std::size_t ti = 0;
  for (std::size_t k = 0; k < ps.size(); ++k) {
    auto v = parent_values.get(dn.name_of(ps[k]));
    if (!v) throw std::invalid_argument("cpt_lookup: parent unassigned: " + dn.name_of(ps[k]));
    if (*v) ti |= (std::size_t{1} << k);
  }
  return dn.cpt_of(idx)[ti];
}

double reward_of(const DecisionNetwork& dn, const Assignment& state) {
  const auto& rd = dn.reward_domain_indices();
  std::size_t ti = 0;
  for (std::size_t k = 0; k < rd.size(); ++k) {
    auto v = state.get(dn.name_of(rd[k]));
    if (!v) throw std::invalid_argument("reward_of: reward-domain variable unassigned: " +
                                        dn.name_of(rd[k]));
    if (*v) ti |= (std::size_t{1} << k);
  }
  return dn.reward_table()[ti];
}

namespace {

bool draw(double p, std::mt19937_64& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p;
}

void sample_kind(const DecisionNetwork& dn, VariableKind kind, Assignment& state,
                 std::mt19937_64& rng) {
  for (int v : dn.topological_order()) {
    if (dn.variable(v).kind != kind) continue;
    Assignment pv;
    for (int p : dn.parent_indices(v)) pv.set(dn.name_of(p), state.at(dn.name_of(p)));
    state.set(dn.name_of(v), draw(cpt_lookup(dn, dn.name_of(v), pv), rng));
  }
}

}  // namespace

Assignment total_action(const DecisionNetwork& dn, const Assignment& partial) {
  Assignment full;
  for (const auto& v : dn.variables())
    if (v.kind == VariableKind::Action) full.set(v.name, partial.get(v.name).value_or(false));
  return full;
}

Trial sample(const DecisionNetwork& dn, const Assignment& action, std::mt19937_64& rng) {
  for (const auto& a : dn.names_of_kind(VariableKind::Action))
    if (!action.contains(a))
      throw std::invalid_argument("sample: action assignment misses " + a);
  Trial t;
  const auto action_names = dn.names_of_kind(VariableKind::Action);
  t.action = action.restricted_to({action_names.begin(), action_names.end()});
  Assignment state = t.action;
  sample_kind(dn, VariableKind::Before, state, rng);
  sample_kind(dn, VariableKind::Outcome, state, rng);
  std::set<std::string> before_names, outcome_names;
  for (const auto& b : dn.names_of_kind(VariableKind::Before)) before_names.insert(b);
  for (const auto& o : dn.names_of_kind(VariableKind::Outcome)) outcome_names.insert(o);
  t.before = state.restricted_to(before_names);
  t.outcome = state.restricted_to(outcome_names);
  t.reward = reward_of(dn, state);
  return t;
}

Assignment sample_before(const DecisionNetwork& dn, std::mt19937_64& rng) {
  Assignment state;
  sample_kind(dn, VariableKind::Before, state, rng);
  return state;
}

Assignment sample_outcome(const DecisionNetwork& dn, const Assignment& before,
                          const Assignment& action, std::mt19937_64& rng) {
  auto merged = before.merged_with(action);
  if (!merged) throw std::invalid_argument("sample_outcome: before and action overlap");
  Assignment state = *merged;
  sample_kind(dn, VariableKind::Outcome, state, rng);
  std::set<std::string> outcome_names;
  for (const auto& o : dn.names_of_kind(VariableKind::Outcome)) outcome_names.insert(o);
  return state.restricted_to(outcome_names);
}

}  // namespace dnlearn
