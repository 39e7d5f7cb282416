#include "dnlearn/desc.hpp"

#include <algorithm>
#include <sstream>

namespace dnlearn {

namespace {

std::string set_name(const Membership& m) {
  switch (m.set) {
    case SetKind::Before: return "B+";
    case SetKind::Outcome: return "O+";
    case SetKind::Action: return "A+";
    case SetKind::RewardDomain: return "PiR";
    case SetKind::ParentsOf: return "Pi(" + m.parent_of + ")";
  }
  throw std::logic_error("unreachable set kind");
}

}  // namespace

SetKind set_kind_for(VariableKind k) {
  switch (k) {
    case VariableKind::Action: return SetKind::Action;
    case VariableKind::Before: return SetKind::Before;
    case VariableKind::Outcome: return SetKind::Outcome;
  }
  throw std::logic_error("unreachable variable kind");
}

std::string to_string(const Formula& f) {
  if (const auto* m = std::get_if<Membership>(&f))
    return "(in " + m->var + " " + set_name(*m) + ")";
  const auto& se = std::get<StateExists>(f);
  std::ostringstream os;
  os << "(exists-state " << se.literals.to_string() << " (R "
     << (se.cmp.kind == RewardCmp::Eq ? "= " : "> ") << se.cmp.value << "))";
  return os.str();
}

void PartialDescription::conjoin(const Formula& f) {
  if (const auto* m = std::get_if<Membership>(&f)) {
    if (!memberships_.insert(*m).second) return;
    conjuncts_.push_back(f);
    return;
  }
  const auto& se = std::get<StateExists>(f);
  for (const auto& c : conjuncts_)
    if (const auto* prev = std::get_if<StateExists>(&c))
      if (*prev == se) return;
  conjuncts_.push_back(f);
}

bool PartialDescription::entails(const Membership& m) const { return memberships_.count(m) > 0; }

std::set<std::string> PartialDescription::required_parents(const std::string& child) const {
  std::set<std::string> out;
  for (const auto& m : memberships_)
    if (m.set == SetKind::ParentsOf && m.parent_of == child) out.insert(m.var);
  return out;
}

std::set<std::string> PartialDescription::members_of(SetKind kind) const {
  std::set<std::string> out;
  for (const auto& m : memberships_)
    if (m.set == kind) out.insert(m.var);
  return out;
}

std::vector<StateExists> PartialDescription::state_constraints() const {
  std::vector<StateExists> out;
  for (const auto& c : conjuncts_)
    if (const auto* se = std::get_if<StateExists>(&c)) out.push_back(*se);
  return out;
}

std::string PartialDescription::to_string() const {
  std::ostringstream os;
  os << "(and";
  for (const auto& c : conjuncts_) os << " " << dnlearn::to_string(c);
  os << ")";
  return os.str();
}

Formula trial_description(const Trial& t) {
  return StateExists{t.full_state(), RewardCmp{RewardCmp::Eq, t.reward}};
}

std::vector<Formula> advice_content(const Assignment& a_alt, const Assignment& before_obs,
                                    double reward,
                                    const std::vector<std::string>& new_actions) {
  std::vector<Formula> out;
  auto merged = a_alt.merged_with(before_obs);
  if (!merged) throw std::invalid_argument("advice_content: action and state overlap");
  out.push_back(StateExists{*merged, RewardCmp{RewardCmp::Gt, reward}});
  for (const auto& a : new_actions) out.push_back(Membership{a, SetKind::Action, {}});
  return out;
}

bool satisfies(const DecisionNetwork& dn, const Formula& f) {
  if (const auto* m = std::get_if<Membership>(&f)) {
    if (!dn.has_variable(m->var)) return false;
    switch (m->set) {
      case SetKind::Before: return dn.kind_of(m->var) == VariableKind::Before;
      case SetKind::Outcome: return dn.kind_of(m->var) == VariableKind::Outcome;
      case SetKind::Action: return dn.kind_of(m->var) == VariableKind::Action;
      case SetKind::RewardDomain: {
        auto rd = dn.reward_domain();
        return std::find(rd.begin(), rd.end(), m->var) != rd.end();
      }
      case SetKind::ParentsOf: {
        if (!dn.has_variable(m->parent_of)) return false;
        auto ps = dn.parents_of(m->parent_of);
        return std::find(ps.begin(), ps.end(), m->var) != ps.end();
      }
    }
    return false;
  }

  const auto& se = std::get<StateExists>(f);
  for (const auto& [var, val] : se.literals)
    if (!dn.has_variable(var)) return false;

  std::vector<std::string> rd = dn.reward_domain();
  Assignment fixed;
  std::vector<std::string> free;
  for (const auto& v : rd) {
    auto got = se.literals.get(v);
    if (got)
      fixed.set(v, *got);
    else
      free.push_back(v);
  }
  for (std::size_t j = 0; j < (std::size_t{1} << free.size()); ++j) {
    Assignment state = fixed;
    for (std::size_t k = 0; k < free.size(); ++k) state.set(free[k], (j >> k) & 1);
    double r = reward_of(dn, state);
    bool ok = se.cmp.kind == RewardCmp::Eq ? r == se.cmp.value : r > se.cmp.value;
    if (ok) return true;
  }
  return false;
}

bool satisfies(const DecisionNetwork& dn, const PartialDescription& delta) {
  for (const auto& c : delta.conjuncts())
    if (!satisfies(dn, c)) return false;
  return true;
}

}  // namespace dnlearn
