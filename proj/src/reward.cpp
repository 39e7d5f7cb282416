#include "dnlearn/reward.hpp"

#include <algorithm>

namespace dnlearn {

std::set<std::string> Vocabulary::chance() const {
  std::set<std::string> out = before;
  out.insert(outcomes.begin(), outcomes.end());
  return out;
}

std::set<std::string> Vocabulary::all() const {
  std::set<std::string> out = chance();
  out.insert(actions.begin(), actions.end());
  return out;
}

Vocabulary estimate_vocabulary(const PartialDescription& delta) {
  Vocabulary v;
  v.before = delta.members_of(SetKind::Before);
  v.outcomes = delta.members_of(SetKind::Outcome);
  v.actions = delta.members_of(SetKind::Action);
  v.reward_domain = delta.members_of(SetKind::RewardDomain);
  return v;
}

void IncrementalRewardSolver::reset(const Vocabulary& vocab) {
  *this = IncrementalRewardSolver{};
  domain_set_ = vocab.reward_domain;
  domain_.assign(domain_set_.begin(), domain_set_.end());
}

bool IncrementalRewardSolver::add_constraint(const StateExists& se) {
  Constraint c;
  c.cmp = se.cmp;
  for (std::size_t k = 0; k < domain_.size(); ++k) {
    auto v = se.literals.get(domain_[k]);
    if (!v)
      c.free_bits.push_back(k);
    else if (*v)
      c.base |= (std::size_t{1} << k);
  }
  // Fully-pinned constraints place unconditionally, so contradictions among
  // them end the whole search right away.
  if (c.free_bits.empty()) {
    if (c.cmp.kind == RewardCmp::Eq) {
      auto it = pinned_eq_.find(c.base);
      if (it != pinned_eq_.end() && it->second != c.cmp.value) return false;
      auto lbit = pinned_lb_.find(c.base);
      if (lbit != pinned_lb_.end() && c.cmp.value <= lbit->second) return false;
      pinned_eq_.emplace(c.base, c.cmp.value);
    } else {
      auto it = pinned_eq_.find(c.base);
      if (it != pinned_eq_.end() && it->second <= c.cmp.value) return false;
      auto [lbit, inserted] = pinned_lb_.try_emplace(c.base, c.cmp.value);
      if (!inserted) lbit->second = std::max(lbit->second, c.cmp.value);
    }
  }
  cs_.push_back(std::move(c));
  return true;
}

bool IncrementalRewardSolver::place_all() {
  frames_.resize(cs_.size());
  while (pos_ < cs_.size()) {
    Frame& fr = frames_[pos_];
    const Constraint& c = cs_[pos_];
    const std::size_t nfree = c.free_bits.size();
    const std::size_t limit = std::size_t{1} << nfree;
    bool placed = false;
    while (fr.next_j < limit) {
      // Candidate completions in lexicographic order of the free variables'
      // value tuple: the first free variable tracks the top bit of j.
      std::size_t s = c.base;
      const std::size_t j = fr.next_j++;
      for (std::size_t k = 0; k < nfree; ++k)
        if ((j >> (nfree - 1 - k)) & 1) s |= (std::size_t{1} << c.free_bits[k]);

      if (c.cmp.kind == RewardCmp::Eq) {
        const double r = c.cmp.value;
        {  // doomed against future forced placements
          auto it = pinned_eq_.find(s);
          if (it != pinned_eq_.end() && it->second != r) continue;
          auto lbit = pinned_lb_.find(s);
          if (lbit != pinned_lb_.end() && r <= lbit->second) continue;
        }
        auto it = eq_.find(s);
        if (it != eq_.end() && it->second != r) continue;
        auto lbit = lb_.find(s);
        if (lbit != lb_.end() && r <= lbit->second) continue;
        fr.eq_existed = it != eq_.end();
        eq_[s] = r;
        fr.placed_eq = true;
        fr.state = s;
        placed = true;
        break;
      }

      const double b = c.cmp.value;
      {
        auto it = pinned_eq_.find(s);
        if (it != pinned_eq_.end() && it->second <= b) continue;
      }
      auto it = eq_.find(s);
      if (it != eq_.end() && it->second <= b) continue;
      auto lbit = lb_.find(s);
      fr.lb_existed = lbit != lb_.end();
      fr.lb_prev = fr.lb_existed ? lbit->second : 0.0;
      lb_[s] = fr.lb_existed ? std::max(fr.lb_prev, b) : b;
      fr.placed_eq = false;
      fr.state = s;
      placed = true;
      break;
    }
    if (placed) {
      ++pos_;
      if (pos_ < frames_.size()) frames_[pos_] = Frame{};
      continue;
    }
    deepest_fail_ = std::max(deepest_fail_, pos_);
    if (pos_ == 0) return false;
    --pos_;
    Frame& prev = frames_[pos_];
    if (prev.placed_eq) {
      // Re-asserting an existing equality left the stored value unchanged.
      if (!prev.eq_existed) eq_.erase(prev.state);
    } else if (prev.lb_existed) {
      lb_[prev.state] = prev.lb_prev;
    } else {
      lb_.erase(prev.state);
    }
  }
  return true;
}

RewardUpdateResult IncrementalRewardSolver::update(const PartialDescription& delta,
                                                   double margin) {
  const auto& conjuncts = delta.conjuncts();
  for (; next_conjunct_ < conjuncts.size() && !unsat_; ++next_conjunct_) {
    const auto* se = std::get_if<StateExists>(&conjuncts[next_conjunct_]);
    if (!se) continue;
    if (!add_constraint(*se)) {
      deepest_fail_ = cs_.size();
      unsat_ = true;
    }
  }
  if (!unsat_ && !place_all()) unsat_ = true;
  if (unsat_) return UnforeseenReward{domain_set_};

  RewardEstimate est;
  est.domain = domain_;
  est.table.assign(std::size_t{1} << domain_.size(), 0.0);
  for (const auto& [s, r] : lb_) est.table[s] = r + margin;
  for (const auto& [s, r] : eq_) est.table[s] = r;
  return est;
}

RewardSolveResult IncrementalRewardSolver::current() const {
  if (unsat_) return RewardUnsat{deepest_fail_};
  RewardSolution sol;
  sol.domain = domain_;
  sol.equalities = eq_;
  sol.lower_bounds = lb_;
  sol.witnesses.reserve(cs_.size());
  for (std::size_t i = 0; i < pos_; ++i) sol.witnesses.push_back(frames_[i].state);
  return sol;
}

RewardSolveResult solve_reward(const PartialDescription& delta, const Vocabulary& vocab) {
  IncrementalRewardSolver solver;
  solver.reset(vocab);
  static_cast<void>(solver.update(delta));
  return solver.current();
}

std::vector<double> complete_reward(const RewardSolution& sol, double margin) {
  std::vector<double> table(std::size_t{1} << sol.domain.size(), 0.0);
  for (const auto& [s, r] : sol.lower_bounds) table[s] = r + margin;
  for (const auto& [s, r] : sol.equalities) table[s] = r;
  return table;
}

RewardUpdateResult reward_update(const PartialDescription& delta, const Vocabulary& vocab,
                                 double margin) {
  IncrementalRewardSolver solver;
  solver.reset(vocab);
  return solver.update(delta, margin);
}

}  // namespace dnlearn
