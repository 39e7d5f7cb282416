#include "dnlearn/dialogue.hpp"

#include <algorithm>
#include <stdexcept>

#include "dnlearn/inference.hpp"

namespace dnlearn {

namespace {

constexpr double kEuTol = 1e-12;

// k-th sorted name takes bit n-1-k, so ascending codes enumerate assignments
// in lexicographic order.
Assignment lex_assignment(const std::vector<std::string>& sorted_names, std::uint64_t code) {
  Assignment a;
  const std::size_t n = sorted_names.size();
  for (std::size_t k = 0; k < n; ++k) a.set(sorted_names[k], ((code >> (n - 1 - k)) & 1u) != 0);
  return a;
}

}  // namespace

Expert::Expert(DecisionNetwork dn_plus, double beta, int gamma, std::uint64_t seed)
    : dn_(std::move(dn_plus)), beta_(beta), gamma_(gamma), rng_(seed) {
  auto problems = validate(dn_);
  if (!problems.empty()) throw std::invalid_argument("expert network invalid: " + problems.front());
}

void Expert::mention(const std::string& name) {
  if (!dn_.has_variable(name)) return;
  if (dn_.kind_of(name) == VariableKind::Action)
    ae_.insert(name);
  else
    ce_.insert(name);
}

void Expert::observe_initial_description(const PartialDescription& delta0) {
  for (const auto& f : delta0.conjuncts()) {
    if (const auto* m = std::get_if<Membership>(&f)) {
      mention(m->var);
      if (!m->parent_of.empty()) mention(m->parent_of);
    } else if (const auto* s = std::get_if<StateExists>(&f)) {
      for (const auto& [var, value] : s->literals) mention(var);
    }
  }
}

void Expert::observe_trial(int step, const Trial& t) {
  for (const auto& [var, value] : t.action)
    if (value) mention(var);  // performing an action positively reveals it
  LoggedTrial lt{step, t, false};
  const double eu_taken = expected_utility(dn_, t.action, t.before);
  lt.suboptimal = eu_taken < optimal_eu(t.before) - kEuTol;
  step_index_[step] = log_.size();
  log_.push_back(std::move(lt));
}

double Expert::optimal_eu(const Assignment& before) {
  auto it = opt_eu_cache_.find(before);
  if (it != opt_eu_cache_.end()) return it->second;
  const Assignment best = optimal_action(dn_, before);
  const double eu = expected_utility(dn_, best, before);
  opt_eu_cache_.emplace(before, eu);
  return eu;
}

bool Expert::reward_witness_above(const Assignment& literals, double reward) const {
  return satisfies(dn_, Formula{StateExists{literals, RewardCmp{RewardCmp::Gt, reward}}});
}

std::optional<AdviceSignal> Expert::maybe_advise(int step) {
  if (log_.empty()) return std::nullopt;
  if (step - last_advice_step_ <= gamma_) return std::nullopt;

  int window_trials = 0, window_bad = 0;
  for (auto it = log_.rbegin(); it != log_.rend() && it->step >= last_advice_step_; ++it) {
    ++window_trials;
    if (it->suboptimal) ++window_bad;
  }
  if (window_trials == 0) return std::nullopt;
  if (static_cast<double>(window_bad) / window_trials <= beta_) return std::nullopt;

  const LoggedTrial& last = log_.back();
  const Assignment& b_plus = last.trial.before;
  const Assignment& a_plus = last.trial.action;
  const double eu_taken = expected_utility(dn_, a_plus, b_plus);
  // Bad luck is not a bad choice: stay silent when the action was expected to
  // earn at least what came out.
  if (eu_taken < last.trial.reward - kEuTol) return std::nullopt;

  std::vector<std::string> base(ae_.begin(), ae_.end());
  std::vector<std::optional<std::string>> extras;
  extras.emplace_back(std::nullopt);
  {
    auto all_actions = dn_.names_of_kind(VariableKind::Action);
    std::sort(all_actions.begin(), all_actions.end());
    for (const auto& name : all_actions)
      if (!ae_.count(name)) extras.emplace_back(name);
  }

  struct Candidate {
    double eu;
    Assignment preferred;
    std::optional<std::string> extra;
    std::vector<std::string> mention_set;
  };
  std::optional<Candidate> best;
  for (const auto& extra : extras) {
    std::vector<std::string> names = base;
    if (extra) {
      names.push_back(*extra);
      std::sort(names.begin(), names.end());
    }
    if (names.empty()) continue;
    const std::uint64_t total = 1ull << names.size();
    for (std::uint64_t code = 0; code < total; ++code) {
      Assignment alt = lex_assignment(names, code);
      const double eu_alt = expected_utility(dn_, total_action(dn_, alt), b_plus);
      if (eu_alt <= eu_taken + kEuTol) continue;        // need a strict improvement
      if (best && eu_alt <= best->eu + kEuTol) continue;  // ties keep the earlier find
      // Cooperativity: only claim what some concrete state can witness.
      auto merged = alt.merged_with(b_plus);
      if (!merged || !reward_witness_above(*merged, last.trial.reward)) continue;
      best = Candidate{eu_alt, std::move(alt), extra, names};
    }
  }
  if (!best) return std::nullopt;

  last_advice_step_ = step;
  AdviceSignal sig;
  sig.preferred = std::move(best->preferred);
  for (const auto& name : best->mention_set) sig.taken.set(name, a_plus.get(name).value_or(false));
  sig.trial_step = last.step;
  sig.reward = last.trial.reward;
  sig.new_action = best->extra;
  for (const auto& name : best->mention_set) mention(name);
  return sig;
}

Answer Expert::answer(const Question& q) {
  if (const auto* mb = std::get_if<AskMissingB>(&q)) {
    auto ia = step_index_.find(mb->step_a);
    auto ib = step_index_.find(mb->step_b);
    if (ia == step_index_.end() || ib == step_index_.end())
      throw std::invalid_argument("question references unknown trials");
    const Trial& ta = log_[ia->second].trial;
    const Trial& tb = log_[ib->second].trial;
    std::vector<std::string> differing;
    for (const auto& [var, value] : ta.before)
      if (tb.before.at(var) != value) differing.push_back(var);
    if (differing.empty()) throw std::logic_error("referenced contexts do not differ");
    std::uniform_int_distribution<std::size_t> pick(0, differing.size() - 1);
    const std::string& var = differing[pick(rng_)];
    mention(var);
    return Answer{{Formula{Membership{var, SetKind::Before, {}}}}};
  }

  if (const auto* ur = std::get_if<AskUnforeseenReward>(&q)) {
    for (const auto& v : ur->known_domain) mention(v);
    std::vector<Formula> out;
    std::vector<std::string> aware, unfamiliar;
    {
      auto domain = dn_.reward_domain();
      std::sort(domain.begin(), domain.end());
      for (const auto& v : domain) {
        if (ur->known_domain.count(v)) continue;
        (ce_.count(v) ? aware : unfamiliar).push_back(v);
      }
    }
    for (const auto& v : aware) out.emplace_back(Membership{v, SetKind::RewardDomain, {}});
    if (!unfamiliar.empty()) {
      // Prefer a variable that explains the reward discrepancy: its value
      // flips between the latest trial and a prior trial that agrees on the
      // asked-about domain yet earned differently.
      std::optional<std::string> chosen;
      if (!log_.empty()) {
        const Trial& latest = log_.back().trial;
        const Assignment latest_full = latest.full_state();
        const Assignment latest_known = latest_full.restricted_to(ur->known_domain);
        for (const auto& x : unfamiliar) {
          for (std::size_t i = 0; i + 1 < log_.size(); ++i) {
            const Trial& prior = log_[i].trial;
            const Assignment prior_full = prior.full_state();
            if (prior_full.restricted_to(ur->known_domain) != latest_known) continue;
            if (prior.reward == latest.reward) continue;
            if (prior_full.at(x) != latest_full.at(x)) {
              chosen = x;
              break;
            }
          }
          if (chosen) break;
        }
      }
      if (!chosen) chosen = unfamiliar.front();
      out.emplace_back(Membership{*chosen, SetKind::RewardDomain, {}});
      out.emplace_back(Membership{*chosen, set_kind_for(dn_.kind_of(*chosen)), {}});
      mention(*chosen);
    }
    return Answer{std::move(out)};
  }

  const auto& we = std::get<AskWhichEffect>(q);
  if (!dn_.has_variable(we.variable)) throw std::invalid_argument("unknown variable in question");
  mention(we.variable);
  std::vector<std::string> children;
  const int asked = dn_.index_of(we.variable);
  for (int i = 0; i < dn_.num_variables(); ++i) {
    const auto& ps = dn_.parent_indices(i);
    if (std::find(ps.begin(), ps.end(), asked) != ps.end()) children.push_back(dn_.name_of(i));
  }
  std::sort(children.begin(), children.end());
  if (children.empty()) {
    // Connectivity guarantees a childless chance variable carries reward directly.
    return Answer{{Formula{Membership{we.variable, SetKind::RewardDomain, {}}}}};
  }
  std::vector<std::string> unaware;
  for (const auto& c : children)
    if (!ce_.count(c) && !ae_.count(c)) unaware.push_back(c);
  const auto& pool = unaware.empty() ? children : unaware;
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  const std::string& child = pool[pick(rng_)];
  const bool fresh = !ce_.count(child) && !ae_.count(child);
  std::vector<Formula> out;
  out.emplace_back(Membership{we.variable, SetKind::ParentsOf, child});
  if (fresh) out.emplace_back(Membership{child, set_kind_for(dn_.kind_of(child)), {}});
  mention(child);
  return Answer{std::move(out)};
}

std::optional<MisunderstandingMonitor::Conflict> MisunderstandingMonitor::observe_advice(
    const Assignment& context, const Assignment& preferred, const Assignment& taken,
    int trial_step) {
  std::optional<Conflict> found;
  for (auto it = records_.rbegin(); it != records_.rend(); ++it) {
    if (it->context != context) continue;
    if (it->preferred == taken && it->taken == preferred) {
      found = Conflict{it->trial_step, trial_step};
      break;
    }
  }
  records_.push_back(Record{context, preferred, taken, trial_step});
  return found;
}

void MisunderstandingMonitor::forget() { records_.clear(); }

}  // namespace dnlearn
