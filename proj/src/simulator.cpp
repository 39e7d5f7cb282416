#include "dnlearn/simulator.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "dnlearn/inference.hpp"

namespace dnlearn {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t run, std::uint64_t stream) {
  return splitmix64(splitmix64(seed + 0x632be59bd9b4e019ull * (run + 1)) + stream);
}

// k-th sorted name takes bit n-1-k: ascending codes walk assignments in
// lexicographic order.
Assignment lex_assignment(const std::vector<std::string>& sorted_names, std::uint64_t code) {
  Assignment a;
  const std::size_t n = sorted_names.size();
  for (std::size_t k = 0; k < n; ++k) a.set(sorted_names[k], ((code >> (n - 1 - k)) & 1u) != 0);
  return a;
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::string assignment_text(const Assignment& a) {
  std::string out = "{";
  bool first = true;
  for (const auto& [var, value] : a) {
    if (!first) out += ", ";
    first = false;
    out += var + "=" + (value ? "1" : "0");
  }
  return out + "}";
}

std::string question_text(const Question& q) {
  if (const auto* mb = std::get_if<AskMissingB>(&q)) {
    return "what differed before I acted at step " + std::to_string(mb->step_b) +
           " versus step " + std::to_string(mb->step_a) + "?";
  }
  if (const auto* ur = std::get_if<AskUnforeseenReward>(&q)) {
    std::string out = "which reward factors am I missing beyond {";
    bool first = true;
    for (const auto& v : ur->known_domain) {
      if (!first) out += ", ";
      first = false;
      out += v;
    }
    return out + "}?";
  }
  return "what does " + std::get<AskWhichEffect>(q).variable + " affect?";
}

std::string answer_text(const Answer& ans) {
  std::string out;
  for (const auto& f : ans.conjuncts) {
    if (!out.empty()) out += " and ";
    out += to_string(f);
  }
  return out.empty() ? "(nothing)" : out;
}

std::string padded_name(const char* prefix, int i, int count) {
  std::size_t width = std::to_string(count).size();
  std::string digits = std::to_string(i + 1);
  if (digits.size() < width) digits.insert(0, width - digits.size(), '0');
  return prefix + digits;
}

}  // namespace

AgentVariant agent_variant_from_string(const std::string& s) {
  if (s == "default") return AgentVariant::Default;
  if (s == "slightly-min") return AgentVariant::SlightlyMin;
  if (s == "maximal") return AgentVariant::Maximal;
  if (s == "non-con") return AgentVariant::NonConservative;
  if (s == "decay") return AgentVariant::Decay;
  if (s == "full-vocab") return AgentVariant::FullVocab;
  if (s == "baseline") return AgentVariant::Baseline;
  throw std::invalid_argument("unknown agent variant: " + s);
}

std::string to_string(AgentVariant v) {
  switch (v) {
    case AgentVariant::Default: return "default";
    case AgentVariant::SlightlyMin: return "slightly-min";
    case AgentVariant::Maximal: return "maximal";
    case AgentVariant::NonConservative: return "non-con";
    case AgentVariant::Decay: return "decay";
    case AgentVariant::FullVocab: return "full-vocab";
    case AgentVariant::Baseline: return "baseline";
  }
  throw std::logic_error("unreachable agent variant");
}

AgentConfig AgentConfig::for_variant(AgentVariant v) {
  AgentConfig c;
  switch (v) {
    case AgentVariant::Default:
      break;
    case AgentVariant::SlightlyMin:
      c.hyper.rho = 0.5;
      break;
    case AgentVariant::Maximal:
      c.hyper.rho = 0.5;
      c.hyper.asleep_c = 0.0;
      c.reward_domain_all = true;
      break;
    case AgentVariant::NonConservative:
      c.hyper.conservative = false;
      break;
    case AgentVariant::Decay:
      c.epsilon_decay = 0.999;
      break;
    case AgentVariant::FullVocab:
      c.full_vocabulary = true;
      break;
    case AgentVariant::Baseline:
      c.baseline = true;
      break;
  }
  return c;
}

PartialDescription initial_description(const DecisionNetwork& dn0) {
  PartialDescription d;
  for (const auto& v : dn0.variables()) d.conjoin(Membership{v.name, set_kind_for(v.kind), {}});
  for (const auto& r : dn0.reward_domain()) d.conjoin(Membership{r, SetKind::RewardDomain, {}});
  return d;
}

PartialDescription minimal_description(const DecisionNetwork& dn_plus) {
  auto actions = dn_plus.names_of_kind(VariableKind::Action);
  std::sort(actions.begin(), actions.end());
  std::vector<std::string> domain_outcomes;
  for (const auto& r : dn_plus.reward_domain())
    if (dn_plus.kind_of(r) == VariableKind::Outcome) domain_outcomes.push_back(r);
  std::sort(domain_outcomes.begin(), domain_outcomes.end());
  if (actions.empty() || domain_outcomes.empty())
    throw std::invalid_argument("network lacks an action or a reward-bearing outcome");
  PartialDescription d;
  d.conjoin(Membership{actions.front(), SetKind::Action, {}});
  d.conjoin(Membership{domain_outcomes.front(), SetKind::Outcome, {}});
  d.conjoin(Membership{domain_outcomes.front(), SetKind::RewardDomain, {}});
  return d;
}

PartialDescription full_description(const DecisionNetwork& dn_plus) {
  return initial_description(dn_plus);
}

DecisionNetwork generate_random_dn(std::uint64_t seed, int n_actions, int n_before, int n_outcomes,
                                   int reward_vars, double reward_max) {
  if (n_actions < 1 || n_outcomes < 1 || n_before < 0 || reward_vars < 1)
    throw std::invalid_argument("generator needs at least one action, outcome and reward factor");
  if (reward_vars > n_before + n_outcomes)
    throw std::invalid_argument("reward domain larger than the chance vocabulary");

  std::mt19937_64 rng(seed);
  std::vector<std::string> A, B, O;
  for (int i = 0; i < n_actions; ++i) A.push_back(padded_name("A", i, n_actions));
  for (int i = 0; i < n_before; ++i) B.push_back(padded_name("B", i, n_before));
  for (int i = 0; i < n_outcomes; ++i) O.push_back(padded_name("O", i, n_outcomes));

  DecisionNetwork dn;
  for (const auto& a : A) dn.add_variable(a, VariableKind::Action);
  for (const auto& b : B) dn.add_variable(b, VariableKind::Before);
  for (const auto& o : O) dn.add_variable(o, VariableKind::Outcome);

  // Reward domain: one anchor outcome (outcomes must be able to reach the
  // reward node), then the rest uniformly from the remaining chance variables.
  std::uniform_int_distribution<int> pick_anchor(0, n_outcomes - 1);
  const std::string anchor = O[pick_anchor(rng)];
  std::vector<std::string> pool;
  for (const auto& b : B) pool.push_back(b);
  for (const auto& o : O)
    if (o != anchor) pool.push_back(o);
  std::vector<std::string> domain{anchor};
  for (int k = 0; k + 1 < reward_vars; ++k) {
    std::uniform_int_distribution<std::size_t> pick(k, pool.size() - 1);
    std::swap(pool[k], pool[pick(rng)]);
    domain.push_back(pool[k]);
  }

  // Construction order for outcomes, anchor last: every repair below can then
  // fall back to a later connected outcome.
  std::vector<std::string> o_order = O;
  std::shuffle(o_order.begin(), o_order.end(), rng);
  auto at = std::find(o_order.begin(), o_order.end(), anchor);
  std::rotate(at, at + 1, o_order.end());

  const int n = n_actions + n_before + n_outcomes;
  std::bernoulli_distribution edge(n > 1 ? 2.0 / (n - 1) : 0.0);
  std::map<std::string, std::vector<std::string>> parents;
  for (int i = 0; i < n_before; ++i)
    for (int j = 0; j < i; ++j)
      if (edge(rng)) parents[B[i]].push_back(B[j]);
  for (std::size_t i = 0; i < o_order.size(); ++i) {
    for (const auto& a : A)
      if (edge(rng)) parents[o_order[i]].push_back(a);
    for (const auto& b : B)
      if (edge(rng)) parents[o_order[i]].push_back(b);
    for (std::size_t j = 0; j < i; ++j)
      if (edge(rng)) parents[o_order[i]].push_back(o_order[j]);
  }

  // Repair 1: every outcome needs an action ancestor.
  std::set<std::string> action_set(A.begin(), A.end());
  std::map<std::string, bool> has_action_anc;
  for (const auto& o : o_order) {
    bool ok = false;
    for (const auto& p : parents[o])
      if (action_set.count(p) || has_action_anc[p]) ok = true;
    if (!ok) {
      std::uniform_int_distribution<int> pa(0, n_actions - 1);
      parents[o].push_back(A[pa(rng)]);
    }
    has_action_anc[o] = true;
  }

  // Repair 2: every variable needs a directed path into the reward domain.
  std::vector<std::string> topo;
  for (const auto& a : A) topo.push_back(a);
  for (const auto& b : B) topo.push_back(b);
  for (const auto& o : o_order) topo.push_back(o);
  std::map<std::string, int> topo_pos;
  for (std::size_t i = 0; i < topo.size(); ++i) topo_pos[topo[i]] = static_cast<int>(i);
  std::map<std::string, std::vector<std::string>> children;
  for (const auto& [child, plist] : parents)
    for (const auto& p : plist) children[p].push_back(child);
  std::set<std::string> domain_set(domain.begin(), domain.end());
  std::set<std::string> before_set(B.begin(), B.end());
  std::map<std::string, bool> connected;
  for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
    const std::string& v = *it;
    bool ok = domain_set.count(v) > 0;
    for (const auto& ch : children[v])
      if (connected[ch]) ok = true;
    if (!ok) {
      std::vector<std::string> cands;
      for (int j = topo_pos[v] + 1; j < static_cast<int>(topo.size()); ++j) {
        const std::string& u = topo[j];
        if (!connected[u]) continue;
        if (action_set.count(u)) continue;  // actions never take parents
        if (before_set.count(u) && !before_set.count(v)) continue;  // only B may parent B
        cands.push_back(u);
      }
      std::uniform_int_distribution<std::size_t> pick(0, cands.size() - 1);
      const std::string& child = cands[pick(rng)];
      parents[child].push_back(v);
      children[v].push_back(child);
      ok = true;
    }
    connected[v] = ok;
  }

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::string> chance_order = B;
  chance_order.insert(chance_order.end(), o_order.begin(), o_order.end());
  for (const auto& v : chance_order) {
    auto ps = parents[v];
    std::sort(ps.begin(), ps.end());
    dn.set_parents(v, ps);
    std::vector<double> table(std::size_t{1} << ps.size());
    for (auto& cell : table) cell = unit(rng);
    dn.set_cpt(v, table);
  }
  std::sort(domain.begin(), domain.end());
  std::vector<double> reward(std::size_t{1} << domain.size());
  std::uniform_real_distribution<double> rgen(0.0, reward_max);
  for (auto& cell : reward) cell = rgen(rng);
  dn.set_reward(domain, reward);

  auto problems = validate(dn);
  if (!problems.empty())
    throw std::logic_error("generator produced an invalid network: " + problems.front());
  return dn;
}

LearnerAgent::LearnerAgent(const AgentConfig& cfg, const PartialDescription& delta0,
                           std::uint64_t seed)
    : cfg_(cfg), delta_(delta0), epsilon_(cfg.epsilon0), rng_(seed) {
  if (cfg_.baseline)
    throw std::invalid_argument("baseline agent needs a frozen starting network");
  vocab_ = estimate_vocabulary(delta_);
  belief_ = BeliefState::initial(vocab_, delta_, cfg_.hyper);
  for (const auto& f : delta_.conjuncts()) {
    const auto* m = std::get_if<Membership>(&f);
    if (m && m->set == SetKind::ParentsOf) expert_edges_seen_.insert({m->var, m->parent_of});
  }
  revise(nullptr);
  if (pending_) throw std::invalid_argument("initial description raises a question");
}

LearnerAgent::LearnerAgent(const AgentConfig& cfg, const PartialDescription& delta0,
                           DecisionNetwork frozen, std::uint64_t seed)
    : cfg_(cfg), delta_(delta0), epsilon_(cfg.epsilon0), rng_(seed) {
  cfg_.baseline = true;
  vocab_ = estimate_vocabulary(delta_);
  for (const auto& v : frozen.variables()) {
    if (v.kind == VariableKind::Action) continue;
    auto ps = frozen.parents_of(v.name);
    std::sort(ps.begin(), ps.end());
    counts_[v.name].assign(std::size_t{1} << ps.size(), {0, 0});
    parents_[v.name] = std::move(ps);
  }
  reward_solver_.reset(reward_solve_vocab());
  auto res = reward_solver_.update(delta_);
  if (!std::holds_alternative<RewardEstimate>(res))
    throw std::invalid_argument("initial description conflicts with the frozen reward domain");
  reward_ = std::get<RewardEstimate>(res);
  rebuild_model();
}

std::size_t LearnerAgent::lattice_nodes() const {
  return cfg_.baseline ? 0 : belief_.total_lattice_nodes();
}

Assignment LearnerAgent::choose_action(const Assignment& before_view) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (unit(rng_) < epsilon_) {
    std::vector<std::string> acts(vocab_.actions.begin(), vocab_.actions.end());
    std::uniform_int_distribution<std::uint64_t> pick(0, (std::uint64_t{1} << acts.size()) - 1);
    return lex_assignment(acts, pick(rng_));
  }
  return optimal_action(dn_, before_view);
}

Trial LearnerAgent::restrict_trial(const Trial& full) const {
  Trial v;
  v.before = full.before.restricted_to(vocab_.before);
  v.action = full.action.restricted_to(vocab_.actions);
  v.outcome = full.outcome.restricted_to(vocab_.outcomes);
  v.reward = full.reward;
  return v;
}

void LearnerAgent::observe_trial(int step, const Trial& view) {
  trial_log_[step] = view;
  delta_.conjoin(trial_description(view));
  if (cfg_.baseline) {
    baseline_observe(view);
    return;
  }
  revise(&view);
}

void LearnerAgent::observe_advice(const AdviceSignal& sig) {
  const Trial& rec = trial_log_.at(sig.trial_step);
  auto conflict =
      monitor_.observe_advice(rec.before, sig.preferred, sig.taken, sig.trial_step);
  std::vector<std::string> new_actions;
  const auto known = vocab_.all();
  for (const auto& [var, value] : sig.preferred)
    if (!known.count(var)) new_actions.push_back(var);
  if (new_actions.size() > 1)
    throw std::runtime_error("protocol violation: advice names two unfamiliar variables");
  for (const auto& f : advice_content(sig.preferred, rec.before, sig.reward, new_actions))
    delta_.conjoin(f);
  if (conflict) {
    // Contradictory interpretations: some context variable is missing.  Ask
    // before trusting any model revision built on the misreading.
    pending_ = AskMissingB{conflict->step_a, conflict->step_b};
    return;
  }
  revise(nullptr);
}

void LearnerAgent::observe_answer(const Answer& ans) {
  check_new_variables(ans.conjuncts);
  pending_.reset();
  for (const auto& f : ans.conjuncts) delta_.conjoin(f);
  revise(nullptr);
}

void LearnerAgent::check_new_variables(const std::vector<Formula>& conjuncts) const {
  const auto known = vocab_.all();
  std::set<std::string> fresh;
  for (const auto& f : conjuncts) {
    const auto* m = std::get_if<Membership>(&f);
    if (m && !known.count(m->var)) fresh.insert(m->var);
  }
  if (fresh.size() > 1)
    throw std::runtime_error("protocol violation: answer names two unfamiliar variables");
}

Vocabulary LearnerAgent::reward_solve_vocab() const {
  Vocabulary v = vocab_;
  if (cfg_.reward_domain_all) v.reward_domain = v.chance();
  return v;
}

void LearnerAgent::revise(const Trial* fresh_trial) {
  bool su_needed = false;

  Vocabulary vnew = estimate_vocabulary(delta_);
  {
    std::vector<std::string> fresh;
    const auto known = vocab_.all();
    for (const auto& v : vnew.all())
      if (!known.count(v)) fresh.push_back(v);
    if (!fresh.empty()) {
      bool before_grew = false;
      for (const auto& z : fresh)
        if (vnew.before.count(z)) before_grew = true;
      if (cfg_.hyper.conservative) {
        // One variable at a time, each expansion anchored to the last
        // complete model.
        const DecisionNetwork snapshot = dn_;
        Vocabulary running = vocab_;
        for (const auto& z : fresh) {
          if (vnew.actions.count(z))
            running.actions.insert(z);
          else if (vnew.before.count(z))
            running.before.insert(z);
          else
            running.outcomes.insert(z);
          belief_.extend_vocabulary(z, running, delta_, snapshot);
          belief_.structural_update_all(cfg_.hyper.asleep_c);
        }
      } else {
        belief_.reset_vocabulary(vnew, delta_);
        belief_.structural_update_all(cfg_.hyper.asleep_c);
      }
      trials_since_su_ = 0;
      // Older advice predates the richer context language; stop testing it.
      if (before_grew) monitor_.forget();
    }
    vocab_ = vnew;
  }

  if (fresh_trial) {
    belief_.parameter_update_trial(*fresh_trial);
    ++trials_since_su_;
  }

  for (const auto& f : delta_.conjuncts()) {
    const auto* m = std::get_if<Membership>(&f);
    if (!m || m->set != SetKind::ParentsOf) continue;
    auto key = std::make_pair(m->var, m->parent_of);
    if (expert_edges_seen_.count(key)) continue;
    expert_edges_seen_.insert(key);
    if (vocab_.chance().count(m->parent_of) == 0) continue;
    if (belief_.parameter_update_expert(m->parent_of, {m->var}) == ExpertUpdateOutcome::AllZero)
      su_needed = true;
  }

  {
    const Vocabulary rv = reward_solve_vocab();
    if (rv.reward_domain != reward_solver_.domain_set()) reward_solver_.reset(rv);
  }
  auto reward_res = reward_solver_.update(delta_);
  if (const auto* conflict = std::get_if<UnforeseenReward>(&reward_res)) {
    pending_ = AskUnforeseenReward{conflict->known_domain};
    return;
  }
  reward_ = std::get<RewardEstimate>(reward_res);

  if (trials_since_su_ >= cfg_.su_period) su_needed = true;
  if (su_needed) {
    belief_.structural_update_all(cfg_.hyper.asleep_c);
    trials_since_su_ = 0;
  }

  const std::set<std::string> domain(reward_.domain.begin(), reward_.domain.end());
  double c_retry = cfg_.hyper.asleep_c;
  for (int attempt = 0;; ++attempt) {
    auto out = estimate_structure(belief_, vocab_, delta_, domain, rng_);
    if (auto* edges = std::get_if<StructureEdges>(&out)) {
      parents_ = std::move(edges->parents);
      break;
    }
    if (const auto* orphans = std::get_if<UnknownEffects>(&out)) {
      pending_ = AskWhichEffect{orphans->variables.front()};
      return;
    }
    if (attempt > 1000) throw std::logic_error("structure search failed to terminate");
    // Pruning was too eager to admit any covering structure: lower the
    // threshold and rebuild the lattices.
    c_retry *= 0.1;
    belief_.structural_update_all(c_retry);
    trials_since_su_ = 0;
  }

  rebuild_model();

  if (check_consistency_) {
    auto problems = validate(dn_);
    if (!problems.empty())
      throw std::logic_error("revised network invalid: " + problems.front());
    if (!satisfies(dn_, delta_))
      throw std::logic_error("revised network violates the accumulated description");
  }
}

void LearnerAgent::baseline_observe(const Trial& view) {
  const Assignment state = view.full_state();
  for (auto& [var, table] : counts_) {
    const auto& ps = parents_.at(var);
    std::size_t cfg = 0;
    for (std::size_t k = 0; k < ps.size(); ++k)
      if (state.at(ps[k])) cfg |= std::size_t{1} << k;
    ++table[cfg][state.at(var) ? 1 : 0];
  }
  if (!reward_stuck_) {
    auto res = reward_solver_.update(delta_);
    if (const auto* est = std::get_if<RewardEstimate>(&res))
      reward_ = *est;
    else
      reward_stuck_ = true;  // conflicting rewards are evidence against dn0; ignored
  }
  rebuild_model();
}

void LearnerAgent::rebuild_model() {
  DecisionNetwork dn;
  for (const auto& a : vocab_.actions) dn.add_variable(a, VariableKind::Action);
  for (const auto& b : vocab_.before) dn.add_variable(b, VariableKind::Before);
  for (const auto& o : vocab_.outcomes) dn.add_variable(o, VariableKind::Outcome);
  for (const auto& v : vocab_.chance()) {
    auto it = parents_.find(v);
    const std::vector<std::string> ps =
        it != parents_.end() ? it->second : std::vector<std::string>{};
    dn.set_parents(v, ps);
    std::vector<double> theta;
    if (cfg_.baseline) {
      const auto& table = counts_.at(v);
      theta.resize(table.size());
      const double a0 = cfg_.hyper.alpha0;
      for (std::size_t cfg = 0; cfg < table.size(); ++cfg)
        theta[cfg] = (table[cfg][1] + a0) / (table[cfg][0] + table[cfg][1] + 2 * a0);
    } else {
      theta = belief_.estimate_theta(v, ps);
    }
    dn.set_cpt(v, theta);
  }
  dn.set_reward(reward_.domain, reward_.table);
  dn_ = std::move(dn);
}

PolicyErrorEvaluator::PolicyErrorEvaluator(DecisionNetwork dn_plus) : dn_(std::move(dn_plus)) {
  auto bnames = dn_.names_of_kind(VariableKind::Before);
  const std::set<std::string> bset(bnames.begin(), bnames.end());
  Distribution dist = marginal(dn_, bset, Assignment{});
  const std::size_t nb = dist.variables.size();
  for (std::size_t code = 0; code < dist.probabilities.size(); ++code) {
    Assignment b;
    for (std::size_t k = 0; k < nb; ++k) b.set(dist.variables[k], ((code >> k) & 1u) != 0);
    befores_.push_back(std::move(b));
    prior_.push_back(dist.probabilities[code]);
  }
  opt_eu_.assign(befores_.size(), 0.0);
  for (std::size_t i = 0; i < befores_.size(); ++i) {
    if (prior_[i] <= 0.0) continue;
    opt_eu_[i] = expected_utility(dn_, optimal_action(dn_, befores_[i]), befores_[i]);
  }
}

double PolicyErrorEvaluator::evaluate(const DecisionNetwork& dn_agent) {
  std::set<std::string> agent_b;
  for (const auto& v : dn_agent.variables())
    if (v.kind == VariableKind::Before) agent_b.insert(v.name);
  std::map<Assignment, Assignment> chosen;  // agent's view -> its greedy action
  double total = 0.0;
  for (std::size_t i = 0; i < befores_.size(); ++i) {
    if (prior_[i] <= 0.0) continue;
    Assignment view = befores_[i].restricted_to(agent_b);
    auto it = chosen.find(view);
    if (it == chosen.end()) it = chosen.emplace(view, optimal_action(dn_agent, view)).first;
    const double eu = expected_utility(dn_, total_action(dn_, it->second), befores_[i]);
    total += prior_[i] * (opt_eu_[i] - eu);
  }
  return total;
}

std::vector<MetricsRow> run_simulation(const DecisionNetwork& dn_plus,
                                       const DecisionNetwork* initial_model,
                                       const ExperimentConfig& cfg) {
  {
    auto problems = validate(dn_plus);
    if (!problems.empty())
      throw std::invalid_argument("true network invalid: " + problems.front());
  }
  if (cfg.steps < 1 || cfg.runs < 1) throw std::invalid_argument("steps and runs must be positive");

  PolicyErrorEvaluator evaluator(dn_plus);
  std::vector<MetricsRow> rows;

  for (int run = 0; run < cfg.runs; ++run) {
    std::mt19937_64 env_rng(mix_seed(cfg.seed, run, 1));
    const std::uint64_t agent_seed = mix_seed(cfg.seed, run, 2);
    const std::uint64_t expert_seed = mix_seed(cfg.seed, run, 3);

    const PartialDescription delta0 = cfg.agent.full_vocabulary ? full_description(dn_plus)
                                      : initial_model           ? initial_description(*initial_model)
                                                                : minimal_description(dn_plus);
    std::optional<LearnerAgent> agent;
    if (cfg.agent.baseline) {
      DecisionNetwork frozen;
      if (initial_model) {
        frozen = *initial_model;
      } else {
        // Freeze whatever a default agent would first build from delta0.
        LearnerAgent seedling(AgentConfig::for_variant(AgentVariant::Default), delta0, agent_seed);
        frozen = seedling.model();
      }
      agent.emplace(cfg.agent, delta0, std::move(frozen), agent_seed);
    } else {
      agent.emplace(cfg.agent, delta0, agent_seed);
    }
    agent->set_consistency_checks(cfg.check_consistency);

    std::optional<Expert> expert;
    if (!cfg.agent.baseline) {
      expert.emplace(dn_plus, cfg.expert_beta, cfg.expert_gamma, expert_seed);
      expert->observe_initial_description(delta0);
    }

    double cum = 0.0;
    bool truncated = false;
    for (int step = 1; step <= cfg.steps && !truncated; ++step) {
      const auto t0 = std::chrono::steady_clock::now();
      MetricsRow row;
      row.run = run;
      row.step = step;
      try {
        if (expert && agent->pending_question()) {
          const Question q = *agent->pending_question();
          const Answer ans = expert->answer(q);
          if (cfg.transcript) {
            *cfg.transcript << "[" << run << ":" << step << "] learner asks: " << question_text(q)
                            << "\n[" << run << ":" << step << "] expert: " << answer_text(ans)
                            << "\n";
          }
          agent->observe_answer(ans);
          row.event = "answer";
        } else if (expert) {
          if (auto sig = expert->maybe_advise(step)) {
            if (cfg.transcript) {
              *cfg.transcript << "[" << run << ":" << step << "] expert advises: prefer "
                              << assignment_text(sig->preferred) << " over "
                              << assignment_text(sig->taken) << " (trial " << sig->trial_step
                              << ", reward " << fmt_double(sig->reward) << ")\n";
            }
            agent->observe_advice(*sig);
            row.event = "advice";
          }
        }
        if (row.event.empty()) {
          const Assignment b_full = sample_before(dn_plus, env_rng);
          const Assignment view_b = b_full.restricted_to(agent->vocabulary().before);
          const Assignment a_view = agent->choose_action(view_b);
          const Assignment a_full = total_action(dn_plus, a_view);
          const Assignment o_full = sample_outcome(dn_plus, b_full, a_full, env_rng);
          Trial full{b_full, a_full, o_full, 0.0};
          full.reward = reward_of(dn_plus, full.full_state());
          const Trial view{view_b, a_view, o_full.restricted_to(agent->vocabulary().outcomes),
                           full.reward};
          if (expert) expert->observe_trial(step, full);
          agent->observe_trial(step, view);
          row.event = "trial";
          row.reward = full.reward;
          cum += full.reward;
        }
      } catch (const BudgetExceeded&) {
        // The run ends here; the last complete model carries the final metrics.
        truncated = true;
        row.event = "truncated";
        row.reward = 0.0;
      }
      agent->decay_epsilon();
      row.cum_reward = cum;
      row.n_vars = static_cast<int>(agent->vocabulary().all().size());
      row.n_lattice_nodes = agent->lattice_nodes();
      if (cfg.pe_period > 0 && (truncated || step % cfg.pe_period == 0))
        row.policy_error = evaluator.evaluate(agent->model());
      if (cfg.timing) {
        row.ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                     std::chrono::steady_clock::now() - t0)
                     .count();
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

void emit_metrics(const std::vector<MetricsRow>& rows, std::ostream& out) {
  out << "run,step,event,reward,cum_reward,policy_error,n_vars,n_lattice_nodes,ms\n";
  for (const auto& r : rows) {
    out << r.run << ',' << r.step << ',' << r.event << ',' << fmt_double(r.reward) << ','
        << fmt_double(r.cum_reward) << ',' << (r.policy_error ? fmt_double(*r.policy_error) : "")
        << ',' << r.n_vars << ',' << r.n_lattice_nodes << ',' << r.ms << '\n';
  }
}

}  // namespace dnlearn
