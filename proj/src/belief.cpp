#include "dnlearn/belief.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "dnlearn/inference.hpp"

namespace dnlearn {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kAlphaFloor = 1e-9;

std::string join_names(const std::vector<std::string>& names) {
  std::string out;
  for (const auto& n : names) {
    out += n;
    out += ',';
  }
  return out;
}

/// Copy of a network where action variables become evidence-free chance roots
/// with probability 1/2, so joint queries need no action evidence.
DecisionNetwork uniform_action_copy(const DecisionNetwork& dn) {
  DecisionNetwork out;
  for (const auto& v : dn.variables())
    out.add_variable(v.name, v.kind == VariableKind::Action ? VariableKind::Before : v.kind);
  for (int i = 0; i < dn.num_variables(); ++i) {
    const auto& v = dn.variable(i);
    if (v.kind == VariableKind::Action) {
      out.set_parents(v.name, {});
      out.set_cpt(v.name, {0.5});
    } else {
      out.set_parents(v.name, dn.parents_of(v.name));
      out.set_cpt(v.name, dn.cpt_of(i));
    }
  }
  out.set_reward(dn.reward_domain(), dn.reward_table());
  return out;
}

}  // namespace

BeliefState BeliefState::initial(const Vocabulary& vocab, const PartialDescription& delta,
                                 const HyperParams& hyper) {
  BeliefState st;
  st.hyper_ = hyper;
  st.vocab_ = vocab;
  st.alphas_.flat = hyper.alpha0;
  st.alphas_.k_equiv = hyper.k_equiv;
  st.build_universe(vocab);
  st.build_candidates(vocab);
  for (auto& [var, vb] : st.beliefs_) vb.required = delta.required_parents(var);
  st.build_product_priors(vocab, delta);
  st.structural_update_all(hyper.asleep_c);
  return st;
}

void BeliefState::build_universe(const Vocabulary& vocab) {
  universe_.clear();
  universe_index_.clear();
  for (const auto& n : vocab.all()) universe_.push_back(n);
  std::sort(universe_.begin(), universe_.end());
  if (universe_.size() > 32) throw BudgetExceeded("vocabulary exceeds 32 variables");
  for (std::size_t i = 0; i < universe_.size(); ++i)
    universe_index_[universe_[i]] = static_cast<int>(i);
}

void BeliefState::build_candidates(const Vocabulary& vocab) {
  std::map<std::string, VarBelief> fresh;
  for (const auto& v : vocab.chance()) {
    VarBelief vb;
    vb.self = universe_index_.at(v);
    vb.is_outcome = vocab.outcomes.count(v) > 0;
    for (std::size_t i = 0; i < universe_.size(); ++i) {
      const auto& c = universe_[i];
      if (c == v) continue;
      // Before variables may only have before parents; outcomes take any kind.
      if (!vb.is_outcome && vocab.before.count(c) == 0) continue;
      vb.candidates.push_back(static_cast<int>(i));
    }
    if (vb.candidates.size() > 63)
      throw BudgetExceeded("candidate parent list exceeds 63 variables");
    fresh.emplace(v, std::move(vb));
  }
  beliefs_ = std::move(fresh);
}

void BeliefState::build_product_priors(const Vocabulary& /*vocab*/,
                                       const PartialDescription& /*delta*/) {
  priors_.clear();
  for (const auto& [var, vb] : beliefs_) {
    PriorSource src;
    src.edge_prob.assign(vb.candidates.size(), hyper_.rho);
    priors_.emplace(var, std::move(src));
  }
}

std::size_t BeliefState::total_lattice_nodes() const {
  std::size_t n = 0;
  for (const auto& [var, vb] : beliefs_) n += vb.nodes.size();
  return n;
}

std::vector<std::string> BeliefState::tracked_variables() const {
  std::vector<std::string> out;
  for (const auto& [var, vb] : beliefs_) out.push_back(var);
  return out;
}

std::vector<std::string> BeliefState::mask_names(const VarBelief& vb, std::uint64_t mask) const {
  std::vector<std::string> out;
  for (std::size_t k = 0; k < vb.candidates.size(); ++k)
    if (mask >> k & 1) out.push_back(universe_[vb.candidates[k]]);
  return out;
}

double BeliefState::log_prior(const std::string& var, const VarBelief& vb,
                              std::uint64_t mask) const {
  const PriorSource& src = priors_.at(var);
  if (!src.expansion) {
    double lp = 0.0;
    for (std::size_t k = 0; k < vb.candidates.size(); ++k) {
      double e = src.edge_prob[k];
      if (mask >> k & 1)
        lp += e > 0 ? std::log(e) : kNegInf;
      else
        lp += e < 1 ? std::log1p(-e) : kNegInf;
    }
    return lp;
  }
  const auto& ex = *src.expansion;
  std::uint64_t old_mask = 0;
  for (std::size_t k = 0; k < vb.candidates.size(); ++k) {
    if (!(mask >> k & 1)) continue;
    int old_pos = ex.new_to_old[k];
    if (old_pos >= 0) old_mask |= std::uint64_t{1} << old_pos;
  }
  double lp;
  auto it = ex.old_member_prob.find(old_mask);
  if (it != ex.old_member_prob.end())
    lp = it->second > 0 ? std::log(it->second) : kNegInf;
  else if (ex.old_has_unexplored)
    lp = ex.old_unexplored_log;
  else
    lp = kNegInf;  // old lattice covered the whole powerset
  if (ex.z_pos >= 0) {
    bool has_z = mask >> ex.z_pos & 1;
    lp += has_z ? std::log(ex.rho) : std::log1p(-ex.rho);
  }
  return lp;
}

std::vector<std::array<double, 2>> BeliefState::alpha_table(
    const std::string& var, const std::vector<std::string>& parents) const {
  auto key = std::make_pair(var, join_names(parents));
  auto hit = alpha_cache_.find(key);
  if (hit != alpha_cache_.end()) return hit->second;

  std::size_t n_cfg = std::size_t{1} << parents.size();
  std::vector<std::array<double, 2>> table(n_cfg);
  if (!alphas_.snapshot) {
    for (auto& row : table) row = {alphas_.flat, alphas_.flat};
  } else {
    const DecisionNetwork& snap = *alphas_.snapshot;
    double K = alphas_.k_equiv;
    bool involves_new = !snap.has_variable(var);
    for (const auto& p : parents)
      if (!snap.has_variable(p)) involves_new = true;
    if (involves_new) {
      // Tables touching the brand-new variable carry no transferable
      // knowledge: a flat equivalent sample of K * 1/2.
      for (auto& row : table) row = {K * 0.5, K * 0.5};
    } else {
      std::set<std::string> targets(parents.begin(), parents.end());
      targets.insert(var);
      Distribution joint = marginal(snap, targets, Assignment{});
      for (std::size_t cfg = 0; cfg < n_cfg; ++cfg) {
        Assignment q;
        for (std::size_t k = 0; k < parents.size(); ++k) q.set(parents[k], (cfg >> k & 1) != 0);
        for (int value = 0; value < 2; ++value) {
          Assignment full = q;
          full.set(var, value == 1);
          table[cfg][value] = std::max(K * joint.probability_of(full), kAlphaFloor);
        }
      }
    }
  }
  alpha_cache_.emplace(key, table);
  return table;
}

std::uint32_t BeliefState::trial_bits(const Trial& t) const {
  Assignment full = t.full_state();
  std::uint32_t bits = 0;
  for (std::size_t i = 0; i < universe_.size(); ++i) {
    auto v = full.get(universe_[i]);
    if (!v) throw std::runtime_error("trial does not assign variable " + universe_[i]);
    if (*v) bits |= std::uint32_t{1} << i;
  }
  return bits;
}

BeliefState::CountTable BeliefState::count_table(const VarBelief& vb, std::uint64_t mask) const {
  CountTable counts;
  for (std::uint32_t bits : trials_) {
    std::uint32_t cfg = 0;
    int out_bit = 0;
    for (std::size_t k = 0; k < vb.candidates.size(); ++k) {
      if (!(mask >> k & 1)) continue;
      if (bits >> vb.candidates[k] & 1) cfg |= std::uint32_t{1} << out_bit;
      ++out_bit;
    }
    ++counts[cfg][bits >> vb.self & 1];
  }
  return counts;
}

void BeliefState::parameter_update_trial(const Trial& t) {
  std::uint32_t bits = trial_bits(t);
  trials_.push_back(bits);
  for (auto& [var, vb] : beliefs_) {
    int vi = universe_index_.at(var);
    int value = bits >> vi & 1;
    for (auto& [mask, node] : vb.nodes) {
      std::uint32_t cfg = 0;
      int out_bit = 0;
      for (std::size_t k = 0; k < vb.candidates.size(); ++k) {
        if (!(mask >> k & 1)) continue;
        if (bits >> vb.candidates[k] & 1) cfg |= std::uint32_t{1} << out_bit;
        ++out_bit;
      }
      auto& cell = node.counts[cfg];
      ++cell[value];
      if (node.log_weight == kNegInf) continue;
      auto alphas = alpha_table(var, mask_names(vb, mask));
      const auto& a = alphas[cfg];
      double num = cell[value] + a[value] - 1.0;
      double den = cell[0] + cell[1] + a[0] + a[1] - 1.0;
      node.log_weight += std::log(num / den);
    }
  }
}

ExpertUpdateOutcome BeliefState::parameter_update_expert(const std::string& var,
                                                         const std::set<std::string>& parents) {
  auto it = beliefs_.find(var);
  if (it == beliefs_.end()) throw std::runtime_error("no belief tracked for " + var);
  VarBelief& vb = it->second;
  vb.required.insert(parents.begin(), parents.end());
  std::uint64_t req_mask = 0;
  for (const auto& p : vb.required) {
    auto ui = universe_index_.find(p);
    bool found = false;
    if (ui != universe_index_.end()) {
      for (std::size_t k = 0; k < vb.candidates.size(); ++k) {
        if (vb.candidates[k] == ui->second) {
          req_mask |= std::uint64_t{1} << k;
          found = true;
          break;
        }
      }
    }
    if (!found) throw std::runtime_error("required parent " + p + " is not a candidate for " + var);
  }
  bool any_alive = false;
  for (auto& [mask, node] : vb.nodes) {
    if ((mask & req_mask) != req_mask) node.log_weight = kNegInf;
    if (node.log_weight != kNegInf) any_alive = true;
  }
  return any_alive ? ExpertUpdateOutcome::Ok : ExpertUpdateOutcome::AllZero;
}

double BeliefState::log_marginal_likelihood(const std::string& var, const VarBelief& vb,
                                            std::uint64_t mask) const {
  // Closed-form Dirichlet evidence: prod_j Beta(n_j + a_j) / Beta(a_j);
  // unobserved configurations contribute a factor of one.
  CountTable counts = count_table(vb, mask);
  if (counts.empty()) return 0.0;
  auto alphas = alpha_table(var, mask_names(vb, mask));
  double lml = 0.0;
  for (const auto& [cfg, cell] : counts) {
    const auto& a = alphas[cfg];
    double n = cell[0] + cell[1];
    lml += std::lgamma(a[0] + a[1]) - std::lgamma(n + a[0] + a[1]);
    lml += std::lgamma(cell[0] + a[0]) - std::lgamma(a[0]);
    lml += std::lgamma(cell[1] + a[1]) - std::lgamma(a[1]);
  }
  return lml;
}

void BeliefState::structural_update(const std::string& var, double asleep_c) {
  auto it = beliefs_.find(var);
  if (it == beliefs_.end()) throw std::runtime_error("no belief tracked for " + var);
  VarBelief& vb = it->second;
  double log_c = asleep_c > 0 ? std::log(asleep_c) : kNegInf;

  std::uint64_t req_mask = 0;
  for (const auto& p : vb.required) {
    auto ui = universe_index_.find(p);
    bool found = false;
    if (ui != universe_index_.end()) {
      for (std::size_t k = 0; k < vb.candidates.size(); ++k) {
        if (vb.candidates[k] == ui->second) {
          req_mask |= std::uint64_t{1} << k;
          found = true;
          break;
        }
      }
    }
    if (!found) throw std::runtime_error("required parent " + p + " is not a candidate for " + var);
  }

  // Minimal description-valid roots: the required parents, with one
  // action-or-outcome member added for an outcome variable that lacks one.
  std::vector<std::uint64_t> roots;
  bool req_has_ao = false;
  for (std::size_t k = 0; k < vb.candidates.size(); ++k) {
    if (!(req_mask >> k & 1)) continue;
    const auto& name = universe_[vb.candidates[k]];
    if (vocab_.before.count(name) == 0) req_has_ao = true;
  }
  if (vb.is_outcome && !req_has_ao) {
    for (std::size_t k = 0; k < vb.candidates.size(); ++k) {
      const auto& name = universe_[vb.candidates[k]];
      if (vocab_.before.count(name) > 0) continue;
      roots.push_back(req_mask | (std::uint64_t{1} << k));
    }
    if (roots.empty()) throw std::runtime_error("outcome " + var + " has no action-or-outcome candidate");
  } else {
    roots.push_back(req_mask);
  }

  std::size_t other_nodes = total_lattice_nodes() - vb.nodes.size();
  std::map<std::uint64_t, Node> fresh;
  std::deque<std::uint64_t> pending;
  double best = kNegInf;
  auto add_node = [&](std::uint64_t mask) {
    if (fresh.count(mask)) return;
    if (other_nodes + fresh.size() >= hyper_.max_lattice_nodes)
      throw BudgetExceeded("lattice node budget exceeded");
    Node node;
    double score = log_prior(var, vb, mask) + log_marginal_likelihood(var, vb, mask);
    if ((mask & req_mask) != req_mask) score = kNegInf;
    node.log_weight = score;
    fresh.emplace(mask, std::move(node));
    pending.push_back(mask);
    best = std::max(best, score);
  };
  for (std::uint64_t r : roots) add_node(r);
  while (!pending.empty()) {
    std::uint64_t m = pending.front();
    pending.pop_front();
    if (fresh.at(m).log_weight < best + log_c) continue;  // asleep; best only grows
    for (std::size_t k = 0; k < vb.candidates.size(); ++k) {
      if (m >> k & 1) continue;
      add_node(m | (std::uint64_t{1} << k));
    }
  }

  // Members: alive nodes plus every generated subset of an alive node.
  std::vector<std::uint64_t> alive;
  for (const auto& [mask, node] : fresh)
    if (node.log_weight >= best + log_c) alive.push_back(mask);
  std::map<std::uint64_t, Node> retained;
  for (auto& [mask, node] : fresh) {
    bool member = false;
    for (std::uint64_t a : alive) {
      if ((mask & a) == mask) {
        member = true;
        break;
      }
    }
    if (!member) continue;
    node.counts = count_table(vb, mask);
    retained.emplace(mask, std::move(node));
  }
  vb.nodes = std::move(retained);
}

void BeliefState::structural_update_all(double asleep_c) {
  for (auto& [var, vb] : beliefs_) structural_update(var, asleep_c);
}

std::map<std::set<std::string>, double> BeliefState::member_probabilities(
    const std::string& var) const {
  auto it = beliefs_.find(var);
  if (it == beliefs_.end()) throw std::runtime_error("no belief tracked for " + var);
  const VarBelief& vb = it->second;
  double max_lw = kNegInf;
  for (const auto& [mask, node] : vb.nodes) max_lw = std::max(max_lw, node.log_weight);
  std::map<std::set<std::string>, double> out;
  double total = 0.0;
  std::vector<std::pair<std::uint64_t, double>> weights;
  for (const auto& [mask, node] : vb.nodes) {
    double w = node.log_weight == kNegInf ? 0.0 : std::exp(node.log_weight - max_lw);
    weights.emplace_back(mask, w);
    total += w;
  }
  for (const auto& [mask, w] : weights) {
    auto names = mask_names(vb, mask);
    out[std::set<std::string>(names.begin(), names.end())] = total > 0 ? w / total : 0.0;
  }
  return out;
}

double BeliefState::full_set_probability(const std::string& var,
                                         const std::set<std::string>& parent_set) const {
  auto it = beliefs_.find(var);
  if (it == beliefs_.end()) throw std::runtime_error("no belief tracked for " + var);
  const VarBelief& vb = it->second;
  std::uint64_t mask = 0;
  for (const auto& p : parent_set) {
    auto ui = universe_index_.find(p);
    bool found = false;
    if (ui != universe_index_.end()) {
      for (std::size_t k = 0; k < vb.candidates.size(); ++k) {
        if (vb.candidates[k] == ui->second) {
          mask |= std::uint64_t{1} << k;
          found = true;
          break;
        }
      }
    }
    if (!found) {
      // Type-forbidden parents are never lattice members; such sets only
      // carry a share of the unexplored mass.
      mask = std::numeric_limits<std::uint64_t>::max();
      break;
    }
  }
  // The unexplored mass is split over all subsets of the other variables,
  // regardless of kind constraints.
  std::size_t n_sets = universe_.size() >= 64 ? std::numeric_limits<std::size_t>::max()
                                              : (std::size_t{1} << (universe_.size() - 1));
  bool full_cover = vb.nodes.size() >= n_sets;
  double p = full_cover ? 0.0 : hyper_.unexplored;
  auto node = vb.nodes.find(mask);
  if (node == vb.nodes.end()) {
    if (full_cover) return 0.0;
    return p / static_cast<double>(n_sets - vb.nodes.size());
  }
  double max_lw = kNegInf;
  for (const auto& [m, nd] : vb.nodes) max_lw = std::max(max_lw, nd.log_weight);
  double total = 0.0;
  for (const auto& [m, nd] : vb.nodes)
    total += nd.log_weight == kNegInf ? 0.0 : std::exp(nd.log_weight - max_lw);
  double cond =
      node->second.log_weight == kNegInf || total <= 0
          ? 0.0
          : std::exp(node->second.log_weight - max_lw) / total;
  return (1.0 - p) * cond;
}

std::map<std::string, double> BeliefState::containment_probabilities(
    const std::string& var) const {
  auto it = beliefs_.find(var);
  if (it == beliefs_.end()) throw std::runtime_error("no belief tracked for " + var);
  const VarBelief& vb = it->second;
  double max_lw = kNegInf;
  for (const auto& [mask, node] : vb.nodes) max_lw = std::max(max_lw, node.log_weight);
  double total = 0.0;
  std::vector<double> per_candidate(vb.candidates.size(), 0.0);
  for (const auto& [mask, node] : vb.nodes) {
    double w = node.log_weight == kNegInf ? 0.0 : std::exp(node.log_weight - max_lw);
    total += w;
    for (std::size_t k = 0; k < vb.candidates.size(); ++k)
      if (mask >> k & 1) per_candidate[k] += w;
  }
  std::map<std::string, double> out;
  for (std::size_t k = 0; k < vb.candidates.size(); ++k)
    out[universe_[vb.candidates[k]]] = total > 0 ? per_candidate[k] / total : 0.0;
  return out;
}

void BeliefState::extend_vocabulary(const std::string& new_var, const Vocabulary& vocab_new,
                                    const PartialDescription& delta,
                                    const DecisionNetwork& dn_snapshot) {
  // Capture the old posteriors before any bookkeeping changes.
  struct OldView {
    std::map<std::uint64_t, double> member_prob;
    double unexplored_log = 0.0;
    bool has_unexplored = false;
    std::vector<std::string> candidate_names;
  };
  std::map<std::string, OldView> old_views;
  for (const auto& [var, vb] : beliefs_) {
    OldView view;
    for (int ci : vb.candidates) view.candidate_names.push_back(universe_[ci]);
    std::size_t n_sets = universe_.size() >= 64 ? std::numeric_limits<std::size_t>::max()
                                                : (std::size_t{1} << (universe_.size() - 1));
    bool full_cover = vb.nodes.size() >= n_sets;
    double p = full_cover ? 0.0 : hyper_.unexplored;
    double max_lw = kNegInf;
    for (const auto& [m, nd] : vb.nodes) max_lw = std::max(max_lw, nd.log_weight);
    double total = 0.0;
    for (const auto& [m, nd] : vb.nodes)
      total += nd.log_weight == kNegInf ? 0.0 : std::exp(nd.log_weight - max_lw);
    for (const auto& [m, nd] : vb.nodes) {
      double cond = nd.log_weight == kNegInf || total <= 0
                        ? 0.0
                        : std::exp(nd.log_weight - max_lw) / total;
      view.member_prob[m] = (1.0 - p) * cond;
    }
    view.has_unexplored = !full_cover;
    if (!full_cover)
      view.unexplored_log =
          std::log(p) - std::log(static_cast<double>(n_sets - vb.nodes.size()));
    old_views.emplace(var, std::move(view));
  }

  vocab_ = vocab_new;
  build_universe(vocab_new);
  build_candidates(vocab_new);
  priors_.clear();
  for (auto& [var, vb] : beliefs_) {
    vb.required = delta.required_parents(var);
    PriorSource src;
    auto old_it = old_views.find(var);
    if (old_it == old_views.end()) {
      // The new variable itself: fresh product prior.
      src.edge_prob.assign(vb.candidates.size(), hyper_.rho);
    } else {
      const OldView& view = old_it->second;
      PriorSource::Expansion ex;
      ex.old_member_prob = view.member_prob;
      ex.old_unexplored_log = view.unexplored_log;
      ex.old_has_unexplored = view.has_unexplored;
      ex.rho = hyper_.rho;
      ex.new_to_old.assign(vb.candidates.size(), -1);
      ex.z_pos = -1;
      for (std::size_t k = 0; k < vb.candidates.size(); ++k) {
        const auto& name = universe_[vb.candidates[k]];
        if (name == new_var) {
          ex.z_pos = static_cast<int>(k);
          continue;
        }
        auto pos = std::find(view.candidate_names.begin(), view.candidate_names.end(), name);
        if (pos == view.candidate_names.end())
          throw std::runtime_error("candidate " + name + " missing from previous epoch");
        ex.new_to_old[k] = static_cast<int>(pos - view.candidate_names.begin());
      }
      src.expansion = std::move(ex);
    }
    priors_.emplace(var, std::move(src));
  }
  alphas_.snapshot = std::make_shared<DecisionNetwork>(uniform_action_copy(dn_snapshot));
  alphas_.new_var = new_var;
  alpha_cache_.clear();
  trials_.clear();
}

void BeliefState::reset_vocabulary(const Vocabulary& vocab_new, const PartialDescription& delta) {
  vocab_ = vocab_new;
  build_universe(vocab_new);
  build_candidates(vocab_new);
  for (auto& [var, vb] : beliefs_) vb.required = delta.required_parents(var);
  build_product_priors(vocab_new, delta);
  alphas_.snapshot.reset();
  alphas_.new_var.clear();
  alpha_cache_.clear();
  trials_.clear();
}

std::vector<double> BeliefState::estimate_theta(const std::string& var,
                                                const std::vector<std::string>& parents) const {
  int vi = universe_index_.at(var);
  std::vector<int> parent_idx;
  for (const auto& p : parents) parent_idx.push_back(universe_index_.at(p));
  std::size_t n_cfg = std::size_t{1} << parents.size();
  std::vector<std::array<std::uint32_t, 2>> counts(n_cfg, {0, 0});
  for (std::uint32_t bits : trials_) {
    std::uint32_t cfg = 0;
    for (std::size_t k = 0; k < parent_idx.size(); ++k)
      if (bits >> parent_idx[k] & 1) cfg |= std::uint32_t{1} << k;
    ++counts[cfg][bits >> vi & 1];
  }
  auto alphas = alpha_table(var, parents);
  std::vector<double> theta(n_cfg);
  for (std::size_t cfg = 0; cfg < n_cfg; ++cfg) {
    const auto& a = alphas[cfg];
    double n = counts[cfg][0] + counts[cfg][1];
    theta[cfg] = (counts[cfg][1] + a[1]) / (n + a[0] + a[1]);
  }
  return theta;
}

const std::set<std::string>& BeliefState::required_parents(const std::string& var) const {
  return beliefs_.at(var).required;
}

bool BeliefState::appears_in_some_member(const std::string& var) const {
  auto ui = universe_index_.find(var);
  if (ui == universe_index_.end()) return false;
  for (const auto& [child, vb] : beliefs_) {
    int pos = -1;
    for (std::size_t k = 0; k < vb.candidates.size(); ++k)
      if (vb.candidates[k] == ui->second) pos = static_cast<int>(k);
    if (pos < 0) continue;
    for (const auto& [mask, node] : vb.nodes)
      if (mask >> pos & 1) return true;
  }
  return false;
}

}  // namespace dnlearn
