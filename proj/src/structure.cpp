#include "dnlearn/structure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dnlearn {

namespace {

enum class Kind { Action, Before, Outcome };

Kind kind_of(const Vocabulary& vocab, const std::string& name) {
  if (vocab.actions.count(name)) return Kind::Action;
  if (vocab.before.count(name)) return Kind::Before;
  if (vocab.outcomes.count(name)) return Kind::Outcome;
  throw std::runtime_error("variable " + name + " not in vocabulary");
}

/// parent -> set of transitive required descendants.
std::map<std::string, std::set<std::string>> required_closure(const RequiredEdges& required) {
  std::map<std::string, std::set<std::string>> children;
  for (const auto& [p, c] : required) children[p].insert(c);
  std::map<std::string, std::set<std::string>> closed;
  for (const auto& [p, cs] : children) {
    std::vector<std::string> stack(cs.begin(), cs.end());
    auto& out = closed[p];
    while (!stack.empty()) {
      std::string cur = stack.back();
      stack.pop_back();
      if (!out.insert(cur).second) continue;
      auto it = children.find(cur);
      if (it != children.end())
        for (const auto& nxt : it->second) stack.push_back(nxt);
    }
  }
  return closed;
}

}  // namespace

RequiredEdges required_edges(const PartialDescription& delta, const Vocabulary& vocab) {
  RequiredEdges out;
  for (const auto& child : vocab.chance())
    for (const auto& parent : delta.required_parents(child)) out.emplace(parent, child);
  return out;
}

int check_order(const std::vector<std::string>& order, const Vocabulary& vocab,
                const RequiredEdges& required, const std::set<std::string>& reward_domain) {
  std::map<std::string, std::size_t> pos;
  for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = i;
  if (pos.size() != order.size() || order.size() != vocab.all().size())
    throw std::invalid_argument("order must list every vocabulary variable once");
  for (const auto& n : vocab.all())
    if (!pos.count(n)) throw std::invalid_argument("order must list every vocabulary variable once");

  for (const auto& [p, c] : required)
    if (pos.at(p) >= pos.at(c)) return 1;
  std::size_t n_actions = vocab.actions.size();
  for (std::size_t i = 0; i < order.size(); ++i) {
    bool is_action = kind_of(vocab, order[i]) == Kind::Action;
    if (is_action != (i < n_actions)) return 2;
  }
  if (!vocab.outcomes.empty() && vocab.actions.empty()) return 3;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (kind_of(vocab, order[i]) != Kind::Before) continue;
    for (std::size_t j = 0; j < i; ++j)
      if (kind_of(vocab, order[j]) == Kind::Outcome) return 4;
  }
  auto closure = required_closure(required);
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto& r = order[i];
    if (!reward_domain.count(r)) continue;
    Kind kr = kind_of(vocab, r);
    for (std::size_t j = i + 1; j < order.size(); ++j) {
      const auto& x = order[j];
      if (reward_domain.count(x) || kind_of(vocab, x) != kr) continue;
      // Reward-domain variable placed earlier: acceptable only when required
      // parenthoods force it below the later variable.
      auto cl = closure.find(r);
      if (cl == closure.end() || !cl->second.count(x)) return 5;
    }
  }
  return 0;
}

std::vector<std::string> random_valid_order(const Vocabulary& vocab, const RequiredEdges& required,
                                            const std::set<std::string>& reward_domain,
                                            std::mt19937_64& rng) {
  std::vector<std::string> order(vocab.actions.begin(), vocab.actions.end());
  std::shuffle(order.begin(), order.end(), rng);

  auto closure = required_closure(required);
  auto place_block = [&](const std::set<std::string>& block) {
    std::map<std::string, int> blockers;  // unplaced required parents within the block
    for (const auto& v : block) {
      int n = 0;
      for (const auto& [p, c] : required)
        if (c == v && block.count(p)) ++n;
      blockers[v] = n;
    }
    std::set<std::string> remaining = block;
    while (!remaining.empty()) {
      std::vector<std::string> avail;
      for (const auto& v : remaining)
        if (blockers[v] == 0) avail.push_back(v);
      if (avail.empty()) throw std::runtime_error("required parenthoods form a cycle");
      // Prefer non-reward variables; among reward variables prefer those some
      // blocked non-reward variable is waiting on.
      std::vector<std::string> preferred;
      for (const auto& v : avail)
        if (!reward_domain.count(v)) preferred.push_back(v);
      if (preferred.empty()) {
        for (const auto& v : avail) {
          auto cl = closure.find(v);
          if (cl == closure.end()) continue;
          for (const auto& d : cl->second) {
            if (remaining.count(d) && !reward_domain.count(d)) {
              preferred.push_back(v);
              break;
            }
          }
        }
      }
      if (preferred.empty()) preferred = avail;
      std::uniform_int_distribution<std::size_t> pick(0, preferred.size() - 1);
      const std::string chosen = preferred[pick(rng)];
      order.push_back(chosen);
      remaining.erase(chosen);
      for (const auto& [p, c] : required)
        if (p == chosen && remaining.count(c)) --blockers[c];
    }
  };
  place_block(vocab.before);
  place_block(vocab.outcomes);
  return order;
}

namespace {

std::map<std::pair<std::string, std::string>, double> mask_by_order(
    const std::map<std::string, std::map<std::string, double>>& containment,
    const std::vector<std::string>& order) {
  std::map<std::string, std::size_t> pos;
  for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = i;
  std::map<std::pair<std::string, std::string>, double> probs;
  for (const auto& [child, row] : containment) {
    for (const auto& [parent, p] : row) {
      if (pos.at(parent) < pos.at(child)) probs[{parent, child}] = p;
    }
  }
  return probs;
}

std::map<std::string, std::map<std::string, double>> containment_table(const BeliefState& beliefs,
                                                                       const Vocabulary& vocab) {
  std::map<std::string, std::map<std::string, double>> table;
  for (const auto& child : vocab.chance())
    table[child] = beliefs.containment_probabilities(child);
  return table;
}

}  // namespace

std::map<std::pair<std::string, std::string>, double> edge_probs(
    const BeliefState& beliefs, const Vocabulary& vocab, const std::vector<std::string>& order) {
  return mask_by_order(containment_table(beliefs, vocab), order);
}

SolveResult solve_structure(const std::map<std::pair<std::string, std::string>, double>& probs,
                            const Vocabulary& vocab, const std::set<std::string>& reward_domain,
                            const RequiredEdges& required) {
  std::vector<std::string> vars;
  for (const auto& v : vocab.all()) vars.push_back(v);
  std::sort(vars.begin(), vars.end());
  auto prob_of = [&](const std::string& y, const std::string& x) {
    auto it = probs.find({y, x});
    return it == probs.end() ? 0.0 : it->second;
  };

  // Relaxation optimum: threshold, then raise the most probable edge of each
  // violated covering constraint to one.  Zero-probability edges stay absent.
  std::map<std::pair<std::string, std::string>, double> star;
  for (const auto& y : vars)
    for (const auto& x : vars) {
      if (y == x) continue;
      double p = prob_of(y, x);
      if (required.count({y, x}))
        star[{y, x}] = 1.0;
      else if (p > 0.5)
        star[{y, x}] = 1.0;
    }
  for (const auto& x : vars) {  // child coverage for everything outside the reward domain
    if (reward_domain.count(x)) continue;
    bool covered = false;
    const std::string* best = nullptr;
    double best_p = 0.0;
    for (const auto& c : vars) {
      if (c == x) continue;
      if (star.count({x, c})) covered = true;
      double p = prob_of(x, c);
      if (p > best_p) {
        best_p = p;
        best = &c;
      }
    }
    if (covered) continue;
    if (!best) return StructureInfeasible{x};
    star[{x, *best}] = 1.0;
  }
  for (const auto& x : vars) {  // action-or-outcome parent for every outcome
    if (kind_of(vocab, x) != Kind::Outcome) continue;
    bool covered = false;
    const std::string* best = nullptr;
    double best_p = 0.0;
    for (const auto& y : vars) {
      if (y == x || kind_of(vocab, y) == Kind::Before) continue;
      if (star.count({y, x})) covered = true;
      double p = prob_of(y, x);
      if (p > best_p) {
        best_p = p;
        best = &y;
      }
    }
    if (covered) continue;
    if (!best) return StructureInfeasible{x};
    star[{*best, x}] = 1.0;
  }

  // Phase one of the rounding: threshold at 1/2, and grant each variable
  // needing a child its maximal edge (first by name among ties).
  std::set<std::pair<std::string, std::string>> edges;
  for (const auto& [pair, v] : star)
    if (v >= 0.5) edges.insert(pair);
  for (const auto& x : vars) {
    if (reward_domain.count(x)) continue;
    const std::string* best = nullptr;
    double best_star = -1.0;
    for (const auto& c : vars) {
      if (c == x) continue;
      auto it = star.find({x, c});
      double v = it == star.end() ? 0.0 : it->second;
      if (v > best_star && prob_of(x, c) > 0.0) {
        best_star = v;
        best = &c;
      }
    }
    if (best) edges.insert({x, *best});
  }
  // Phase two: orphaned outcomes take their most probable action-or-outcome
  // parent among positive-probability candidates.
  for (const auto& x : vars) {
    if (kind_of(vocab, x) != Kind::Outcome) continue;
    bool covered = false;
    for (const auto& y : vars)
      if (y != x && kind_of(vocab, y) != Kind::Before && edges.count({y, x})) covered = true;
    if (covered) continue;
    const std::string* best = nullptr;
    double best_p = 0.0;
    for (const auto& y : vars) {
      if (y == x || kind_of(vocab, y) == Kind::Before) continue;
      double p = prob_of(y, x);
      if (p > best_p) {
        best_p = p;
        best = &y;
      }
    }
    if (!best) return StructureInfeasible{x};
    edges.insert({*best, x});
  }

  StructureEdges result;
  for (const auto& x : vars) result.parents[x] = {};
  double objective = 0.0;
  for (const auto& y : vars) {
    for (const auto& x : vars) {
      if (y == x) continue;
      double p = prob_of(y, x);
      bool on = edges.count({y, x}) > 0;
      objective += on ? p : 1.0 - p;
      if (on) result.parents[x].push_back(y);
    }
  }
  result.objective = objective;
  return result;
}

EstimateOutcome estimate_structure(const BeliefState& beliefs, const Vocabulary& vocab,
                                   const PartialDescription& delta,
                                   const std::set<std::string>& reward_domain,
                                   std::mt19937_64& rng) {
  // Variables contained in no lattice member anywhere cannot be wired into a
  // valid structure; surface them instead of guessing.
  std::vector<std::string> orphans;
  for (const auto& v : vocab.all()) {
    if (reward_domain.count(v)) continue;
    if (!beliefs.appears_in_some_member(v)) orphans.push_back(v);
  }
  if (!orphans.empty()) {
    std::sort(orphans.begin(), orphans.end());
    return UnknownEffects{orphans};
  }

  RequiredEdges required = required_edges(delta, vocab);
  auto containment = containment_table(beliefs, vocab);
  std::vector<std::string> order = random_valid_order(vocab, required, reward_domain, rng);
  bool enforce_reward_late = check_order(order, vocab, required, reward_domain) == 0;

  auto evaluate = [&](const std::vector<std::string>& o) -> std::pair<double, SolveResult> {
    SolveResult r = solve_structure(mask_by_order(containment, o), vocab, reward_domain, required);
    double obj = std::holds_alternative<StructureEdges>(r)
                     ? std::get<StructureEdges>(r).objective
                     : -std::numeric_limits<double>::infinity();
    return {obj, std::move(r)};
  };

  auto [best_obj, best_result] = evaluate(order);
  for (;;) {
    bool moved = false;
    std::vector<std::string> best_neighbor;
    double neighbor_obj = best_obj;
    SolveResult neighbor_result = best_result;
    for (std::size_t i = 0; i + 1 < order.size(); ++i) {
      std::vector<std::string> cand = order;
      std::swap(cand[i], cand[i + 1]);
      int violated = check_order(cand, vocab, required, reward_domain);
      if (violated != 0 && (violated != 5 || enforce_reward_late)) continue;
      auto [obj, res] = evaluate(cand);
      if (obj > neighbor_obj) {
        neighbor_obj = obj;
        best_neighbor = std::move(cand);
        neighbor_result = std::move(res);
        moved = true;
      }
    }
    if (!moved) break;
    order = std::move(best_neighbor);
    best_obj = neighbor_obj;
    best_result = std::move(neighbor_result);
  }
  if (!std::holds_alternative<StructureEdges>(best_result)) return NoValidStructure{};
  return std::get<StructureEdges>(best_result);
}

}  // namespace dnlearn
