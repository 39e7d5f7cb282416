#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "dnlearn/reward.hpp"
#include "oracles.hpp"

using namespace dnlearn;

namespace {

StateExists exists_eq(std::initializer_list<std::pair<std::string, bool>> lits, double v) {
  return {Assignment(lits), RewardCmp{RewardCmp::Eq, v}};
}
StateExists exists_gt(std::initializer_list<std::pair<std::string, bool>> lits, double v) {
  return {Assignment(lits), RewardCmp{RewardCmp::Gt, v}};
}

PartialDescription describe(const std::vector<StateExists>& cs) {
  PartialDescription d;
  for (const auto& c : cs) d.conjoin(c);
  return d;
}

Vocabulary domain_only(std::set<std::string> domain) {
  Vocabulary v;
  v.outcomes = domain;
  v.reward_domain = std::move(domain);
  return v;
}

// Random constraint system over a small domain; collisions are frequent by
// design so a fair share of systems is unsatisfiable.
std::vector<StateExists> random_system(std::mt19937_64& rng, const std::vector<std::string>& pool,
                                       std::size_t n_domain, std::size_t n_constraints) {
  std::vector<StateExists> out;
  const double values[] = {0.0, 1.0, 2.0, 5.5};
  for (std::size_t i = 0; i < n_constraints; ++i) {
    Assignment lits;
    for (std::size_t k = 0; k < n_domain; ++k)
      switch (rng() % 3) {
        case 0: lits.set(pool[k], false); break;
        case 1: lits.set(pool[k], true); break;
        default: break;
      }
    const RewardCmp cmp{(rng() & 1) != 0u ? RewardCmp::Eq : RewardCmp::Gt, values[rng() % 4]};
    out.push_back({lits, cmp});
  }
  return out;
}

bool same_result(const RewardSolveResult& a, const oracles::RewardVerdict& b) {
  if (const auto* sol = std::get_if<RewardSolution>(&a))
    return b.solved && sol->equalities == b.equalities && sol->lower_bounds == b.lower_bounds &&
           sol->witnesses == b.witnesses;
  return !b.solved;
}

}  // namespace

TEST_CASE("estimate_vocabulary reads the membership conjuncts") {
  PartialDescription d;
  d.conjoin(Membership{"SoilType", SetKind::Before, {}});
  d.conjoin(Membership{"Grain", SetKind::Action, {}});
  d.conjoin(Membership{"Yield", SetKind::Outcome, {}});
  d.conjoin(Membership{"Protein", SetKind::Outcome, {}});
  d.conjoin(Membership{"Yield", SetKind::RewardDomain, {}});
  d.conjoin(Membership{"SoilType", SetKind::ParentsOf, "Yield"});
  d.conjoin(exists_eq({{"Yield", true}}, 15.0));

  const Vocabulary v = estimate_vocabulary(d);
  CHECK(v.before == std::set<std::string>{"SoilType"});
  CHECK(v.actions == std::set<std::string>{"Grain"});
  CHECK(v.outcomes == std::set<std::string>{"Protein", "Yield"});
  CHECK(v.reward_domain == std::set<std::string>{"Yield"});
  CHECK(v.chance() == std::set<std::string>{"Protein", "SoilType", "Yield"});
  CHECK(v.all() == std::set<std::string>{"Grain", "Protein", "SoilType", "Yield"});
}

TEST_CASE("a single pinned equality solves to that value and zero elsewhere") {
  const Vocabulary v = domain_only({"y"});
  const auto res = solve_reward(describe({exists_eq({{"y", true}}, 5.0)}), v);
  const auto& sol = std::get<RewardSolution>(res);
  CHECK(sol.domain == std::vector<std::string>{"y"});
  CHECK(sol.equalities == std::map<std::size_t, double>{{1, 5.0}});
  CHECK(sol.lower_bounds.empty());
  CHECK(sol.witnesses == std::vector<std::size_t>{1});
  CHECK(complete_reward(sol) == std::vector<double>{0.0, 5.0});
}

TEST_CASE("a strict bound completes to the bound plus the margin") {
  const Vocabulary v = domain_only({"y"});
  const auto res = solve_reward(describe({exists_gt({{"y", true}}, 7.0)}), v);
  const auto& sol = std::get<RewardSolution>(res);
  CHECK(sol.lower_bounds == std::map<std::size_t, double>{{1, 7.0}});
  CHECK(complete_reward(sol) == std::vector<double>{0.0, 7.1});
  CHECK(complete_reward(sol, 2.0) == std::vector<double>{0.0, 9.0});
}

TEST_CASE("unconstrained equalities take the lexicographically first open state") {
  // two all-free equalities over {y, z}: first claims (0,0), second (0,1),
  // which is canonical index 2 because z is the higher bit
  const Vocabulary v = domain_only({"y", "z"});
  const auto res = solve_reward(describe({exists_eq({}, 5.0), exists_eq({}, 7.0)}), v);
  const auto& sol = std::get<RewardSolution>(res);
  CHECK(sol.domain == std::vector<std::string>{"y", "z"});
  CHECK(sol.equalities == std::map<std::size_t, double>{{0, 5.0}, {2, 7.0}});
  CHECK(sol.witnesses == std::vector<std::size_t>{0, 2});
  CHECK(complete_reward(sol) == std::vector<double>{5.0, 0.0, 7.0, 0.0});
}

TEST_CASE("equal-value constraints may share a witness") {
  const Vocabulary v = domain_only({"y", "z"});
  // distinct formulas, same value: the pinned one re-asserts the free one's pick
  const auto res = solve_reward(
      describe({exists_eq({}, 5.0), exists_eq({{"y", false}, {"z", false}}, 5.0)}), v);
  const auto& sol = std::get<RewardSolution>(res);
  CHECK(sol.witnesses == std::vector<std::size_t>{0, 0});
  CHECK(sol.equalities == std::map<std::size_t, double>{{0, 5.0}});
}

TEST_CASE("contradicting rewards for one fully pinned state are unsatisfiable") {
  const Vocabulary v = domain_only({"y", "z"});
  const auto res = solve_reward(
      describe({exists_eq({{"y", true}, {"z", false}}, 1.0),
                exists_eq({{"y", true}, {"z", false}}, 0.5)}),
      v);
  const auto& unsat = std::get<RewardUnsat>(res);
  CHECK(unsat.failed_constraint == 1);
}

TEST_CASE("an equality inside a strict bound's shadow backtracks or fails") {
  const Vocabulary v = domain_only({"y"});
  // y=1 must exceed 3, but it must also equal 2: nothing satisfies both
  const auto res =
      solve_reward(describe({exists_gt({{"y", true}}, 3.0), exists_eq({{"y", true}}, 2.0)}), v);
  CHECK(std::holds_alternative<RewardUnsat>(res));

  // with a free variable the second constraint slides to the other state
  const Vocabulary v2 = domain_only({"y", "z"});
  const auto res2 =
      solve_reward(describe({exists_gt({{"y", true}}, 3.0), exists_eq({{"y", true}}, 2.0)}), v2);
  const auto& sol = std::get<RewardSolution>(res2);
  // bound claims (y=1,z=0) = index 1; equality moves to (y=1,z=1) = index 3
  CHECK(sol.lower_bounds == std::map<std::size_t, double>{{1, 3.0}});
  CHECK(sol.equalities == std::map<std::size_t, double>{{3, 2.0}});
  CHECK(sol.witnesses == std::vector<std::size_t>{1, 3});
}

TEST_CASE("reward_update reports a conflict as an unforeseen reward factor") {
  const Vocabulary v = domain_only({"Yield"});
  const auto res = reward_update(
      describe({exists_eq({{"Yield", true}}, 15.0), exists_eq({{"Yield", true}}, 20.0)}), v);
  const auto& uf = std::get<UnforeseenReward>(res);
  CHECK(uf.known_domain == std::set<std::string>{"Yield"});
}

TEST_CASE("an enlarged domain separates previously conflicting observations") {
  const auto conflict =
      describe({exists_eq({{"Yield", true}}, 15.0), exists_eq({{"Yield", true}}, 20.0)});
  CHECK(std::holds_alternative<UnforeseenReward>(
      reward_update(conflict, domain_only({"Yield"}))));

  const auto res = reward_update(conflict, domain_only({"Protein", "Yield"}));
  const auto& est = std::get<RewardEstimate>(res);
  CHECK(est.domain == std::vector<std::string>{"Protein", "Yield"});
  // Yield is the high bit: (P=0,Y=1) = 2 takes 15, (P=1,Y=1) = 3 takes 20
  CHECK(est.table == std::vector<double>{0.0, 0.0, 15.0, 20.0});
}

TEST_CASE("solve_reward agrees with exhaustive search on random systems") {
  std::mt19937_64 rng(424242);
  const std::vector<std::string> pool{"p", "q", "r", "s"};
  int solved = 0, unsat = 0;
  for (int rep = 0; rep < 300; ++rep) {
    const std::size_t n_domain = 1 + rng() % 4;
    const std::size_t n_constraints = 1 + rng() % 12;
    const auto raw = random_system(rng, pool, n_domain, n_constraints);
    const std::vector<std::string> domain(pool.begin(),
                                          pool.begin() + static_cast<long>(n_domain));
    const Vocabulary v = domain_only({domain.begin(), domain.end()});

    const PartialDescription delta = describe(raw);
    const auto cs = delta.state_constraints();  // duplicates dropped on conjoin
    const auto got = solve_reward(delta, v);
    const auto expect = oracles::solve_reward(cs, domain);
    CHECK(same_result(got, expect));

    if (const auto* sol = std::get_if<RewardSolution>(&got)) {
      ++solved;
      CHECK(oracles::reward_table_satisfies(complete_reward(*sol), cs, domain));
    } else {
      ++unsat;
    }
  }
  // the generator must exercise both verdicts
  CHECK(solved > 50);
  CHECK(unsat > 50);
}

TEST_CASE("the incremental solver equals a fresh solve after every conjunct") {
  std::mt19937_64 rng(777);
  const std::vector<std::string> pool{"p", "q", "r"};
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n_domain = 1 + rng() % 3;
    const auto cs = random_system(rng, pool, n_domain, 1 + rng() % 20);
    const std::vector<std::string> domain(pool.begin(),
                                          pool.begin() + static_cast<long>(n_domain));
    const Vocabulary v = domain_only({domain.begin(), domain.end()});

    IncrementalRewardSolver inc;
    inc.reset(v);
    PartialDescription growing;
    bool was_unsat = false;
    for (const auto& c : cs) {
      growing.conjoin(c);
      const auto inc_res = inc.update(growing);
      const auto batch_res = reward_update(growing, v);

      const auto* inc_est = std::get_if<RewardEstimate>(&inc_res);
      const auto* batch_est = std::get_if<RewardEstimate>(&batch_res);
      REQUIRE((inc_est != nullptr) == (batch_est != nullptr));
      if (inc_est) {
        CHECK(inc_est->domain == batch_est->domain);
        CHECK(inc_est->table == batch_est->table);
      } else {
        was_unsat = true;
      }
      // full state agreement, witnesses included
      const auto cur = inc.current();
      const auto batch = solve_reward(growing, v);
      const auto* a = std::get_if<RewardSolution>(&cur);
      const auto* b = std::get_if<RewardSolution>(&batch);
      REQUIRE((a != nullptr) == (b != nullptr));
      if (a) {
        CHECK(a->equalities == b->equalities);
        CHECK(a->lower_bounds == b->lower_bounds);
        CHECK(a->witnesses == b->witnesses);
      }
      // monotone conjunctions never recover from a conflict
      if (was_unsat) CHECK(inc_est == nullptr);
    }
  }
}
