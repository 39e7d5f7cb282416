#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "dnlearn/builtin_networks.hpp"
#include "dnlearn/dn.hpp"
#include "oracles.hpp"

using namespace dnlearn;

namespace {

// Minimal valid network: one action, one before, one outcome.
DecisionNetwork tiny_valid() {
  DecisionNetwork dn;
  dn.add_variable("A", VariableKind::Action);
  dn.add_variable("B", VariableKind::Before);
  dn.add_variable("O", VariableKind::Outcome);
  dn.set_cpt("B", {0.5});
  dn.set_parents("O", {"A", "B"});
  dn.set_cpt("O", {0.1, 0.2, 0.3, 0.4});
  dn.set_reward({"O"}, {0.0, 1.0});
  return dn;
}

bool has_violation(const DecisionNetwork& dn, const std::string& msg) {
  const auto v = validate(dn);
  return std::find(v.begin(), v.end(), msg) != v.end();
}

}  // namespace

TEST_CASE("table_index uses first-listed variable as least-significant bit") {
  Assignment st({{"a", true}, {"b", false}, {"c", true}});
  CHECK(DecisionNetwork::table_index({"a", "b", "c"}, st) == 5);
  CHECK(DecisionNetwork::table_index({"c", "b", "a"}, st) == 5);
  CHECK(DecisionNetwork::table_index({"b", "a", "c"}, st) == 6);
  CHECK(DecisionNetwork::table_index(std::vector<std::string>{}, st) == 0);

  // index-based overload reads a dense state vector
  DecisionNetwork dn = tiny_valid();
  std::vector<bool> full(3);
  full[static_cast<std::size_t>(dn.index_of("A"))] = true;
  full[static_cast<std::size_t>(dn.index_of("B"))] = false;
  CHECK(DecisionNetwork::table_index(std::vector<int>{dn.index_of("A"), dn.index_of("B")},
                                     full) == 1);
  CHECK(DecisionNetwork::table_index(std::vector<int>{dn.index_of("B"), dn.index_of("A")},
                                     full) == 2);
}

TEST_CASE("cpt_lookup reads the barley tables at the documented entries") {
  DecisionNetwork dn = barley_network();

  // roots
  CHECK(cpt_lookup(dn, "SoilType", Assignment{}) == 0.5);
  CHECK(cpt_lookup(dn, "Temperature", Assignment{}) == 0.5);

  // Fungus parents are (Temperature, Fungicide, Grain) in listed order
  Assignment cfg({{"Temperature", false}, {"Fungicide", false}, {"Grain", false}});
  CHECK(cpt_lookup(dn, "Fungus", cfg) == 0.2);
  cfg.set("Temperature", true);
  CHECK(cpt_lookup(dn, "Fungus", cfg) == 0.5);
  cfg.set("Temperature", false);
  cfg.set("Fungicide", true);
  CHECK(cpt_lookup(dn, "Fungus", cfg) == 0.02);
  cfg.set("Grain", true);
  CHECK(cpt_lookup(dn, "Fungus", cfg) == 0.03);

  // four-parent table: all parents high is the last entry
  Assignment nit({{"SoilType", true},
                  {"Precipitation", true},
                  {"Pesticide", true},
                  {"Fertiliser", true}});
  CHECK(cpt_lookup(dn, "Nitrogen", nit) == 0.85);

  // extra assignments are ignored
  cfg.set("Yield", true);
  CHECK(cpt_lookup(dn, "Fungus", cfg) == 0.03);

  CHECK_THROWS_AS(cpt_lookup(dn, "Grain", Assignment{}), std::invalid_argument);
  CHECK_THROWS_AS(cpt_lookup(dn, "Fungus", Assignment{}), std::invalid_argument);
}

TEST_CASE("reward_of matches the barley table and its additive form") {
  DecisionNetwork dn = barley_network();
  const std::vector<std::string> dom = dn.reward_domain();
  REQUIRE(dom == std::vector<std::string>{"Yield", "Protein", "Fungus", "BadPress"});

  Assignment best({{"Yield", true}, {"Protein", true}, {"Fungus", false}, {"BadPress", false}});
  CHECK(reward_of(dn, best) == 20.0);
  Assignment worst({{"Yield", false}, {"Protein", false}, {"Fungus", true}, {"BadPress", true}});
  CHECK(reward_of(dn, worst) == -20.0);

  // the whole table decomposes as 10 + 5*Yield + 5*Protein - 10*Fungus - 20*BadPress
  for (int code = 0; code < 16; ++code) {
    Assignment st;
    for (std::size_t k = 0; k < dom.size(); ++k) st.set(dom[k], ((code >> k) & 1) != 0);
    const double expect = 10.0 + 5.0 * st.at("Yield") + 5.0 * st.at("Protein") -
                          10.0 * st.at("Fungus") - 20.0 * st.at("BadPress");
    CHECK(reward_of(dn, st) == expect);
  }

  // variables outside the domain do not matter
  best.set("Weeds", true);
  best.set("Grain", false);
  CHECK(reward_of(dn, best) == 20.0);
}

TEST_CASE("validate accepts the builtin networks") {
  CHECK(validate(barley_network()).empty());
  CHECK(validate(barley_initial_model()).empty());
  CHECK(validate(dn_best_network()).empty());
  CHECK(validate(dn_worst_network()).empty());
  CHECK(validate(tiny_valid()).empty());
}

TEST_CASE("validate reports each violation with its exact message") {
  SUBCASE("empty network") {
    DecisionNetwork dn;
    CHECK(validate(dn) == std::vector<std::string>{"network has no variables"});
  }
  SUBCASE("cycle") {
    DecisionNetwork dn = tiny_valid();
    dn.add_variable("X", VariableKind::Outcome);
    dn.add_variable("Y", VariableKind::Outcome);
    dn.set_parents("X", {"Y", "A"});
    dn.set_parents("Y", {"X", "A"});
    dn.set_cpt("X", {0.5, 0.5, 0.5, 0.5});
    dn.set_cpt("Y", {0.5, 0.5, 0.5, 0.5});
    dn.set_reward({"O", "X"}, {0, 1, 2, 3});
    CHECK(has_violation(dn, "parent relation contains a directed cycle"));
  }
  SUBCASE("action with parents") {
    DecisionNetwork dn = tiny_valid();
    dn.set_parents("A", {"B"});
    CHECK(has_violation(dn, "action variable has parents: A"));
  }
  SUBCASE("action with a CPT") {
    DecisionNetwork dn = tiny_valid();
    dn.set_cpt("A", {0.5});
    CHECK(has_violation(dn, "action variable carries a CPT: A"));
  }
  SUBCASE("CPT size mismatch") {
    DecisionNetwork dn = tiny_valid();
    dn.set_cpt("O", {0.1, 0.2});
    CHECK(has_violation(dn, "CPT size mismatch for O: expected 4, got 2"));
  }
  SUBCASE("CPT entry out of range") {
    DecisionNetwork dn = tiny_valid();
    dn.set_cpt("B", {1.5});
    CHECK(has_violation(dn, "CPT entry outside [0,1] for B"));
  }
  SUBCASE("no action variable") {
    DecisionNetwork dn;
    dn.add_variable("B", VariableKind::Before);
    dn.set_cpt("B", {0.5});
    dn.set_reward({"B"}, {0.0, 1.0});
    CHECK(has_violation(dn, "network has no action variable"));
  }
  SUBCASE("before variable downstream of an action") {
    DecisionNetwork dn = tiny_valid();
    dn.add_variable("C", VariableKind::Before);
    dn.set_parents("C", {"A"});
    dn.set_cpt("C", {0.5, 0.5});
    dn.set_reward({"O", "C"}, {0, 1, 2, 3});
    CHECK(has_violation(dn, "before variable has an action or outcome ancestor: C"));
  }
  SUBCASE("outcome without an action ancestor") {
    DecisionNetwork dn = tiny_valid();
    dn.add_variable("P", VariableKind::Outcome);
    dn.set_parents("P", {"B"});
    dn.set_cpt("P", {0.5, 0.5});
    dn.set_reward({"O", "P"}, {0, 1, 2, 3});
    CHECK(has_violation(dn, "outcome variable has no action ancestor: P"));
  }
  SUBCASE("empty reward domain") {
    DecisionNetwork dn = tiny_valid();
    dn.set_reward({}, {0.0});
    CHECK(has_violation(dn, "reward domain is empty"));
  }
  SUBCASE("duplicate reward-domain variable") {
    DecisionNetwork dn = tiny_valid();
    dn.set_reward({"O", "O"}, {0, 1, 2, 3});
    CHECK(has_violation(dn, "reward domain lists a variable twice"));
  }
  SUBCASE("action in the reward domain") {
    DecisionNetwork dn = tiny_valid();
    dn.set_reward({"O", "A"}, {0, 1, 2, 3});
    CHECK(has_violation(dn, "reward domain contains an action variable: A"));
  }
  SUBCASE("reward table size mismatch") {
    DecisionNetwork dn = tiny_valid();
    dn.set_reward({"O"}, {0.0});
    CHECK(has_violation(dn, "reward table size mismatch: expected 2, got 1"));
  }
  SUBCASE("variable disconnected from the utility node") {
    DecisionNetwork dn = tiny_valid();
    dn.add_variable("Z", VariableKind::Before);
    dn.set_cpt("Z", {0.5});
    CHECK(has_violation(dn, "variable has no path to the utility node: Z"));
  }
}

TEST_CASE("total_action zero-fills unmentioned actions") {
  DecisionNetwork dn = barley_network();
  Assignment a = total_action(dn, Assignment({{"Grain", true}}));
  CHECK(a.size() == 5);
  CHECK(a.at("Grain"));
  CHECK_FALSE(a.at("Fungicide"));
  CHECK_FALSE(a.at("Pesticide"));
  CHECK_FALSE(a.at("Fertiliser"));
  CHECK_FALSE(a.at("Harrow"));

  Assignment none = total_action(dn, Assignment{});
  for (const auto& [var, val] : none) {
    (void)var;
    CHECK_FALSE(val);
  }
  CHECK(none.size() == 5);
}

TEST_CASE("topological order and ancestor sets agree with the barley edges") {
  DecisionNetwork dn = barley_network();
  const auto order = dn.topological_order();
  REQUIRE(order.size() == 18);
  std::vector<int> pos(18);
  for (std::size_t i = 0; i < order.size(); ++i) pos[static_cast<std::size_t>(order[i])] = (int)i;
  for (int v = 0; v < dn.num_variables(); ++v)
    for (int p : dn.parent_indices(v)) CHECK(pos[(std::size_t)p] < pos[(std::size_t)v]);

  const auto anc = dn.ancestors_of(dn.index_of("Fungus"));
  CHECK(anc.count(dn.index_of("Temperature")) == 1);
  CHECK(anc.count(dn.index_of("Fungicide")) == 1);
  CHECK(anc.count(dn.index_of("Grain")) == 1);
  CHECK(anc.count(dn.index_of("Yield")) == 0);
  const auto desc = dn.descendants_of(dn.index_of("Nitrogen"));
  CHECK(desc.count(dn.index_of("GrossCrops")) == 1);
  CHECK(desc.count(dn.index_of("Yield")) == 1);
  CHECK(desc.count(dn.index_of("Protein")) == 1);
  CHECK(desc.count(dn.index_of("Fungus")) == 0);
}

TEST_CASE("sampling is seed-deterministic and respects degenerate tables") {
  DecisionNetwork dn = barley_network();
  std::mt19937_64 r1(7), r2(7);
  const Assignment act = total_action(dn, Assignment({{"Fungicide", true}}));
  for (int i = 0; i < 50; ++i) {
    Trial a = sample(dn, act, r1);
    Trial b = sample(dn, act, r2);
    CHECK(a.before == b.before);
    CHECK(a.action == b.action);
    CHECK(a.outcome == b.outcome);
    CHECK(a.reward == b.reward);
    CHECK(a.action == act);
    CHECK(a.reward == reward_of(dn, a.full_state()));
    CHECK(a.before.size() == 5);
    CHECK(a.outcome.size() == 8);
  }

  DecisionNetwork det = tiny_valid();
  det.set_cpt("B", {1.0});
  det.set_cpt("O", {0.0, 0.0, 1.0, 1.0});  // O copies B
  std::mt19937_64 rng(3);
  for (int i = 0; i < 20; ++i) {
    Trial t = sample(det, total_action(det, Assignment{}), rng);
    CHECK(t.before.at("B"));
    CHECK(t.outcome.at("O"));
  }
}

TEST_CASE("sampled frequencies approach the conditional probabilities") {
  DecisionNetwork dn = barley_network();
  Assignment before;
  for (const auto& name : dn.names_of_kind(VariableKind::Before)) before.set(name, false);
  const Assignment act = total_action(dn, Assignment{});  // Fungicide=0, Grain=0

  std::mt19937_64 rng(12345);
  const int n = 100000;
  int fungus = 0;
  for (int i = 0; i < n; ++i)
    if (sample_outcome(dn, before, act, rng).at("Fungus")) ++fungus;
  const double freq = static_cast<double>(fungus) / n;
  CHECK(freq == doctest::Approx(0.2).epsilon(0.05));
  CHECK(std::abs(freq - 0.2) < 0.01);
}

TEST_CASE("assignment utility operations") {
  Assignment a({{"x", true}, {"y", false}});
  CHECK(a.extends(Assignment({{"x", true}})));
  CHECK_FALSE(a.extends(Assignment({{"x", false}})));
  CHECK(a.consistent_with(Assignment({{"z", true}})));
  CHECK_FALSE(a.consistent_with(Assignment({{"y", true}})));
  const auto merged = a.merged_with(Assignment({{"z", true}}));
  REQUIRE(merged.has_value());
  CHECK(merged->size() == 3);
  CHECK_FALSE(a.merged_with(Assignment({{"x", false}})).has_value());
  CHECK(a.restricted_to({"x", "z"}) == Assignment({{"x", true}}));
  CHECK(a.get("missing") == std::nullopt);
  CHECK_THROWS(static_cast<void>(a.at("missing")));
}
