#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "dnlearn/builtin_networks.hpp"
#include "dnlearn/desc.hpp"
#include "dnlearn/simulator.hpp"

using namespace dnlearn;

namespace {

Membership before_atom(const std::string& v) { return {v, SetKind::Before, {}}; }
Membership action_atom(const std::string& v) { return {v, SetKind::Action, {}}; }
Membership outcome_atom(const std::string& v) { return {v, SetKind::Outcome, {}}; }
Membership reward_atom(const std::string& v) { return {v, SetKind::RewardDomain, {}}; }
Membership parent_atom(const std::string& v, const std::string& child) {
  return {v, SetKind::ParentsOf, child};
}

}  // namespace

TEST_CASE("conjoin keeps arrival order and drops duplicates") {
  PartialDescription d;
  d.conjoin(action_atom("Grain"));
  d.conjoin(outcome_atom("Yield"));
  d.conjoin(action_atom("Grain"));  // duplicate
  CHECK(d.size() == 2);
  REQUIRE(d.conjuncts().size() == 2);
  CHECK(std::get<Membership>(d.conjuncts()[0]) == action_atom("Grain"));
  CHECK(std::get<Membership>(d.conjuncts()[1]) == outcome_atom("Yield"));

  const StateExists s{Assignment({{"Yield", true}}), RewardCmp{RewardCmp::Eq, 15.0}};
  d.conjoin(s);
  d.conjoin(s);  // duplicate state constraint
  CHECK(d.size() == 3);

  // the same variable in two different sets is two distinct conjuncts
  d.conjoin(reward_atom("Yield"));
  CHECK(d.size() == 4);
}

TEST_CASE("entailment is conjunction elimination over membership atoms") {
  PartialDescription d;
  d.conjoin(action_atom("Grain"));
  d.conjoin(parent_atom("Nitrogen", "GrossCrops"));
  CHECK(d.entails(action_atom("Grain")));
  CHECK(d.entails(parent_atom("Nitrogen", "GrossCrops")));
  CHECK_FALSE(d.entails(before_atom("Grain")));
  CHECK_FALSE(d.entails(parent_atom("Nitrogen", "Yield")));
  CHECK_FALSE(d.entails(outcome_atom("Weeds")));
}

TEST_CASE("membership accessors slice the description by set") {
  PartialDescription d;
  d.conjoin(before_atom("SoilType"));
  d.conjoin(before_atom("Precipitation"));
  d.conjoin(action_atom("Grain"));
  d.conjoin(outcome_atom("Yield"));
  d.conjoin(reward_atom("Yield"));
  d.conjoin(parent_atom("SoilType", "Yield"));
  d.conjoin(parent_atom("Grain", "Yield"));

  CHECK(d.members_of(SetKind::Before) == std::set<std::string>{"Precipitation", "SoilType"});
  CHECK(d.members_of(SetKind::Action) == std::set<std::string>{"Grain"});
  CHECK(d.members_of(SetKind::Outcome) == std::set<std::string>{"Yield"});
  CHECK(d.members_of(SetKind::RewardDomain) == std::set<std::string>{"Yield"});
  CHECK(d.required_parents("Yield") == std::set<std::string>{"Grain", "SoilType"});
  CHECK(d.required_parents("SoilType").empty());
  CHECK(d.state_constraints().empty());
}

TEST_CASE("a completed trial contributes one exact-reward state constraint") {
  Trial t;
  t.action.set("Grain", true);
  t.outcome.set("Yield", true);
  t.reward = 15.0;
  const Formula f = trial_description(t);
  const auto& s = std::get<StateExists>(f);
  CHECK(s.literals == Assignment({{"Grain", true}, {"Yield", true}}));
  CHECK(s.cmp.kind == RewardCmp::Eq);
  CHECK(s.cmp.value == 15.0);
}

TEST_CASE("advice contributes a strict improvement constraint plus new action names") {
  const Assignment alt({{"Fungicide", true}, {"Grain", false}});
  const Assignment seen({{"Temperature", true}});
  const auto fs = advice_content(alt, seen, 5.0, {"Fungicide"});
  REQUIRE(fs.size() == 2);
  const auto& s = std::get<StateExists>(fs[0]);
  CHECK(s.literals ==
        Assignment({{"Fungicide", true}, {"Grain", false}, {"Temperature", true}}));
  CHECK(s.cmp.kind == RewardCmp::Gt);
  CHECK(s.cmp.value == 5.0);
  CHECK(std::get<Membership>(fs[1]) == action_atom("Fungicide"));

  // no unfamiliar actions, empty before-state
  const auto bare = advice_content(alt, Assignment{}, -2.5, {});
  REQUIRE(bare.size() == 1);
  CHECK(std::get<StateExists>(bare[0]).literals == alt);

  CHECK_THROWS_AS(advice_content(alt, Assignment({{"Fungicide", false}}), 0.0, {}),
                  std::invalid_argument);
}

TEST_CASE("the true barley network satisfies the initial barley description") {
  const DecisionNetwork dn = barley_network();
  const PartialDescription d0 = initial_description(barley_initial_model());
  CHECK(satisfies(dn, d0));
  CHECK(satisfies(barley_initial_model(), d0));
}

TEST_CASE("satisfies checks membership atoms against kinds and edges") {
  const DecisionNetwork dn = barley_network();
  CHECK(satisfies(dn, Formula{action_atom("Grain")}));
  CHECK(satisfies(dn, Formula{before_atom("Temperature")}));
  CHECK(satisfies(dn, Formula{outcome_atom("Fungus")}));
  CHECK(satisfies(dn, Formula{reward_atom("BadPress")}));
  CHECK(satisfies(dn, Formula{parent_atom("Temperature", "Fungus")}));
  CHECK_FALSE(satisfies(dn, Formula{before_atom("Grain")}));
  CHECK_FALSE(satisfies(dn, Formula{reward_atom("Weeds")}));
  CHECK_FALSE(satisfies(dn, Formula{parent_atom("Fungus", "Temperature")}));
  CHECK_FALSE(satisfies(dn, Formula{action_atom("NoSuchVariable")}));
  CHECK_FALSE(satisfies(dn, Formula{parent_atom("Temperature", "NoSuchVariable")}));
}

TEST_CASE("satisfies searches reward-domain completions for state constraints") {
  const DecisionNetwork dn = barley_network();
  // reward 20 needs Yield=1, Protein=1, Fungus=0, BadPress=0
  CHECK(satisfies(dn, Formula{StateExists{Assignment({{"Yield", true}}),
                                          RewardCmp{RewardCmp::Eq, 20.0}}}));
  CHECK_FALSE(satisfies(dn, Formula{StateExists{Assignment({{"Yield", false}}),
                                                RewardCmp{RewardCmp::Eq, 20.0}}}));
  CHECK(satisfies(dn, Formula{StateExists{Assignment({{"Fungus", true}}),
                                          RewardCmp{RewardCmp::Gt, 9.0}}}));
  CHECK_FALSE(satisfies(dn, Formula{StateExists{Assignment({{"Fungus", true}}),
                                                RewardCmp{RewardCmp::Gt, 10.0}}}));
  // literals outside the reward domain only need to name real variables
  CHECK(satisfies(dn, Formula{StateExists{Assignment({{"Harrow", true}, {"Yield", true}}),
                                          RewardCmp{RewardCmp::Eq, 20.0}}}));
  CHECK_FALSE(satisfies(dn, Formula{StateExists{Assignment({{"NoSuchVariable", true}}),
                                                RewardCmp{RewardCmp::Gt, -100.0}}}));

  // an all-zero reward table never strictly beats zero
  const DecisionNetwork flat = barley_initial_model();
  CHECK_FALSE(satisfies(flat, Formula{StateExists{Assignment{}, RewardCmp{RewardCmp::Gt, 0.0}}}));
  CHECK(satisfies(flat, Formula{StateExists{Assignment{}, RewardCmp{RewardCmp::Eq, 0.0}}}));
}

TEST_CASE("descriptions of sampled trials are satisfied by the sampling network") {
  const DecisionNetwork dn = barley_network();
  std::mt19937_64 rng(11);
  PartialDescription d;
  for (int i = 0; i < 40; ++i) {
    Assignment act;
    for (const auto& a : dn.names_of_kind(VariableKind::Action)) act.set(a, (rng() & 1) != 0);
    const Trial t = sample(dn, act, rng);
    const Formula f = trial_description(t);
    CHECK(satisfies(dn, f));
    d.conjoin(f);
  }
  // monotone conjunction: the whole history is still satisfied
  CHECK(satisfies(dn, d));
}

TEST_CASE("set_kind_for maps variable kinds onto membership sets") {
  CHECK(set_kind_for(VariableKind::Action) == SetKind::Action);
  CHECK(set_kind_for(VariableKind::Before) == SetKind::Before);
  CHECK(set_kind_for(VariableKind::Outcome) == SetKind::Outcome);
}

TEST_CASE("formulas print readably") {
  CHECK(to_string(Formula{action_atom("Grain")}) == "(in Grain A+)");
  CHECK(to_string(Formula{parent_atom("Temperature", "Fungus")}) ==
        "(in Temperature Pi(Fungus))");
  const std::string s = to_string(
      Formula{StateExists{Assignment({{"Yield", true}}), RewardCmp{RewardCmp::Gt, 5.0}}});
  CHECK(s.find("Yield") != std::string::npos);
  CHECK(s.find("> 5") != std::string::npos);
}
