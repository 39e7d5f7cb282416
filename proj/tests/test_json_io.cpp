#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <random>

#include "dnlearn/builtin_networks.hpp"
#include "dnlearn/json_io.hpp"
#include "dnlearn/simulator.hpp"

using namespace dnlearn;

namespace {

// Structural equality via the canonical serialization.
bool same_network(const DecisionNetwork& a, const DecisionNetwork& b) {
  return dn_to_json(a) == dn_to_json(b);
}

}  // namespace

TEST_CASE("serialization round-trips the builtin networks") {
  for (const DecisionNetwork& dn :
       {barley_network(), barley_initial_model(), dn_best_network(), dn_worst_network()}) {
    const DecisionNetwork back = dn_from_json(dn_to_json(dn));
    CHECK(same_network(dn, back));
    CHECK(validate(back).empty());
    CHECK(back.num_variables() == dn.num_variables());
    CHECK(back.reward_domain() == dn.reward_domain());
    CHECK(back.reward_table() == dn.reward_table());
    for (const auto& v : dn.variables()) {
      CHECK(back.kind_of(v.name) == dn.kind_of(v.name));
      CHECK(back.parents_of(v.name) == dn.parents_of(v.name));
      CHECK(back.cpt_of(back.index_of(v.name)) == dn.cpt_of(dn.index_of(v.name)));
    }
  }
}

TEST_CASE("serialization round-trips random networks") {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    const DecisionNetwork dn = generate_random_dn(seed, 3, 4, 5, 4, 25.0);
    CHECK(same_network(dn, dn_from_json(dn_to_json(dn))));
  }
}

TEST_CASE("the shipped data files match the builtin networks") {
  const std::string dir = DNLEARN_DATA_DIR;
  CHECK(same_network(load_dn(dir + "/barley.json"), barley_network()));
  CHECK(same_network(load_dn(dir + "/barley_dn0.json"), barley_initial_model()));
  CHECK(same_network(load_dn(dir + "/dn_best.json"), dn_best_network()));
  CHECK(same_network(load_dn(dir + "/dn_worst.json"), dn_worst_network()));
}

TEST_CASE("save and load through a file") {
  const std::string path = "test_json_io_tmp.json";
  const DecisionNetwork dn = dn_best_network();
  save_dn(dn, path);
  CHECK(same_network(load_dn(path), dn));
  std::remove(path.c_str());
}

TEST_CASE("malformed documents are rejected") {
  CHECK_THROWS(dn_from_json("not json at all"));
  CHECK_THROWS(dn_from_json("{}"));
  CHECK_THROWS(dn_from_json(R"({"variables": [{"name": "X", "kind": "banana"}],
    "parents": {}, "cpt": {"X": [0.5]}, "reward_domain": ["X"], "reward_table": [0, 1]})"));
  CHECK_THROWS(load_dn("no_such_file_anywhere.json"));
}
