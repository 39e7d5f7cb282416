// Regenerates the bundled network files under data/ from the built-in
// definitions.  Run from the repository root after editing builtin_networks.

#include <iostream>

#include "dnlearn/builtin_networks.hpp"
#include "dnlearn/json_io.hpp"

int main(int argc, char** argv) {
  const std::string dir = argc > 1 ? argv[1] : "data";
  dnlearn::save_dn(dnlearn::barley_network(), dir + "/barley.json");
  dnlearn::save_dn(dnlearn::barley_initial_model(), dir + "/barley_dn0.json");
  dnlearn::save_dn(dnlearn::dn_best_network(), dir + "/dn_best.json");
  dnlearn::save_dn(dnlearn::dn_worst_network(), dir + "/dn_worst.json");
  std::cout << "wrote 4 networks to " << dir << "\n";
  return 0;
}
