#include "dnlearn/builtin_networks.hpp"

namespace dnlearn {

DecisionNetwork barley_network() {
  DecisionNetwork dn;
  for (const char* a : {"Grain", "Harrow", "Fungicide", "Fertiliser", "Pesticide"})
    dn.add_variable(a, VariableKind::Action);
  for (const char* b :
       {"SoilType", "Temperature", "Precipitation", "InsectPrevalence", "LocalConcern"})
    dn.add_variable(b, VariableKind::Before);
  for (const char* o : {"Nitrogen", "GrossCrops", "Fungus", "Weeds", "Infestation", "Yield",
                        "Protein", "BadPress"})
    dn.add_variable(o, VariableKind::Outcome);

  for (const char* b :
       {"SoilType", "Temperature", "Precipitation", "InsectPrevalence", "LocalConcern"}) {
    dn.set_parents(b, {});
    dn.set_cpt(b, {0.5});
  }
  dn.set_parents("Nitrogen", {"SoilType", "Precipitation", "Pesticide", "Fertiliser"});
  dn.set_cpt("Nitrogen", {0.4, 0.6, 0.5, 0.7, 0.3, 0.5, 0.4, 0.6, 0.65, 0.85, 0.75, 0.95, 0.55,
                          0.75, 0.65, 0.85});
  dn.set_parents("GrossCrops", {"Harrow", "Nitrogen", "Grain"});
  dn.set_cpt("GrossCrops", {0.5, 0.4, 0.8, 0.7, 0.6, 0.5, 0.9, 0.8});
  dn.set_parents("Fungus", {"Temperature", "Fungicide", "Grain"});
  dn.set_cpt("Fungus", {0.2, 0.5, 0.02, 0.04, 0.3, 0.6, 0.03, 0.06});
  dn.set_parents("Weeds", {"Temperature", "Harrow", "SoilType"});
  dn.set_cpt("Weeds", {0.2, 0.1, 0.02, 0.01, 0.3, 0.15, 0.03, 0.015});
  dn.set_parents("Infestation", {"InsectPrevalence", "Pesticide"});
  dn.set_cpt("Infestation", {0.1, 0.5, 0.01, 0.05});
  dn.set_parents("Yield", {"GrossCrops", "Fungus", "Weeds", "Infestation"});
  dn.set_cpt("Yield", {0.2, 0.95, 0.1, 0.5, 0.1, 0.7, 0.05, 0.3, 0.05, 0.65, 0.01, 0.2, 0.01,
                       0.45, 0.005, 0.1});
  dn.set_parents("Protein", {"Nitrogen", "Fertiliser", "Grain"});
  dn.set_cpt("Protein", {0.5, 0.9, 0.4, 0.8, 0.4, 0.8, 0.3, 0.7});
  dn.set_parents("BadPress", {"LocalConcern", "Pesticide"});
  dn.set_cpt("BadPress", {0.0, 0.0, 0.01, 0.5});

  dn.set_reward({"Yield", "Protein", "Fungus", "BadPress"},
                {10, 15, 15, 20, 0, 5, 5, 10, -10, -5, -5, 0, -20, -15, -15, -10});
  return dn;
}

DecisionNetwork barley_initial_model() {
  DecisionNetwork dn;
  for (const char* a : {"Grain", "Fertiliser"}) dn.add_variable(a, VariableKind::Action);
  for (const char* b : {"SoilType", "Precipitation"}) dn.add_variable(b, VariableKind::Before);
  for (const char* o : {"Nitrogen", "GrossCrops", "Yield", "Protein"})
    dn.add_variable(o, VariableKind::Outcome);

  for (const char* b : {"SoilType", "Precipitation"}) {
    dn.set_parents(b, {});
    dn.set_cpt(b, {0.5});
  }
  dn.set_parents("Nitrogen", {"SoilType", "Precipitation", "Fertiliser"});
  dn.set_cpt("Nitrogen", std::vector<double>(8, 0.5));
  dn.set_parents("GrossCrops", {"Nitrogen"});
  dn.set_cpt("GrossCrops", {0.5, 0.5});
  dn.set_parents("Yield", {"GrossCrops"});
  dn.set_cpt("Yield", {0.5, 0.5});
  dn.set_parents("Protein", {"Nitrogen", "Fertiliser", "Grain"});
  dn.set_cpt("Protein", std::vector<double>(8, 0.5));

  dn.set_reward({"Protein", "Yield"}, std::vector<double>(4, 0.0));
  return dn;
}

DecisionNetwork dn_best_network() {
  DecisionNetwork dn;
  for (const char* a : {"A1", "A2", "A3", "A4", "A5", "A6", "A7"})
    dn.add_variable(a, VariableKind::Action);
  for (const char* b : {"B1", "B2", "B3", "B4", "B5", "B6", "B7"})
    dn.add_variable(b, VariableKind::Before);
  for (const char* o : {"O1", "O2", "O3", "O4", "O5", "O6", "O7"})
    dn.add_variable(o, VariableKind::Outcome);

  dn.set_parents("B1", {"B5"});
  dn.set_cpt("B1", {0.596, 0.774});
  dn.set_parents("B2", {});
  dn.set_cpt("B2", {0.653});
  dn.set_parents("B3", {"B7"});
  dn.set_cpt("B3", {0.457, 0.457});
  dn.set_parents("B4", {});
  dn.set_cpt("B4", {0.354});
  dn.set_parents("B5", {"B3", "B4"});
  dn.set_cpt("B5", {0.639, 0.224, 0.35, 0.273});
  dn.set_parents("B6", {});
  dn.set_cpt("B6", {0.738});
  dn.set_parents("B7", {});
  dn.set_cpt("B7", {0.313});
  dn.set_parents("O1", {"O2", "O6", "A3"});
  dn.set_cpt("O1", {0.286, 0.478, 0.401, 0.956, 0.53, 0.084, 0.766, 0.923});
  dn.set_parents("O2", {"A1", "A7"});
  dn.set_cpt("O2", {0.31, 0.554, 0.213, 0.197});
  dn.set_parents("O3", {"A2", "A5", "B2"});
  dn.set_cpt("O3", {0.74, 0.945, 0.92, 0.721, 0.371, 0.963, 0.129, 0.029});
  dn.set_parents("O4", {"B2", "O5", "B1"});
  dn.set_cpt("O4", {0.937, 0.93, 0.484, 0.255, 0.637, 0.191, 0.136, 0.149});
  dn.set_parents("O5", {"O7"});
  dn.set_cpt("O5", {0.36, 0.43});
  dn.set_parents("O6", {"A6", "B5"});
  dn.set_cpt("O6", {0.677, 0.209, 0.696, 0.521});
  dn.set_parents("O7", {"A4", "B6"});
  dn.set_cpt("O7", {0.821, 0.379, 0.211, 0.383});

  dn.set_reward({"O1", "O4", "O3", "O5", "B7"},
                {43.55, 27.42, 35.48, 8.06,  20.97, 11.29, 30.65, 50.0,  46.77, 6.45,  12.9,
                 32.26, 41.94, 0.0,   33.87, 37.1,  25.81, 4.84,  22.58, 29.03, 14.52, 9.68,
                 45.16, 24.19, 17.74, 19.35, 48.39, 16.13, 40.32, 3.23,  38.71, 1.61});
  return dn;
}

DecisionNetwork dn_worst_network() {
  DecisionNetwork dn;
  for (const char* a : {"A1", "A2", "A3", "A4", "A5", "A6", "A7"})
    dn.add_variable(a, VariableKind::Action);
  for (const char* b : {"B1", "B2", "B3", "B4", "B5", "B6", "B7"})
    dn.add_variable(b, VariableKind::Before);
  for (const char* o : {"O1", "O2", "O3", "O4", "O5", "O6", "O7"})
    dn.add_variable(o, VariableKind::Outcome);

  dn.set_parents("B1", {});
  dn.set_cpt("B1", {0.49});
  dn.set_parents("B2", {"B3", "B7"});
  dn.set_cpt("B2", {0.779, 0.547, 0.727, 0.197});
  dn.set_parents("B3", {});
  dn.set_cpt("B3", {0.198});
  dn.set_parents("B4", {});
  dn.set_cpt("B4", {0.36});
  dn.set_parents("B5", {});
  dn.set_cpt("B5", {0.883});
  dn.set_parents("B6", {});
  dn.set_cpt("B6", {0.237});
  dn.set_parents("B7", {"B1"});
  dn.set_cpt("B7", {0.43, 0.992});
  dn.set_parents("O1", {"O7", "A1", "A3"});
  dn.set_cpt("O1", {0.088, 0.467, 0.13, 0.548, 0.7, 0.372, 0.498, 0.047});
  dn.set_parents("O2", {"B5", "O7"});
  dn.set_cpt("O2", {0.461, 0.599, 0.806, 0.37});
  dn.set_parents("O3", {"A6"});
  dn.set_cpt("O3", {0.881, 0.125});
  dn.set_parents("O4", {"O3", "A5", "A4"});
  dn.set_cpt("O4", {0.111, 0.033, 0.315, 0.322, 0.034, 0.579, 0.94, 0.644});
  dn.set_parents("O5", {"O2", "B4", "O4"});
  dn.set_cpt("O5", {0.816, 0.979, 0.577, 0.467, 0.459, 0.751, 0.191, 0.541});
  dn.set_parents("O6", {"O4", "A2"});
  dn.set_cpt("O6", {0.818, 0.583, 0.188, 0.957});
  dn.set_parents("O7", {"O6", "A7", "B1"});
  dn.set_cpt("O7", {0.314, 0.418, 0.48, 0.822, 0.957, 0.889, 0.697, 0.061});

  dn.set_reward({"O1", "B6", "B7", "O5", "B2"},
                {43.55, 6.45,  22.58, 46.77, 37.1,  48.39, 1.61,  8.06,  16.13, 29.03, 50.0,
                 9.68,  11.29, 14.52, 19.35, 40.32, 4.84,  12.9,  38.71, 20.97, 45.16, 3.23,
                 32.26, 17.74, 33.87, 25.81, 24.19, 35.48, 27.42, 30.65, 41.94, 0.0});
  return dn;
}

}  // namespace dnlearn
