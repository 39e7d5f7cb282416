#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "dnlearn/builtin_networks.hpp"
#include "dnlearn/inference.hpp"
#include "dnlearn/json_io.hpp"
#include "dnlearn/simulator.hpp"

namespace py = pybind11;
using namespace dnlearn;

namespace {

Assignment assignment_from_dict(const py::dict& d) {
  Assignment a;
  for (const auto& item : d)
    a.set(py::cast<std::string>(item.first), py::cast<bool>(item.second));
  return a;
}

py::dict assignment_to_dict(const Assignment& a) {
  py::dict d;
  for (const auto& [var, value] : a) d[py::cast(var)] = value;
  return d;
}

py::dict row_to_dict(const MetricsRow& r) {
  py::dict d;
  d["run"] = r.run;
  d["step"] = r.step;
  d["event"] = r.event;
  d["reward"] = r.reward;
  d["cum_reward"] = r.cum_reward;
  d["policy_error"] = r.policy_error ? py::cast(*r.policy_error) : py::none();
  d["n_vars"] = r.n_vars;
  d["n_lattice_nodes"] = r.n_lattice_nodes;
  d["ms"] = r.ms;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Decision-network learning: exact inference, structure and reward "
            "estimation, and the full learner/expert simulation loop.";

  py::enum_<VariableKind>(m, "VariableKind")
      .value("Action", VariableKind::Action)
      .value("Before", VariableKind::Before)
      .value("Outcome", VariableKind::Outcome);

  py::class_<DecisionNetwork>(m, "DecisionNetwork")
      .def(py::init<>())
      .def("add_variable", &DecisionNetwork::add_variable, py::arg("name"), py::arg("kind"))
      .def("set_parents", &DecisionNetwork::set_parents, py::arg("var"), py::arg("parents"))
      .def("set_cpt", &DecisionNetwork::set_cpt, py::arg("var"), py::arg("table"))
      .def("set_reward", &DecisionNetwork::set_reward, py::arg("domain"), py::arg("table"))
      .def_property_readonly("num_variables", &DecisionNetwork::num_variables)
      .def("variables",
           [](const DecisionNetwork& dn) {
             py::list out;
             for (const auto& v : dn.variables()) out.append(py::make_tuple(v.name, v.kind));
             return out;
           })
      .def("parents_of", &DecisionNetwork::parents_of, py::arg("name"))
      .def("reward_domain", &DecisionNetwork::reward_domain)
      .def("reward_table", &DecisionNetwork::reward_table)
      .def("to_json", [](const DecisionNetwork& dn) { return dn_to_json(dn); })
      .def_static("from_json", [](const std::string& text) { return dn_from_json(text); });

  m.def("validate", &validate, py::arg("dn"),
        "Well-formedness violations; empty when the network is valid.");
  m.def("load_dn", &load_dn, py::arg("path"));
  m.def("save_dn", &save_dn, py::arg("dn"), py::arg("path"));

  m.def("barley_network", &barley_network);
  m.def("barley_initial_model", &barley_initial_model);
  m.def("dn_best_network", &dn_best_network);
  m.def("dn_worst_network", &dn_worst_network);
  m.def("generate_random_dn", &generate_random_dn, py::arg("seed"), py::arg("n_actions") = 7,
        py::arg("n_before") = 7, py::arg("n_outcomes") = 7, py::arg("reward_vars") = 5,
        py::arg("reward_max") = 50.0);

  m.def(
      "marginal",
      [](const DecisionNetwork& dn, const std::set<std::string>& targets, const py::dict& ev) {
        Distribution d = marginal(dn, targets, assignment_from_dict(ev));
        return py::make_tuple(d.variables, d.probabilities);
      },
      py::arg("dn"), py::arg("targets"), py::arg("evidence") = py::dict(),
      "Joint marginal as (variables, probabilities); first variable is the "
      "least-significant index bit.");
  m.def(
      "expected_utility",
      [](const DecisionNetwork& dn, const py::dict& action, const py::dict& ev) {
        return expected_utility(dn, assignment_from_dict(action), assignment_from_dict(ev));
      },
      py::arg("dn"), py::arg("action"), py::arg("evidence") = py::dict());
  m.def(
      "optimal_action",
      [](const DecisionNetwork& dn, const py::dict& ev) {
        return assignment_to_dict(optimal_action(dn, assignment_from_dict(ev)));
      },
      py::arg("dn"), py::arg("evidence") = py::dict(),
      "Highest-expected-utility total action; ties pick the lexicographically "
      "least assignment.");

  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def(py::init([](const std::string& agent, double expert_beta, int expert_gamma, int steps,
                       int pe_period, int runs, std::uint64_t seed) {
             ExperimentConfig cfg;
             cfg.agent = AgentConfig::for_variant(agent_variant_from_string(agent));
             cfg.expert_beta = expert_beta;
             cfg.expert_gamma = expert_gamma;
             cfg.steps = steps;
             cfg.pe_period = pe_period;
             cfg.runs = runs;
             cfg.seed = seed;
             return cfg;
           }),
           py::arg("agent") = "default", py::arg("expert_beta") = 0.9,
           py::arg("expert_gamma") = 50, py::arg("steps") = 3000, py::arg("pe_period") = 50,
           py::arg("runs") = 1, py::arg("seed") = 0);

  m.def(
      "run_simulation",
      [](const DecisionNetwork& dn_plus, const ExperimentConfig& cfg,
         const std::optional<DecisionNetwork>& initial_model) {
        const auto rows = run_simulation(dn_plus, initial_model ? &*initial_model : nullptr, cfg);
        py::list out;
        for (const auto& r : rows) out.append(row_to_dict(r));
        return out;
      },
      py::arg("dn_plus"), py::arg("config"), py::arg("initial_model") = py::none(),
      "One experiment; returns one metrics dict per step.");

  m.def(
      "metrics_csv",
      [](const DecisionNetwork& dn_plus, const ExperimentConfig& cfg,
         const std::optional<DecisionNetwork>& initial_model) {
        const auto rows = run_simulation(dn_plus, initial_model ? &*initial_model : nullptr, cfg);
        std::ostringstream out;
        emit_metrics(rows, out);
        return out.str();
      },
      py::arg("dn_plus"), py::arg("config"), py::arg("initial_model") = py::none(),
      "One experiment rendered as the CLI's CSV text.");
}
