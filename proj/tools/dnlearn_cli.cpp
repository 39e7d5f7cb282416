// Command-line front end: run experiments, generate random networks,
// validate network files.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "dnlearn/builtin_networks.hpp"
#include "dnlearn/json_io.hpp"
#include "dnlearn/simulator.hpp"

namespace {

struct SimulateOptions {
  std::string dn = "barley";
  std::string agent = "default";
  double expert_beta = 0.9;
  int expert_gamma = 50;
  int steps = 3000;
  int runs = 1;
  std::uint64_t seed = 0;
  int pe_period = 50;
  std::string out = "-";
  double epsilon = 0.3;
  double epsilon_decay = -1.0;  // <0: keep the variant's default
  int su_period = 100;
  std::size_t max_lattice_nodes = 0;  // 0: keep default
  bool timing = false;
  bool check_consistency = false;
  std::string transcript;
};

int run_simulate(const SimulateOptions& opt) {
  dnlearn::DecisionNetwork dn_plus;
  std::optional<dnlearn::DecisionNetwork> initial;
  if (opt.dn == "barley") {
    dn_plus = dnlearn::barley_network();
    initial = dnlearn::barley_initial_model();
  } else if (opt.dn == "random") {
    dn_plus = dnlearn::generate_random_dn(opt.seed);
  } else {
    dn_plus = dnlearn::load_dn(opt.dn);
  }

  dnlearn::ExperimentConfig cfg;
  cfg.agent = dnlearn::AgentConfig::for_variant(dnlearn::agent_variant_from_string(opt.agent));
  cfg.agent.epsilon0 = opt.epsilon;
  if (opt.epsilon_decay >= 0.0) cfg.agent.epsilon_decay = opt.epsilon_decay;
  cfg.agent.su_period = opt.su_period;
  if (opt.max_lattice_nodes > 0) cfg.agent.hyper.max_lattice_nodes = opt.max_lattice_nodes;
  cfg.expert_beta = opt.expert_beta;
  cfg.expert_gamma = opt.expert_gamma;
  cfg.steps = opt.steps;
  cfg.runs = opt.runs;
  cfg.seed = opt.seed;
  cfg.pe_period = opt.pe_period;
  cfg.timing = opt.timing;
  cfg.check_consistency = opt.check_consistency;

  std::ofstream transcript_file;
  if (!opt.transcript.empty()) {
    transcript_file.open(opt.transcript);
    if (!transcript_file) {
      std::cerr << "cannot open transcript file: " << opt.transcript << "\n";
      return 1;
    }
    cfg.transcript = &transcript_file;
  }

  const auto rows =
      dnlearn::run_simulation(dn_plus, initial ? &*initial : nullptr, cfg);

  if (opt.out == "-") {
    dnlearn::emit_metrics(rows, std::cout);
    return 0;
  }
  std::ofstream out(opt.out);
  if (!out) {
    std::cerr << "cannot open output file: " << opt.out << "\n";
    return 1;
  }
  dnlearn::emit_metrics(rows, out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decision-network learning simulator"};
  app.require_subcommand(1);

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Run learning experiments, emit metrics CSV");
  simulate->add_option("--dn", sim.dn, "Network: 'barley', 'random', or a file path")
      ->capture_default_str();
  simulate
      ->add_option("--agent", sim.agent,
                   "default|baseline|full-vocab|slightly-min|maximal|non-con|decay")
      ->capture_default_str();
  simulate->add_option("--expert-beta", sim.expert_beta, "Expert tolerance for suboptimal play")
      ->capture_default_str();
  simulate->add_option("--expert-gamma", sim.expert_gamma, "Minimum steps between advice")
      ->capture_default_str();
  simulate->add_option("--steps", sim.steps, "Steps per run")->capture_default_str();
  simulate->add_option("--runs", sim.runs, "Independent runs")->capture_default_str();
  simulate->add_option("--seed", sim.seed, "Master seed")->capture_default_str();
  simulate->add_option("--pe-period", sim.pe_period, "Policy-error cadence in steps; 0 disables")
      ->capture_default_str();
  simulate->add_option("--out", sim.out, "Output CSV path, '-' for stdout")
      ->capture_default_str();
  simulate->add_option("--epsilon", sim.epsilon, "Exploration rate")->capture_default_str();
  simulate->add_option("--epsilon-decay", sim.epsilon_decay,
                       "Per-step exploration decay (overrides the variant)");
  simulate->add_option("--su-period", sim.su_period, "Trials between scheduled lattice rebuilds")
      ->capture_default_str();
  simulate->add_option("--max-lattice-nodes", sim.max_lattice_nodes,
                       "Abort a run when total lattice size exceeds this");
  simulate->add_flag("--timing", sim.timing, "Fill the ms column with wall-clock times");
  simulate->add_flag("--check-consistency", sim.check_consistency,
                     "Assert model validity and description satisfaction each revision");
  simulate->add_option("--transcript", sim.transcript, "Write dialogue transcript to this file");

  std::uint64_t gen_seed = 0;
  int gen_actions = 7, gen_before = 7, gen_outcomes = 7, gen_reward_vars = 5;
  double gen_reward_max = 50.0;
  std::string gen_out;
  auto* gen = app.add_subcommand("gen-dn", "Generate a random decision network file");
  gen->add_option("--seed", gen_seed, "Generator seed")->capture_default_str();
  gen->add_option("--actions", gen_actions, "Action count")->capture_default_str();
  gen->add_option("--before", gen_before, "Before-variable count")->capture_default_str();
  gen->add_option("--outcomes", gen_outcomes, "Outcome count")->capture_default_str();
  gen->add_option("--reward-vars", gen_reward_vars, "Reward-domain size")->capture_default_str();
  gen->add_option("--reward-max", gen_reward_max, "Upper bound for reward values")
      ->capture_default_str();
  gen->add_option("--out", gen_out, "Output file, '-' for stdout")->required();

  std::string validate_path;
  auto* val = app.add_subcommand("validate", "Check a network file; print any violations");
  val->add_option("file", validate_path, "Network file to check")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) return run_simulate(sim);
    if (gen->parsed()) {
      const auto dn = dnlearn::generate_random_dn(gen_seed, gen_actions, gen_before, gen_outcomes,
                                                  gen_reward_vars, gen_reward_max);
      if (gen_out == "-") {
        std::cout << dnlearn::dn_to_json(dn) << "\n";
      } else {
        dnlearn::save_dn(dn, gen_out);
      }
      return 0;
    }
    if (val->parsed()) {
      const auto dn = dnlearn::load_dn(validate_path);
      const auto problems = dnlearn::validate(dn);
      for (const auto& p : problems) std::cout << p << "\n";
      if (!problems.empty()) return 1;
      std::cout << "ok\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
