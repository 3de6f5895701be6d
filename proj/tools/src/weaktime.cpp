#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <thread>

#include "commands.hpp"

int main(int argc, char** argv) {
  using namespace weaktime::cli;

  CLI::App app{"Weak-measurement time observables in one-dimensional quantum mechanics"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  unsigned threads = 0;
  double tolerance = 0.0;
  std::uint64_t seed = 0;

  const std::vector<std::pair<std::string, std::string>> commands{
      {"times", "Dwell, tunneling and reflection time densities on a grid"},
      {"asymptotic", "Asymptotic tunneling time and its decomposition"},
      {"twolevel", "Unconditional and conditional times of a two-level system"},
      {"arrival", "Diagonal of the complex arrival-time operator"},
      {"weak-sim", "System and detector simulation of a weak measurement"},
      {"validate", "Run the invariant suite"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    if (name == "twolevel") sub->alias("two-level");
    sub->add_option("--config", config_path, "Configuration file (key = value)")->required();
    sub->add_option("--out", out_path, "Output CSV path (default stdout)");
    sub->add_option("--threads", threads, "Worker threads (default all)")->check(CLI::PositiveNumber);
    sub->add_option("--tolerance", tolerance, "Override quad.tolerance");
    sub->add_option("--seed", seed, "Random seed (default 0)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const CLI::App* sub = app.get_subcommands().front();
  RunOptions run;
  run.threads = threads;
  if (sub->count("--tolerance") > 0) run.tolerance = tolerance;
  run.seed = seed;

  try {
    const Config cfg = Config::load(config_path);
    const ResultTable table = run_command(sub->get_name(), cfg, run);
    if (out_path.empty()) {
      table.write(std::cout);
      std::cout.flush();
    } else {
      std::ofstream out(out_path, std::ios::binary);
      if (!out) throw ConfigError("--out: cannot open '" + out_path + "'");
      table.write(out);
      if (!out) throw std::runtime_error("failed writing '" + out_path + "'");
    }
    if (sub->get_name() == "validate" && !validation_passed(table)) {
      std::cerr << "weaktime: validation failed\n";
      return 1;
    }
  } catch (...) {
    std::string message;
    const int code = exit_code_for_current_exception(message);
    std::cerr << "weaktime: " << message << '\n';
    return code;
  }
  return 0;
}
