#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "config.hpp"
#include "result_table.hpp"

namespace weaktime::cli {

struct RunOptions {
  unsigned threads = 0;               // 0: all hardware threads
  std::optional<double> tolerance;    // overrides quad.tolerance
  std::uint64_t seed = 0;
};

ResultTable cmd_times(const Config& cfg, const RunOptions& run);
ResultTable cmd_asymptotic(const Config& cfg, const RunOptions& run);
ResultTable cmd_twolevel(const Config& cfg, const RunOptions& run);
ResultTable cmd_arrival(const Config& cfg, const RunOptions& run);
ResultTable cmd_weak_sim(const Config& cfg, const RunOptions& run);
ResultTable cmd_validate(const Config& cfg, const RunOptions& run);

// Runs the named subcommand; throws std::invalid_argument for an unknown name.
ResultTable run_command(const std::string& name, const Config& cfg, const RunOptions& run);

// True when every check row of a validate table passed.
bool validation_passed(const ResultTable& table);

// Process exit code for the exception currently being handled.
int exit_code_for_current_exception(std::string& message);

}  // namespace weaktime::cli
