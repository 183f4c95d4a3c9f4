#ifndef SIMREG_CLI_HPP
#define SIMREG_CLI_HPP

#include <cstdint>
#include <optional>
#include <string>

#include "simreg/core.hpp"

namespace simreg::cli {

/// Parsed command line for one run. Exit codes: 0 ok, 2 config error,
/// 3 data error, 4 numeric error.
struct RunConfig {
  std::string command;  // simulate | fit | ci | shape | qsl | ecg-segment | ecg-fit
  std::string config_path;
  std::string input_path;
  std::string output_dir = ".";
  std::optional<std::uint64_t> seed;
  int reps = 1;
  std::optional<double> alpha;
  double level = 0.95;
  std::string sign_mode = "known";  // known | dual
  bool nonsym = false;
  // ecg options
  Index min_separation = 40;
  std::optional<double> threshold;
  std::optional<Index> ref;  // 1-based reference override
};

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

int exit_code_for(Err code) noexcept;

/// Executes the command, writing artifacts under output_dir. Failures print
/// one "error: <Code>: <detail>" line on stderr and return the mapped code.
int run(const RunConfig& config);

}  // namespace simreg::cli

#endif
