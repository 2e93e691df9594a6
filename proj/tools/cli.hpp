#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "kbad/bob.hpp"
#include "kbad/config.hpp"
#include "kbad/game.hpp"
#include "kbad/strategy.hpp"

namespace kbad::cli {

enum ExitCode : int {
  kOk = 0,
  kInputError = 2,
  kUndetermined = 3,
  kUniquenessViolation = 4,
  kConditionTooHigh = 5,
};

enum class AliceKind { Strategy, CenterSlab, Empty };

struct RunConfig {
  std::string text;      // file contents plus overrides and absolute input paths
  std::string base_dir;  // relative paths resolve against the config file
  std::string field_path;
  std::optional<std::string> weights;
  GameKind game = GameKind::Potential;
  double beta = 0.9;
  std::optional<double> gamma = 5.0;
  std::size_t rounds = 200;
  AliceKind alice = AliceKind::Strategy;
  BobKind bob = BobKind::GreedyRational;
  std::uint64_t seed = 1;
  double shrink = 0.9;
  double pool_height = 50.5;
  std::string transcript;
  double rho0 = 0.5;
  std::vector<double> center;
  StrategyConfig strategy;
  std::optional<double> eps;
  double height_bound = 100.0;
  std::vector<double> t_grid;
  std::vector<double> x;
  std::string out_dir = ".";
};

// "a:b:h" for a, a+h, ... <= b (inclusive within 1e-9 h), or a comma list.
std::vector<double> parse_t_grid(const std::string& text);

// Throws ConfigError or ParseError. The overrides are appended to the echoed
// text so that rerunning on the echo reproduces the run.
RunConfig load_run_config(const std::string& path, const std::optional<std::uint64_t>& seed_override);

// Entry point shared by the executable and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace kbad::cli
