#ifndef AGAN_CLI_HPP
#define AGAN_CLI_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "agan/baselines.hpp"
#include "agan/losses.hpp"
#include "agan/models.hpp"
#include "agan/training.hpp"

namespace agan::cli {

/// Fully resolved run configuration: config-file values with command-line
/// overrides applied, validated against every type invariant before any
/// work starts. Echoed verbatim into each run's manifest.
struct RunConfig {
  std::string dataset = "mnist";
  std::string data_dir = "data/mnist";
  GeneratorSpec generator;
  DiscriminatorSpec discriminator;
  ClassifierSpec classifier;
  TrainConfig train;
  AttackObjectiveConfig attack;
  PerturbationBudget budget;
  std::string out_root = "runs";
  std::uint64_t seed = 1;

  std::string to_json() const;
};

/// Parses the JSON config file and applies override pairs ("a.b.c", value
/// as JSON text). Unknown keys anywhere are validation errors naming the
/// key. An empty path yields the defaults.
RunConfig load_config(const std::string& path,
                      const std::vector<std::pair<std::string, std::string>>&
                          overrides = {});

/// Runs one subcommand; returns the process exit status (0 success,
/// 1 validation/runtime error, 2 usage error).
int dispatch(const std::vector<std::string>& args);

}  // namespace agan::cli

#endif  // AGAN_CLI_HPP
