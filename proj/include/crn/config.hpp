#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "crn/pipeline.hpp"
#include "crn/simulate.hpp"

namespace crn {

/// Flat key=value experiment description. Conditions come from one of:
///   conditions = random:<count>      deterministic sweep derived from `seed`
///   conditions = file:<path>         one `<id> | <x0 csv> [| <scale csv>]` per line
///   conditions = inline              `condition.<id> = <x0 csv> [| <scale csv>]` keys
struct ExperimentConfig {
  std::filesystem::path config_path;
  std::string config_sha256;

  std::filesystem::path mechanism_path;
  double dt = 1e-3;
  int T = 200;
  int substeps = 1;
  double sigma = 0.0;
  std::uint64_t seed = 0;
  double overflow_bound = 1e12;

  std::string conditions_spec = "random:2";
  std::map<int, std::pair<std::vector<double>, std::vector<double>>> inline_conditions;

  std::vector<int> train_ids;
  std::vector<int> holdout_ids;
  std::vector<double> epsilons;

  SolverChoice solver = SolverChoice::exact;
  ToleranceMode tolerance_mode = ToleranceMode::relative;
  int prune_min_count = 0;
  RoundingMethod rounding = RoundingMethod::threshold;
  int randomized_draws = 64;
  long node_limit = 100000;
  int workers = 0;

  std::filesystem::path output_dir = "out";
};

/// Parses and validates; relative paths resolve against the config directory.
ExperimentConfig load_config(const std::filesystem::path& path);

/// Expands `0-45,47`-style id lists.
std::vector<int> parse_id_list(const std::string& text);

/// Builds the condition set (requires the mechanism for vector sizes) and
/// checks that train/holdout ids exist.
std::vector<Condition> materialize_conditions(const ExperimentConfig& config,
                                              const Mechanism& mech);

PipelineOptions pipeline_options(const ExperimentConfig& config);

}  // namespace crn
