#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "crn/mechanism.hpp"
#include "crn/simulate.hpp"

namespace crn {

/// Trajectory CSV: header `t,X_<s1>,...,X_<sN>,r_1,...,r_Nr`; row t holds X_t
/// then r_t; the final row holds X_{T+1} with empty rate fields. Numbers are
/// written shortest-round-trip so read-back is bit exact.
std::string trajectory_csv(const Mechanism& mech, const Trajectory& traj);

Trajectory parse_trajectory_csv(const Mechanism& mech, const std::string& text);

struct TrajectoryMeta {
  int condition_id = 0;
  double dt = 0.0;
  int T = 0;
  int substeps = 1;
  double sigma = 0.0;
  std::uint64_t seed = 0;
  std::string mechanism_sha256;
  // Provenance for the producing run.
  std::string config_sha256;
  std::string tool_version;
};

std::string trajectory_meta_text(const TrajectoryMeta& meta);
TrajectoryMeta parse_trajectory_meta(const std::string& text);

void write_file(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

}  // namespace crn
