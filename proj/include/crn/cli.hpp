#pragma once

#include <iosfwd>
#include <optional>

#include "crn/config.hpp"

namespace crn {

// Exit codes: 0 success, 1 infeasibility/solver failure, 2 config or I/O error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitSolver = 1;
inline constexpr int kExitConfig = 2;

/// Writes one trajectory CSV plus metadata sidecar per condition into
/// output_dir. Throws on simulator/config failures.
void cmd_simulate(const ExperimentConfig& config, std::ostream& out);

/// Reads the trajectories for the training ids, sweeps the configured
/// epsilons, and writes result_eps<e>.txt and audit_eps<e>.csv per epsilon.
/// Returns the exit code (a failed epsilon leaves the sweep running but the
/// command reports failure).
int cmd_reduce(const ExperimentConfig& config, std::ostream& out);

/// Audits stored reduction results on the holdout conditions and writes
/// holdout_audit_eps<e>.csv plus per-condition curve files (`t,D,bound`).
void cmd_validate(const ExperimentConfig& config,
                  const std::optional<std::filesystem::path>& result_path, std::ostream& out);

/// Maps exceptions to exit codes around a command body.
int run_command(const std::function<int()>& body, std::ostream& err);

}  // namespace crn
