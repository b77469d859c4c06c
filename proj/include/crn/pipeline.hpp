#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "crn/exact_solver.hpp"
#include "crn/relaxed_solver.hpp"
#include "crn/simulate.hpp"
#include "crn/step_problem.hpp"

namespace crn {

enum class SolverChoice { exact, relaxed };
enum class RoundingMethod { threshold, randomized };

std::string to_string(SolverChoice s);

struct PipelineOptions {
  double epsilon = 0.1;
  ToleranceMode tolerance_mode = ToleranceMode::relative;
  SolverChoice solver = SolverChoice::exact;
  int prune_min_count = 0;
  RoundingMethod rounding = RoundingMethod::threshold;
  int randomized_draws = 64;
  std::uint64_t rounding_seed = 0;
  int workers = 0;  // 0 = hardware concurrency
  double feas_tol = kFeasTol;
  ExactLimits exact_limits;
  RelaxedOptions relaxed_options;
};

/// Per-step solve record; status is the exact-solver status or "rounded" for
/// the relaxed path.
struct StepRecord {
  int condition_id = 0;
  int t = 0;
  std::vector<int> support;
  int cardinality = 0;
  std::string status;
  double tau = 0.0;
};

struct ReductionResult {
  std::set<int> support;                   // after pruning
  std::set<int> union_support;             // before pruning
  std::map<std::pair<int, int>, std::vector<int>> per_step_supports;  // (condition, t)
  std::map<int, int> frequency;            // reaction id -> (t, j) appearances
  std::vector<std::pair<int, int>> degenerate_steps;
  std::vector<StepRecord> steps;
  double epsilon = 0.0;
  ToleranceMode tolerance_mode = ToleranceMode::relative;
  SolverChoice solver = SolverChoice::exact;
  int prune_min_count = 0;
  long node_limit_hits = 0;
};

struct AuditRow {
  int condition_id = 0;
  int t = 0;
  double fitting_error = 0.0;
  double tau = 0.0;
  bool satisfied = false;
};

struct AuditReport {
  std::vector<AuditRow> rows;
  int violation_count = 0;
  double max_ratio = 0.0;

  double satisfied_fraction() const {
    return rows.empty() ? 1.0
                        : 1.0 - static_cast<double>(violation_count) / rows.size();
  }
};

/// Solves one selection instance per (condition, t), unions the supports, and
/// applies frequency pruning. Degenerate steps are skipped and listed. Steps
/// infeasible even at full support abort with the offending (j, t) list.
ReductionResult reduce(const Mechanism& mech, const std::vector<Trajectory>& training,
                       const PipelineOptions& opts);

inline ReductionResult reduce(const Mechanism& mech, const std::vector<Trajectory>& training,
                              double epsilon, SolverChoice solver, int prune_min_count) {
  PipelineOptions opts;
  opts.epsilon = epsilon;
  opts.solver = solver;
  opts.prune_min_count = prune_min_count;
  return reduce(mech, training, opts);
}

/// Recomputes the union-support fitting error at every non-degenerate step and
/// compares it to the per-step tolerance. The Eq.-(6)-style union is audited
/// empirically: support growth does not provably keep the residual down when
/// omitted contributions cancel in sign, so violations are reported, never
/// assumed away.
AuditReport audit_bound(const Mechanism& mech, const std::vector<Trajectory>& trajectories,
                        const ReductionResult& result, double epsilon, ToleranceMode mode,
                        double feas_tol = kFeasTol);

/// audit_bound on held-out conditions; rows double as plot-ready (t, D, tau)
/// curves per condition.
AuditReport validate_holdout(const Mechanism& mech, const std::vector<Trajectory>& holdout,
                             const ReductionResult& result, double epsilon, ToleranceMode mode,
                             double feas_tol = kFeasTol);

struct SweepResult {
  std::map<double, ReductionResult> results;
  std::map<double, std::string> errors;  // per-epsilon failures; sweep continues
};

/// Runs reduce per epsilon. With the exact solver, per-step optimal
/// cardinalities are checked to be nonincreasing in epsilon (feasible-set
/// nesting); a violation is a solver bug and throws.
SweepResult sweep_epsilon(const Mechanism& mech, const std::vector<Trajectory>& training,
                          const std::vector<double>& epsilons, const PipelineOptions& base);

}  // namespace crn
