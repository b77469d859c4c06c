#pragma once

#include <optional>

#include "crn/relaxed_solver.hpp"
#include "crn/step_problem.hpp"

namespace crn {

enum class ExactStatus { optimal, infeasible, node_limit };

struct ExactSolution {
  SelectionVector w;  // binary
  int cardinality = 0;
  ExactStatus status = ExactStatus::infeasible;
  long nodes_explored = 0;
  double gap = 0.0;  // incumbent cardinality minus best outstanding bound
};

struct ExactLimits {
  long node_limit = 100000;
  double feas_tol = kFeasTol;
  // Bounding relaxation accuracy; bounds stay certified at any setting.
  double relax_tol = 1e-6;
  long relax_max_iter = 20000;
  bool debug_tree = false;  // dump node id / bound / fixings to stderr
};

/// Minimum-cardinality binary selection satisfying ||b - A w|| <= tau +
/// feas_tol, by best-first branch-and-bound. Bounds come from the certified
/// box-relaxation dual; zero columns are pre-fixed to 0; ties among
/// equal-cardinality optima break to the lexicographically smallest support.
ExactSolution solve_step_exact(const StepProblem& p, const ExactLimits& limits = {});

/// Enumerates supports by cardinality, lexicographic within each cardinality,
/// and returns the first feasible one; the independent reference for
/// solve_step_exact. Rejects instances with more than 20 reactions.
ExactSolution brute_force_oracle(const StepProblem& p, double feas_tol = kFeasTol);

/// Forward selection: repeatedly add the reaction that most decreases the
/// residual until feasible; nullopt when even the full support fails.
std::optional<SelectionVector> greedy_incumbent(const StepProblem& p,
                                                double feas_tol = kFeasTol);

}  // namespace crn
