#pragma once

#include <cstdint>
#include <span>

#include "crn/step_problem.hpp"
#include "crn/types.hpp"

namespace crn {

enum class RelaxedStatus { converged, max_iter, infeasible };

struct RelaxedOptions {
  double tol = 1e-8;       // KKT tolerance at convergence
  long max_iter = 100000;  // inner projected-gradient iterations per multiplier
  double feas_tol = kFeasTol;
  double lambda_cap = 1e12;
  double lambda_hint = 0.0;  // start the multiplier bracket here (0 = none)

  // Per-coordinate box; empty means 0 / 1. The branch-and-bound pins
  // coordinates by setting lower == upper.
  Vecd lower;
  Vecd upper;
  Vecd warm_start;
};

struct RelaxedSolution {
  SelectionVector w;  // fractional, inside the box
  double objective = 0.0;
  double kkt_residual = 0.0;
  long iterations = 0;
  RelaxedStatus status = RelaxedStatus::max_iter;
  double residual = 0.0;  // ||b - A w||
  double lambda = 0.0;    // final dual multiplier

  // Certified lower bound on the box-relaxation optimum against the slackened
  // constraint ||b - A w|| <= tau + feas_tol; valid whatever the iterate
  // quality, +inf when infeasibility is certified. This is what the exact
  // solver prunes with.
  double certified_lower_bound = 0.0;
  bool certified_infeasible = false;
};

/// Solves min sum(w) s.t. ||b - A w|| <= tau + feas_tol, w in the box, by
/// bisection on the Lagrange multiplier of the squared constraint; each inner
/// problem is minimized by projected gradient with fixed step 1/L, where
/// L = 2 lambda ||A||_2^2 comes from power iteration. Deterministic.
RelaxedSolution solve_step_relaxed(const StepProblem& p, const RelaxedOptions& opts = {});

inline RelaxedSolution solve_step_relaxed(const StepProblem& p, double tol, long max_iter) {
  RelaxedOptions opts;
  opts.tol = tol;
  opts.max_iter = max_iter;
  return solve_step_relaxed(p, opts);
}

/// Thresholds w at each theta in the grid (default 0.9, 0.8, ..., 0.1),
/// keeps the smallest-cardinality feasible support; if none is feasible,
/// greedily completes the largest support by residual decrease. Zero columns
/// are never selected.
SelectionVector round_threshold(const SelectionVector& sel, const StepProblem& p,
                                std::span<const double> theta_grid = {},
                                double feas_tol = kFeasTol);

/// Draws Bernoulli(w_i) samples (seeded) and returns the smallest-cardinality
/// feasible draw (lexicographic tie-break); falls back to round_threshold when
/// no draw is feasible.
SelectionVector round_randomized(const SelectionVector& sel, const StepProblem& p, int draws,
                                 std::uint64_t seed, double feas_tol = kFeasTol);

}  // namespace crn
