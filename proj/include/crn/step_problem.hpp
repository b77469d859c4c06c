#pragma once

#include <set>
#include <string>
#include <vector>

#include "crn/mechanism.hpp"
#include "crn/simulate.hpp"
#include "crn/types.hpp"

namespace crn {

enum class SelectionKind { binary, fractional };

enum class SelectionOrigin {
  exact,
  relaxed,
  rounded_threshold,
  rounded_randomized,
  union_reduction,
};

/// Per-reaction selection weights in [0,1]. kind=binary means every entry is
/// exactly 0 or 1.
struct SelectionVector {
  Vecd w;
  SelectionKind kind = SelectionKind::binary;
  SelectionOrigin origin = SelectionOrigin::exact;
};

SelectionVector make_binary(const std::set<int>& support, int nr, SelectionOrigin origin);
SelectionVector ones_selection(int nr);
SelectionVector zeros_selection(int nr);
std::set<int> support_of(const SelectionVector& sel);
int cardinality_of(const SelectionVector& sel);  // binary only

enum class ToleranceMode { relative, paper_literal };

std::string to_string(ToleranceMode mode);

/// One per-(t, condition) selection instance in linear-algebra form:
/// minimize the selected-reaction count subject to ||b - A w|| <= tau,
/// where column i of A is M_i * r_it * dt and b = X_{t+1} - X_t.
struct StepProblem {
  Matd A;
  Vecd b;
  double tau = 0.0;
  int t = 0;  // 1-based time index
  int condition_id = 0;

  // Diagnostics recorded by the assembler.
  bool degenerate = false;         // zero rate norm with unexplainable b (or paper-literal 0-div)
  bool infeasible_at_full = false; // even w = 1 misses the tolerance
  double full_residual = 0.0;      // ||b - A 1||
  double rate_norm = 0.0;          // N_t = ||r_t|| * dt

  int num_reactions() const { return static_cast<int>(A.cols()); }
};

/// ||X_{t+1} - X_t - M (w o r_t) dt|| for 1 <= t <= T. Accepts fractional w.
double fitting_error(const Mechanism& mech, const Trajectory& traj, int t,
                     const SelectionVector& sel);

/// N_t = ||r_t||_2 * dt.
double normalization(const Trajectory& traj, int t);

/// Builds the instance for step t. tau = epsilon * N_t in relative mode
/// (default) and epsilon / N_t in paper-literal mode. Steps with N_t = 0 are
/// flagged degenerate unless b = 0 explains them (relative mode).
StepProblem assemble_step_problem(const Mechanism& mech, const Trajectory& traj, int t,
                                  double epsilon, ToleranceMode mode = ToleranceMode::relative);

double residual_norm(const StepProblem& p, const Vecd& w);

inline bool is_feasible(const StepProblem& p, const Vecd& w, double feas_tol = kFeasTol) {
  return residual_norm(p, w) <= p.tau + feas_tol;
}

/// Debug CSV with the raw (A, b, tau) data for solver cross-checks.
std::string step_problem_csv(const StepProblem& p);

}  // namespace crn
