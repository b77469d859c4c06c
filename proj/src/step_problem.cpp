#include "crn/step_problem.hpp"

#include <cmath>

#include "crn/error.hpp"
#include "crn/util.hpp"

namespace crn {

SelectionVector make_binary(const std::set<int>& support, int nr, SelectionOrigin origin) {
  SelectionVector sel;
  sel.w = Vecd::Zero(nr);
  for (int id : support) {
    if (id < 0 || id >= nr) throw Error("selection id " + std::to_string(id) + " out of range");
    sel.w[id] = 1.0;
  }
  sel.kind = SelectionKind::binary;
  sel.origin = origin;
  return sel;
}

SelectionVector ones_selection(int nr) {
  return {Vecd::Ones(nr), SelectionKind::binary, SelectionOrigin::exact};
}

SelectionVector zeros_selection(int nr) {
  return {Vecd::Zero(nr), SelectionKind::binary, SelectionOrigin::exact};
}

std::set<int> support_of(const SelectionVector& sel) {
  std::set<int> out;
  for (int i = 0; i < sel.w.size(); ++i)
    if (sel.w[i] > 0.0) out.insert(i);
  return out;
}

int cardinality_of(const SelectionVector& sel) {
  if (sel.kind != SelectionKind::binary) throw Error("cardinality of a fractional selection");
  int n = 0;
  for (int i = 0; i < sel.w.size(); ++i)
    if (sel.w[i] == 1.0) ++n;
  return n;
}

std::string to_string(ToleranceMode mode) {
  return mode == ToleranceMode::relative ? "relative" : "paper-literal";
}

namespace {

void check_step_index(const Trajectory& traj, int t) {
  if (t < 1 || t > traj.num_steps())
    throw Error("step index t=" + std::to_string(t) + " out of range [1, " +
                std::to_string(traj.num_steps()) + "]");
}

}  // namespace

double fitting_error(const Mechanism& mech, const Trajectory& traj, int t,
                     const SelectionVector& sel) {
  check_step_index(traj, t);
  if (sel.w.size() != mech.num_reactions()) throw Error("fitting_error: selection size mismatch");
  const Vecd& x0 = traj.states[t - 1];
  const Vecd& x1 = traj.states[t];
  const Vecd& r = traj.rates[t - 1];
  Vecd masked = sel.w.cwiseProduct(r);
  return (x1 - x0 - (mech.M.cast<double>() * masked) * traj.dt).norm();
}

double normalization(const Trajectory& traj, int t) {
  check_step_index(traj, t);
  return traj.rates[t - 1].norm() * traj.dt;
}

StepProblem assemble_step_problem(const Mechanism& mech, const Trajectory& traj, int t,
                                  double epsilon, ToleranceMode mode) {
  check_step_index(traj, t);
  if (!(epsilon > 0.0)) throw Error("assemble_step_problem: epsilon must be positive");

  const Vecd& r = traj.rates[t - 1];
  StepProblem p;
  p.t = t;
  p.condition_id = traj.condition_id;
  p.b = traj.states[t] - traj.states[t - 1];
  p.A = mech.M.cast<double>() * (r * traj.dt).asDiagonal();
  p.rate_norm = r.norm() * traj.dt;

  if (mode == ToleranceMode::relative) {
    p.tau = epsilon * p.rate_norm;
    if (p.rate_norm == 0.0 && p.b.norm() > kFeasTol) p.degenerate = true;
  } else {
    if (p.rate_norm == 0.0) {
      p.degenerate = true;
      p.tau = 0.0;
    } else {
      p.tau = epsilon / p.rate_norm;
    }
  }

  p.full_residual = residual_norm(p, Vecd::Ones(mech.num_reactions()));
  p.infeasible_at_full = !p.degenerate && p.full_residual > p.tau + kFeasTol;
  return p;
}

double residual_norm(const StepProblem& p, const Vecd& w) {
  if (w.size() != p.A.cols()) throw Error("residual_norm: selection size mismatch");
  return (p.b - p.A * w).norm();
}

std::string step_problem_csv(const StepProblem& p) {
  std::string out = "condition_id,t,tau\n";
  out += std::to_string(p.condition_id) + "," + std::to_string(p.t) + "," +
         format_double(p.tau) + "\n";
  out += "A\n";
  for (int s = 0; s < p.A.rows(); ++s) {
    for (int i = 0; i < p.A.cols(); ++i) {
      if (i) out += ',';
      out += format_double(p.A(s, i));
    }
    out += '\n';
  }
  out += "b\n";
  for (int s = 0; s < p.b.size(); ++s) {
    if (s) out += ',';
    out += format_double(p.b[s]);
  }
  out += '\n';
  return out;
}

}  // namespace crn
