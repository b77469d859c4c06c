#include "crn/relaxed_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "crn/error.hpp"

namespace crn {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Largest squared singular value of A, estimated by power iteration on the
// small Gram matrix A A^T and inflated to stay an upper bound.
double spectral_norm_sq(const Matd& a) {
  if (a.rows() == 0 || a.cols() == 0) return 0.0;
  Matd gram = a * a.transpose();
  Vecd v = Vecd::Ones(gram.rows());
  v.normalize();
  double value = 0.0;
  for (int it = 0; it < 500; ++it) {
    Vecd u = gram * v;
    double n = u.norm();
    if (n == 0.0) return 0.0;
    double next = v.dot(u);
    v = u / n;
    if (std::abs(next - value) <= 1e-13 * std::max(1.0, next)) {
      value = next;
      break;
    }
    value = next;
  }
  return value * 1.05;
}

struct InnerResult {
  long iterations = 0;
  bool converged = false;
};

// Minimizes F(w) = c_ones * sum(w) + lambda ||b - A w||^2 over the box with
// accelerated projected gradient (fixed step 1/L, adaptive restart). The
// reported convergence is the plain projected-gradient residual at w, checked
// periodically, so the stopping semantics match an unaccelerated method.
InnerResult inner_minimize(const Matd& a, const Vecd& b, double lambda, double c_ones,
                           const Vecd& lo, const Vecd& hi, double lip, long max_iter,
                           double stop_tol, Vecd& w) {
  InnerResult res;
  const double step = 1.0 / std::max(lip, 1e-18);
  const int n = static_cast<int>(w.size());
  const Vecd c = Vecd::Constant(n, c_ones);

  auto grad_at = [&](const Vecd& v) -> Vecd { return c - 2.0 * lambda * (a.transpose() * (b - a * v)); };
  auto stationary = [&](const Vecd& v, const Vecd& g) {
    Vecd next = (v - step * g).cwiseMax(lo).cwiseMin(hi);
    return (v - next).cwiseAbs().maxCoeff() <=
           stop_tol * step * std::max(1.0, g.cwiseAbs().maxCoeff());
  };

  Vecd y = w;
  Vecd w_prev = w;
  double theta = 1.0;
  while (res.iterations < max_iter) {
    Vecd g = grad_at(y);
    Vecd w_new = (y - step * g).cwiseMax(lo).cwiseMin(hi);
    ++res.iterations;

    bool restart = g.dot(w_new - w) > 0.0;  // momentum fights descent
    w_prev = w;
    w = w_new;
    if (restart) {
      theta = 1.0;
      y = w;
    } else {
      double theta_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
      y = w + ((theta - 1.0) / theta_next) * (w - w_prev);
      theta = theta_next;
    }

    if (res.iterations % 8 == 0 || (w - w_prev).cwiseAbs().maxCoeff() == 0.0) {
      Vecd gw = grad_at(w);
      if (stationary(w, gw)) {
        res.converged = true;
        return res;
      }
    }
  }
  res.converged = stationary(w, grad_at(w));
  return res;
}

// Valid lower bound on min over the box of sum(w) + lambda(||b-Aw||^2 - tau^2),
// from the supporting hyperplane at w: the linearization's box minimum cannot
// exceed the true minimum. Weak duality then bounds the constrained optimum.
double dual_certificate(const Matd& a, const Vecd& b, double lambda, double tau_sq,
                        const Vecd& lo, const Vecd& hi, const Vecd& w) {
  Vecd r = b - a * w;
  double lag = w.sum() + lambda * (r.squaredNorm() - tau_sq);
  Vecd grad = Vecd::Ones(w.size()) - 2.0 * lambda * (a.transpose() * r);
  double corr = 0.0;
  for (int i = 0; i < w.size(); ++i)
    corr += grad[i] >= 0.0 ? grad[i] * (lo[i] - w[i]) : grad[i] * (hi[i] - w[i]);
  return lag + corr;
}

// Lower bound on min over the box of ||b - A w||^2, same linearization trick.
double residual_certificate(const Matd& a, const Vecd& b, const Vecd& lo, const Vecd& hi,
                            const Vecd& w) {
  Vecd r = b - a * w;
  double q = r.squaredNorm();
  Vecd grad = -2.0 * (a.transpose() * r);
  double corr = 0.0;
  for (int i = 0; i < w.size(); ++i)
    corr += grad[i] >= 0.0 ? grad[i] * (lo[i] - w[i]) : grad[i] * (hi[i] - w[i]);
  return q + corr;
}

double stationarity_residual(const Matd& a, const Vecd& b, double lambda, const Vecd& lo,
                             const Vecd& hi, double lip, const Vecd& w) {
  const double step = 1.0 / std::max(lip, 1e-18);
  Vecd r = b - a * w;
  Vecd grad = Vecd::Ones(w.size()) - 2.0 * lambda * (a.transpose() * r);
  Vecd w_next = (w - step * grad).cwiseMax(lo).cwiseMin(hi);
  double pg = (w - w_next).cwiseAbs().maxCoeff() / step;
  return pg / std::max(1.0, grad.cwiseAbs().maxCoeff());
}

}  // namespace

RelaxedSolution solve_step_relaxed(const StepProblem& p, const RelaxedOptions& opts) {
  const int n = p.num_reactions();
  Vecd lo = opts.lower.size() ? opts.lower : Vecd::Zero(n);
  Vecd hi = opts.upper.size() ? opts.upper : Vecd::Ones(n);
  if (lo.size() != n || hi.size() != n) throw Error("solve_step_relaxed: box size mismatch");
  for (int i = 0; i < n; ++i)
    if (lo[i] > hi[i]) throw Error("solve_step_relaxed: empty box");

  // Zero columns cannot help the residual; pin them to their lower bound.
  for (int i = 0; i < n; ++i)
    if (p.A.col(i).norm() == 0.0) hi[i] = lo[i];

  const double tau_eff = p.tau + opts.feas_tol;
  const double tau_sq = tau_eff * tau_eff;
  const double sigma_sq = spectral_norm_sq(p.A);

  RelaxedSolution sol;
  sol.w.kind = SelectionKind::fractional;
  sol.w.origin = SelectionOrigin::relaxed;
  sol.certified_lower_bound = lo.sum();  // sum(w) >= sum(lo) over the box

  auto residual_of = [&](const Vecd& w) { return (p.b - p.A * w).norm(); };

  auto finish = [&](const Vecd& w, double lambda, RelaxedStatus status) {
    sol.w.w = w;
    sol.objective = w.sum();
    sol.residual = residual_of(w);
    sol.lambda = lambda;
    double stat = stationarity_residual(p.A, p.b, lambda, lo, hi, 2.0 * lambda * sigma_sq, w);
    double cs = lambda > 0.0 ? std::abs(sol.residual - tau_eff) / std::max(1.0, tau_eff)
                             : std::max(0.0, sol.residual - tau_eff) / std::max(1.0, tau_eff);
    sol.kkt_residual = stat + cs;
    if (status == RelaxedStatus::converged &&
        !(sol.kkt_residual <= opts.tol && sol.residual <= tau_eff))
      status = RelaxedStatus::max_iter;
    sol.status = status;
    return sol;
  };

  // The box minimum of the objective is w = lo; if it already satisfies the
  // constraint the problem is solved.
  if (residual_of(lo) <= tau_eff) {
    sol.w.w = lo;
    sol.objective = lo.sum();
    sol.residual = residual_of(lo);
    sol.kkt_residual = 0.0;
    sol.lambda = 0.0;
    sol.status = RelaxedStatus::converged;
    return sol;
  }

  const double tight_tol = opts.tol / 2.0;
  const double loose_tol = std::max(tight_tol, 1e-4);
  Vecd w = opts.warm_start.size() == n ? Vecd(opts.warm_start.cwiseMax(lo).cwiseMin(hi)) : lo;
  bool inner_ok = true;

  auto solve_at = [&](double lambda, double tol_stage) {
    InnerResult ir = inner_minimize(p.A, p.b, lambda, 1.0, lo, hi, 2.0 * lambda * sigma_sq,
                                    opts.max_iter, tol_stage, w);
    sol.iterations += ir.iterations;
    if (tol_stage <= tight_tol) inner_ok = inner_ok && ir.converged;
    sol.certified_lower_bound = std::max(
        sol.certified_lower_bound, dual_certificate(p.A, p.b, lambda, tau_sq, lo, hi, w));
    return residual_of(w);
  };

  // Bracket the critical multiplier: residual(w(lambda)) decreases in lambda.
  double lambda_lo = 0.0, lambda_hi = 0.0;
  bool bracketed = false;
  double start = opts.lambda_hint > 0.0 ? opts.lambda_hint : 1.0;
  if (solve_at(start, loose_tol) <= tau_eff) {
    lambda_hi = start;
    bracketed = true;
    for (double lambda = start / 4.0; lambda > start * 1e-12; lambda /= 4.0) {
      if (solve_at(lambda, loose_tol) <= tau_eff) {
        lambda_hi = lambda;
      } else {
        lambda_lo = lambda;
        break;
      }
    }
  } else {
    lambda_lo = start;
    for (double lambda = start * 4.0; lambda <= opts.lambda_cap; lambda *= 4.0) {
      if (solve_at(lambda, loose_tol) <= tau_eff) {
        lambda_hi = lambda;
        bracketed = true;
        break;
      }
      lambda_lo = lambda;
    }
  }

  if (!bracketed) {
    // Drive the residual itself to its box minimum to decide feasibility.
    Vecd wq = w;
    InnerResult ir = inner_minimize(p.A, p.b, 1.0, 0.0, lo, hi, 2.0 * sigma_sq, opts.max_iter,
                                    tight_tol, wq);
    sol.iterations += ir.iterations;
    double qcert = residual_certificate(p.A, p.b, lo, hi, wq);
    if ((p.b - p.A * wq).norm() <= tau_eff)
      return finish(wq, opts.lambda_cap, RelaxedStatus::converged);
    sol.certified_infeasible = qcert > tau_sq;
    if (sol.certified_infeasible) sol.certified_lower_bound = kInf;
    finish(wq, opts.lambda_cap, RelaxedStatus::infeasible);
    sol.status = RelaxedStatus::infeasible;
    return sol;
  }

  // Geometric bisection at the loose tolerance narrows the bracket cheaply.
  Vecd w_feas = w;
  for (int it = 0; it < 80 && lambda_hi > 1.05 * std::max(lambda_lo, 1e-300); ++it) {
    double lambda_mid =
        lambda_lo == 0.0 ? lambda_hi / 2.0 : std::sqrt(lambda_lo * lambda_hi);
    if (solve_at(lambda_mid, loose_tol) <= tau_eff) {
      lambda_hi = lambda_mid;
      w_feas = w;
    } else {
      lambda_lo = lambda_mid;
    }
  }

  // Tight polish on the feasible side; nudge lambda up if the accurate
  // solution drifts across the boundary.
  const double window = tight_tol * std::max(1.0, tau_eff);
  w = w_feas;
  double res = solve_at(lambda_hi, tight_tol);
  for (int attempt = 0; attempt < 60 && res > tau_eff; ++attempt) {
    lambda_hi *= 1.05;
    res = solve_at(lambda_hi, tight_tol);
  }
  if (res > tau_eff) return finish(w, lambda_hi, RelaxedStatus::max_iter);
  w_feas = w;
  // If the polished point sits too deep inside the ball, bisect tightly until
  // the complementary-slackness window is met.
  for (int it = 0; it < 200 && res < tau_eff - window; ++it) {
    if (lambda_hi <= (1.0 + 1e-13) * std::max(lambda_lo, 1e-300)) break;
    double lambda_mid =
        lambda_lo == 0.0 ? lambda_hi / 2.0 : std::sqrt(lambda_lo * lambda_hi);
    double mid_res = solve_at(lambda_mid, tight_tol);
    if (mid_res <= tau_eff) {
      lambda_hi = lambda_mid;
      w_feas = w;
      res = mid_res;
    } else {
      lambda_lo = lambda_mid;
      w = w_feas;
    }
  }

  return finish(w_feas, lambda_hi,
                inner_ok ? RelaxedStatus::converged : RelaxedStatus::max_iter);
}

namespace {

std::vector<int> nonzero_columns(const StepProblem& p) {
  std::vector<int> out;
  for (int i = 0; i < p.num_reactions(); ++i)
    if (p.A.col(i).norm() > 0.0) out.push_back(i);
  return out;
}

bool support_feasible(const StepProblem& p, const std::set<int>& support, double feas_tol) {
  Vecd r = p.b;
  for (int i : support) r -= p.A.col(i);
  return r.norm() <= p.tau + feas_tol;
}

// Adds the residual-minimizing reaction until feasible; candidates restricted
// to nonzero columns.
std::set<int> greedy_complete(const StepProblem& p, std::set<int> support,
                              const std::vector<int>& candidates, double feas_tol) {
  Vecd r = p.b;
  for (int i : support) r -= p.A.col(i);
  while (r.norm() > p.tau + feas_tol) {
    int best = -1;
    double best_norm = kInf;
    for (int i : candidates) {
      if (support.count(i)) continue;
      double n = (r - p.A.col(i)).norm();
      if (n < best_norm) {
        best_norm = n;
        best = i;
      }
    }
    if (best < 0)
      throw InfeasibleError("rounding: instance infeasible even at full support (condition " +
                            std::to_string(p.condition_id) + ", t=" + std::to_string(p.t) + ")");
    support.insert(best);
    r -= p.A.col(best);
  }
  return support;
}

}  // namespace

SelectionVector round_threshold(const SelectionVector& sel, const StepProblem& p,
                                std::span<const double> theta_grid, double feas_tol) {
  const int n = p.num_reactions();
  if (sel.w.size() != n) throw Error("round_threshold: selection size mismatch");
  static const double default_grid[] = {0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3, 0.2, 0.1};
  if (theta_grid.empty()) theta_grid = default_grid;

  const std::vector<int> candidates = nonzero_columns(p);
  bool found = false;
  std::set<int> best;
  std::set<int> largest;
  for (double theta : theta_grid) {
    std::set<int> support;
    for (int i : candidates)
      if (sel.w[i] >= theta) support.insert(i);
    if (support.size() > largest.size()) largest = support;
    if (support_feasible(p, support, feas_tol) && (!found || support.size() < best.size())) {
      best = support;
      found = true;
    }
  }
  if (!found) best = greedy_complete(p, largest, candidates, feas_tol);
  return make_binary(best, n, SelectionOrigin::rounded_threshold);
}

SelectionVector round_randomized(const SelectionVector& sel, const StepProblem& p, int draws,
                                 std::uint64_t seed, double feas_tol) {
  const int n = p.num_reactions();
  if (sel.w.size() != n) throw Error("round_randomized: selection size mismatch");
  if (draws < 1) throw Error("round_randomized: draws must be >= 1");

  const std::vector<int> candidates = nonzero_columns(p);
  std::mt19937_64 engine(seed);
  bool found = false;
  std::vector<int> best;
  for (int d = 0; d < draws; ++d) {
    std::vector<int> support;
    for (int i = 0; i < n; ++i) {
      std::bernoulli_distribution bern(sel.w[i]);
      bool on = bern(engine);
      if (on && p.A.col(i).norm() > 0.0) support.push_back(i);
    }
    std::set<int> as_set(support.begin(), support.end());
    if (!support_feasible(p, as_set, feas_tol)) continue;
    if (!found || support.size() < best.size() ||
        (support.size() == best.size() &&
         std::lexicographical_compare(support.begin(), support.end(), best.begin(), best.end()))) {
      best = support;
      found = true;
    }
  }
  if (!found) return round_threshold(sel, p, {}, feas_tol);
  return make_binary(std::set<int>(best.begin(), best.end()), n,
                     SelectionOrigin::rounded_randomized);
}

}  // namespace crn
