#include "crn/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <thread>

#include "crn/error.hpp"

namespace crn {

std::string to_string(SolverChoice s) {
  return s == SolverChoice::exact ? "exact" : "relaxed";
}

namespace {

void parallel_for(int count, int workers, const std::function<void(int)>& fn) {
  if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
  workers = std::max(1, std::min(workers, count));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(count);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      while (true) {
        int i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  for (int i = 0; i < count; ++i)
    if (errors[i]) std::rethrow_exception(errors[i]);
}

std::uint64_t mix_seed(std::uint64_t seed, int condition_id, int t) {
  std::uint64_t h = seed;
  h ^= 0x9e3779b97f4a7c15ull + static_cast<std::uint64_t>(condition_id) + (h << 6) + (h >> 2);
  h ^= 0x9e3779b97f4a7c15ull + static_cast<std::uint64_t>(t) + (h << 6) + (h >> 2);
  return h;
}

}  // namespace

ReductionResult reduce(const Mechanism& mech, const std::vector<Trajectory>& training,
                       const PipelineOptions& opts) {
  if (training.empty()) throw Error("reduce: empty training set");
  if (opts.prune_min_count < 0) throw Error("reduce: prune_min_count must be >= 0");

  ReductionResult result;
  result.epsilon = opts.epsilon;
  result.tolerance_mode = opts.tolerance_mode;
  result.solver = opts.solver;
  result.prune_min_count = opts.prune_min_count;

  // Assemble every instance first: degenerate steps are set aside, and any
  // step that the full mechanism cannot explain within tau makes the whole
  // reduction ill-posed for this epsilon.
  struct Task {
    StepProblem problem;
  };
  std::vector<Task> tasks;
  std::vector<std::pair<int, int>> infeasible_at_full;
  for (const Trajectory& traj : training) {
    for (int t = 1; t <= traj.num_steps(); ++t) {
      StepProblem p = assemble_step_problem(mech, traj, t, opts.epsilon, opts.tolerance_mode);
      if (p.degenerate) {
        result.degenerate_steps.emplace_back(traj.condition_id, t);
        continue;
      }
      if (p.infeasible_at_full) {
        infeasible_at_full.emplace_back(traj.condition_id, t);
        continue;
      }
      tasks.push_back({std::move(p)});
    }
  }
  if (!infeasible_at_full.empty()) {
    std::ostringstream msg;
    msg << "reduce: full mechanism misses the tolerance at " << infeasible_at_full.size()
        << " step(s):";
    size_t shown = std::min<size_t>(infeasible_at_full.size(), 12);
    for (size_t i = 0; i < shown; ++i)
      msg << " (j=" << infeasible_at_full[i].first << ",t=" << infeasible_at_full[i].second
          << ")";
    if (shown < infeasible_at_full.size()) msg << " ...";
    msg << "; the data noise exceeds this epsilon budget - raise epsilon";
    throw InfeasibleError(msg.str());
  }

  std::vector<StepRecord> records(tasks.size());
  std::atomic<long> node_limit_hits{0};
  parallel_for(static_cast<int>(tasks.size()), opts.workers, [&](int i) {
    const StepProblem& p = tasks[i].problem;
    StepRecord rec;
    rec.condition_id = p.condition_id;
    rec.t = p.t;
    rec.tau = p.tau;
    if (opts.solver == SolverChoice::exact) {
      ExactLimits limits = opts.exact_limits;
      limits.feas_tol = opts.feas_tol;
      ExactSolution sol = solve_step_exact(p, limits);
      if (sol.status == ExactStatus::infeasible)
        throw InfeasibleError("reduce: step (j=" + std::to_string(p.condition_id) +
                              ",t=" + std::to_string(p.t) + ") infeasible");
      if (sol.status == ExactStatus::node_limit) ++node_limit_hits;
      rec.status = sol.status == ExactStatus::optimal ? "optimal" : "node_limit";
      auto s = support_of(sol.w);
      rec.support.assign(s.begin(), s.end());
      rec.cardinality = sol.cardinality;
    } else {
      RelaxedOptions ro = opts.relaxed_options;
      ro.feas_tol = opts.feas_tol;
      RelaxedSolution rs = solve_step_relaxed(p, ro);
      SelectionVector rounded =
          opts.rounding == RoundingMethod::threshold
              ? round_threshold(rs.w, p, {}, opts.feas_tol)
              : round_randomized(rs.w, p, opts.randomized_draws,
                                 mix_seed(opts.rounding_seed, p.condition_id, p.t),
                                 opts.feas_tol);
      rec.status = "rounded";
      auto s = support_of(rounded);
      rec.support.assign(s.begin(), s.end());
      rec.cardinality = static_cast<int>(rec.support.size());
    }
    records[i] = std::move(rec);
  });

  result.node_limit_hits = node_limit_hits.load();
  std::sort(records.begin(), records.end(), [](const StepRecord& a, const StepRecord& b) {
    return std::tie(a.condition_id, a.t) < std::tie(b.condition_id, b.t);
  });
  std::sort(result.degenerate_steps.begin(), result.degenerate_steps.end());

  for (StepRecord& rec : records) {
    for (int id : rec.support) {
      result.union_support.insert(id);
      ++result.frequency[id];
    }
    result.per_step_supports[{rec.condition_id, rec.t}] = rec.support;
  }
  for (int id : result.union_support)
    if (result.frequency[id] >= opts.prune_min_count) result.support.insert(id);
  result.steps = std::move(records);
  return result;
}

namespace {

AuditReport audit_impl(const Mechanism& mech, const std::vector<Trajectory>& trajectories,
                       const ReductionResult& result, double epsilon, ToleranceMode mode,
                       double feas_tol) {
  SelectionVector sel = make_binary(result.support, mech.num_reactions(),
                                    SelectionOrigin::union_reduction);
  AuditReport report;
  for (const Trajectory& traj : trajectories) {
    for (int t = 1; t <= traj.num_steps(); ++t) {
      StepProblem p = assemble_step_problem(mech, traj, t, epsilon, mode);
      if (p.degenerate) continue;
      AuditRow row;
      row.condition_id = traj.condition_id;
      row.t = t;
      row.fitting_error = residual_norm(p, sel.w);
      row.tau = p.tau;
      row.satisfied = row.fitting_error <= row.tau + feas_tol;
      if (!row.satisfied) ++report.violation_count;
      double ratio = row.tau > 0.0
                         ? row.fitting_error / row.tau
                         : (row.fitting_error <= feas_tol
                                ? 0.0
                                : std::numeric_limits<double>::infinity());
      report.max_ratio = std::max(report.max_ratio, ratio);
      report.rows.push_back(row);
    }
  }
  return report;
}

}  // namespace

AuditReport audit_bound(const Mechanism& mech, const std::vector<Trajectory>& trajectories,
                        const ReductionResult& result, double epsilon, ToleranceMode mode,
                        double feas_tol) {
  return audit_impl(mech, trajectories, result, epsilon, mode, feas_tol);
}

AuditReport validate_holdout(const Mechanism& mech, const std::vector<Trajectory>& holdout,
                             const ReductionResult& result, double epsilon, ToleranceMode mode,
                             double feas_tol) {
  return audit_impl(mech, holdout, result, epsilon, mode, feas_tol);
}

SweepResult sweep_epsilon(const Mechanism& mech, const std::vector<Trajectory>& training,
                          const std::vector<double>& epsilons, const PipelineOptions& base) {
  if (epsilons.empty()) throw Error("sweep_epsilon: no epsilons given");
  for (double e : epsilons)
    if (!(e > 0.0)) throw Error("sweep_epsilon: epsilons must be positive");
  {
    std::set<double> uniq(epsilons.begin(), epsilons.end());
    if (uniq.size() != epsilons.size()) throw Error("sweep_epsilon: duplicate epsilon");
  }

  SweepResult sweep;
  for (double epsilon : epsilons) {
    PipelineOptions opts = base;
    opts.epsilon = epsilon;
    try {
      sweep.results.emplace(epsilon, reduce(mech, training, opts));
    } catch (const Error& e) {
      sweep.errors.emplace(epsilon, e.what());
    }
  }

  // Feasible-set nesting: with optimal per-step solves, a larger tolerance can
  // never need more reactions at the same step.
  if (base.solver == SolverChoice::exact) {
    const ReductionResult* prev = nullptr;
    double prev_eps = 0.0;
    std::vector<double> sorted(epsilons);
    std::sort(sorted.begin(), sorted.end());
    for (double epsilon : sorted) {
      auto it = sweep.results.find(epsilon);
      if (it == sweep.results.end()) continue;
      if (prev) {
        std::map<std::pair<int, int>, const StepRecord*> prev_steps;
        for (const StepRecord& rec : prev->steps) prev_steps[{rec.condition_id, rec.t}] = &rec;
        for (const StepRecord& rec : it->second.steps) {
          auto pit = prev_steps.find({rec.condition_id, rec.t});
          if (pit == prev_steps.end()) continue;
          if (rec.status != "optimal" || pit->second->status != "optimal") continue;
          if (rec.cardinality > pit->second->cardinality)
            throw std::logic_error(
                "sweep_epsilon: per-step cardinality increased from epsilon=" +
                std::to_string(prev_eps) + " to " + std::to_string(epsilon) + " at (j=" +
                std::to_string(rec.condition_id) + ",t=" + std::to_string(rec.t) + ")");
        }
      }
      prev = &it->second;
      prev_eps = epsilon;
    }
  }
  return sweep;
}

}  // namespace crn
