#include "crn/cli.hpp"

#include <algorithm>
#include <functional>
#include <iostream>
#include <set>

#include "crn/digest.hpp"
#include "crn/error.hpp"
#include "crn/result_io.hpp"
#include "crn/trajectory_io.hpp"
#include "crn/util.hpp"
#include "crn/version.hpp"

namespace crn {

namespace {

std::string eps_tag(double epsilon) { return format_double(epsilon); }

std::filesystem::path traj_csv_path(const ExperimentConfig& cfg, int id) {
  return cfg.output_dir / ("traj_" + std::to_string(id) + ".csv");
}

std::filesystem::path traj_meta_path(const ExperimentConfig& cfg, int id) {
  return cfg.output_dir / ("traj_" + std::to_string(id) + ".meta");
}

Mechanism load_mechanism(const ExperimentConfig& cfg) {
  try {
    return parse_mechanism(read_file(cfg.mechanism_path));
  } catch (const ParseError& e) {
    throw ConfigError("mechanism '" + cfg.mechanism_path.string() + "': " + e.what());
  }
}

Trajectory load_trajectory(const ExperimentConfig& cfg, const Mechanism& mech, int id,
                           const std::string& mech_sha) {
  std::filesystem::path csv = traj_csv_path(cfg, id);
  std::filesystem::path meta_path = traj_meta_path(cfg, id);
  if (!std::filesystem::exists(csv) || !std::filesystem::exists(meta_path))
    throw ConfigError("trajectory for condition " + std::to_string(id) + " not found in '" +
                      cfg.output_dir.string() + "' (run `simulate` first)");
  TrajectoryMeta meta = parse_trajectory_meta(read_file(meta_path));
  if (meta.mechanism_sha256 != mech_sha)
    throw ConfigError("trajectory " + csv.string() +
                      " was generated from a different mechanism (sha256 mismatch)");
  Trajectory traj = parse_trajectory_csv(mech, read_file(csv));
  traj.condition_id = meta.condition_id;
  traj.dt = meta.dt;
  return traj;
}

std::vector<Trajectory> load_trajectories(const ExperimentConfig& cfg, const Mechanism& mech,
                                          const std::vector<int>& ids) {
  std::string mech_sha = sha256_file(cfg.mechanism_path);
  std::vector<Trajectory> out;
  out.reserve(ids.size());
  for (int id : ids) out.push_back(load_trajectory(cfg, mech, id, mech_sha));
  return out;
}

}  // namespace

void cmd_simulate(const ExperimentConfig& cfg, std::ostream& out) {
  Mechanism mech = load_mechanism(cfg);
  std::vector<Condition> conds = materialize_conditions(cfg, mech);
  NoiseSpec noise{cfg.sigma, cfg.seed};
  std::vector<Trajectory> trajs =
      generate_dataset(mech, conds, cfg.dt, cfg.T, cfg.substeps, noise, cfg.overflow_bound);

  std::filesystem::create_directories(cfg.output_dir);
  const std::string mech_sha = sha256_file(cfg.mechanism_path);
  for (const Trajectory& traj : trajs) {
    TrajectoryMeta meta;
    meta.condition_id = traj.condition_id;
    meta.dt = cfg.dt;
    meta.T = cfg.T;
    meta.substeps = cfg.substeps;
    meta.sigma = cfg.sigma;
    meta.seed = cfg.seed;
    meta.mechanism_sha256 = mech_sha;
    meta.config_sha256 = cfg.config_sha256;
    meta.tool_version = kToolVersion;
    write_file(traj_csv_path(cfg, traj.condition_id), trajectory_csv(mech, traj));
    write_file(traj_meta_path(cfg, traj.condition_id), trajectory_meta_text(meta));
    out << "wrote " << traj_csv_path(cfg, traj.condition_id).string() << " (T=" << cfg.T
        << ", clips=" << traj.clip_count << ")\n";
  }
}

int cmd_reduce(const ExperimentConfig& cfg, std::ostream& out) {
  Mechanism mech = load_mechanism(cfg);
  materialize_conditions(cfg, mech);  // validates ids against the condition set
  if (cfg.train_ids.empty()) throw ConfigError("reduce: empty training set");
  std::vector<Trajectory> training = load_trajectories(cfg, mech, cfg.train_ids);

  PipelineOptions opts = pipeline_options(cfg);
  SweepResult sweep = sweep_epsilon(mech, training, cfg.epsilons, opts);

  std::filesystem::create_directories(cfg.output_dir);
  std::vector<double> sorted_eps(cfg.epsilons);
  std::sort(sorted_eps.begin(), sorted_eps.end());
  out << "epsilon,union_size,support_size,violations,steps\n";
  for (double epsilon : sorted_eps) {
    auto it = sweep.results.find(epsilon);
    if (it == sweep.results.end()) {
      out << eps_tag(epsilon) << ",error: " << sweep.errors.at(epsilon) << "\n";
      continue;
    }
    const ReductionResult& result = it->second;
    AuditReport audit =
        audit_bound(mech, training, result, epsilon, cfg.tolerance_mode, kFeasTol);
    write_file(cfg.output_dir / ("result_eps" + eps_tag(epsilon) + ".txt"),
               reduction_result_text(result, cfg.config_sha256, kToolVersion));
    write_file(cfg.output_dir / ("audit_eps" + eps_tag(epsilon) + ".csv"),
               audit_csv(audit, cfg.config_sha256, kToolVersion));
    out << eps_tag(epsilon) << "," << result.union_support.size() << ","
        << result.support.size() << "," << audit.violation_count << "," << audit.rows.size()
        << "\n";
    if (result.node_limit_hits > 0)
      out << "# warning: " << result.node_limit_hits
          << " step(s) hit the node limit; their supports are incumbents, not proven optima\n";
  }
  return sweep.errors.empty() ? kExitOk : kExitSolver;
}

void cmd_validate(const ExperimentConfig& cfg,
                  const std::optional<std::filesystem::path>& result_path, std::ostream& out) {
  Mechanism mech = load_mechanism(cfg);
  materialize_conditions(cfg, mech);
  if (cfg.holdout_ids.empty()) throw ConfigError("validate: empty holdout set");
  std::vector<Trajectory> holdout = load_trajectories(cfg, mech, cfg.holdout_ids);

  std::vector<std::filesystem::path> result_files;
  if (result_path) {
    if (!std::filesystem::exists(*result_path))
      throw ConfigError("result file '" + result_path->string() + "' does not exist");
    result_files.push_back(*result_path);
  } else {
    std::vector<double> sorted_eps(cfg.epsilons);
    std::sort(sorted_eps.begin(), sorted_eps.end());
    for (double epsilon : sorted_eps) {
      std::filesystem::path p = cfg.output_dir / ("result_eps" + eps_tag(epsilon) + ".txt");
      if (!std::filesystem::exists(p))
        throw ConfigError("result file '" + p.string() + "' does not exist (run `reduce` first)");
      result_files.push_back(p);
    }
  }

  out << "epsilon,holdout_steps,violations,satisfied_fraction,max_ratio\n";
  for (const std::filesystem::path& file : result_files) {
    ReductionResult result = parse_reduction_result(read_file(file));
    std::set<int> training_conditions;
    for (const StepRecord& rec : result.steps) training_conditions.insert(rec.condition_id);
    for (int id : cfg.holdout_ids)
      if (training_conditions.count(id))
        throw ConfigError("holdout condition " + std::to_string(id) +
                          " was in the training set of '" + file.string() + "'");

    AuditReport audit = validate_holdout(mech, holdout, result, result.epsilon,
                                         result.tolerance_mode, kFeasTol);
    const std::string tag = eps_tag(result.epsilon);
    write_file(cfg.output_dir / ("holdout_audit_eps" + tag + ".csv"),
               audit_csv(audit, cfg.config_sha256, kToolVersion));
    for (int id : cfg.holdout_ids)
      write_file(cfg.output_dir / ("curve_eps" + tag + "_cond" + std::to_string(id) + ".csv"),
                 curve_csv(audit, id, cfg.config_sha256, kToolVersion));
    out << tag << "," << audit.rows.size() << "," << audit.violation_count << ","
        << format_double(audit.satisfied_fraction()) << "," << format_double(audit.max_ratio)
        << "\n";
  }
}

int run_command(const std::function<int()>& body, std::ostream& err) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitSolver;
  }
}

}  // namespace crn
