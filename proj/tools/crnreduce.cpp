#include <CLI11.hpp>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "crn/cli.hpp"
#include "crn/error.hpp"
#include "crn/version.hpp"

namespace {

struct Overrides {
  std::vector<double> epsilons;
  std::string solver;
  std::string tolerance_mode;
  int workers = -1;
  std::string output_dir;
};

void add_common(CLI::App* cmd, std::string& config_path, Overrides& ov) {
  cmd->add_option("--config", config_path, "experiment config file")->required();
  cmd->add_option("--epsilon", ov.epsilons, "override the config epsilon list");
  cmd->add_option("--solver", ov.solver, "exact|relaxed")
      ->check(CLI::IsMember({"exact", "relaxed"}));
  cmd->add_option("--tolerance-mode", ov.tolerance_mode, "relative|paper-literal")
      ->check(CLI::IsMember({"relative", "paper-literal"}));
  cmd->add_option("--workers", ov.workers, "worker threads (default: processor count)");
  cmd->add_option("--output-dir", ov.output_dir, "override the config output directory");
}

crn::ExperimentConfig load_with_overrides(const std::string& config_path, const Overrides& ov) {
  crn::ExperimentConfig cfg = crn::load_config(config_path);
  if (!ov.epsilons.empty()) cfg.epsilons = ov.epsilons;
  if (ov.solver == "exact") cfg.solver = crn::SolverChoice::exact;
  if (ov.solver == "relaxed") cfg.solver = crn::SolverChoice::relaxed;
  if (ov.tolerance_mode == "relative") cfg.tolerance_mode = crn::ToleranceMode::relative;
  if (ov.tolerance_mode == "paper-literal")
    cfg.tolerance_mode = crn::ToleranceMode::paper_literal;
  if (ov.workers >= 0) cfg.workers = ov.workers;
  if (!ov.output_dir.empty()) cfg.output_dir = ov.output_dir;
  for (double e : cfg.epsilons)
    if (!(e > 0.0)) throw crn::ConfigError("epsilons must be positive");
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learns reduced reaction mechanisms from trajectory data"};
  app.set_version_flag("--version", std::string(crn::kToolVersion));
  app.require_subcommand(1);

  std::string config_path;
  Overrides ov;
  std::string result_path;

  CLI::App* simulate = app.add_subcommand("simulate", "generate trajectory data");
  add_common(simulate, config_path, ov);

  CLI::App* reduce = app.add_subcommand("reduce", "learn the reduced mechanism");
  add_common(reduce, config_path, ov);

  CLI::App* validate = app.add_subcommand("validate", "audit results on holdout conditions");
  add_common(validate, config_path, ov);
  validate->add_option("--result", result_path, "audit a single stored result file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : crn::kExitConfig;
  }

  return crn::run_command(
      [&]() -> int {
        crn::ExperimentConfig cfg = load_with_overrides(config_path, ov);
        if (simulate->parsed()) {
          crn::cmd_simulate(cfg, std::cout);
          return crn::kExitOk;
        }
        if (reduce->parsed()) return crn::cmd_reduce(cfg, std::cout);
        std::optional<std::filesystem::path> result;
        if (!result_path.empty()) result = result_path;
        crn::cmd_validate(cfg, result, std::cout);
        return crn::kExitOk;
      },
      std::cerr);
}
