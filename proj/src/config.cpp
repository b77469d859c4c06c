#include "crn/config.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

#include "crn/digest.hpp"
#include "crn/error.hpp"
#include "crn/trajectory_io.hpp"
#include "crn/util.hpp"

namespace crn {

std::vector<int> parse_id_list(const std::string& text) {
  std::vector<int> out;
  if (trim(text).empty()) return out;
  for (const std::string& part : split(text, ',')) {
    std::string item = trim(part);
    if (item.empty()) continue;
    size_t dash = item.find('-', 1);  // allow negative ids to fail below, not split
    if (dash != std::string::npos) {
      auto lo = parse_int(item.substr(0, dash));
      auto hi = parse_int(item.substr(dash + 1));
      if (!lo || !hi || *lo > *hi) throw ConfigError("malformed id range '" + item + "'");
      for (long long v = *lo; v <= *hi; ++v) out.push_back(static_cast<int>(v));
    } else {
      auto v = parse_int(item);
      if (!v) throw ConfigError("malformed id '" + item + "'");
      out.push_back(static_cast<int>(*v));
    }
  }
  return out;
}

namespace {

std::vector<double> parse_double_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  for (const std::string& part : split(text, ',')) {
    if (trim(part).empty()) continue;
    auto v = parse_double(part);
    if (!v) throw ConfigError("malformed " + what + " entry '" + trim(part) + "'");
    out.push_back(*v);
  }
  return out;
}

std::pair<std::vector<double>, std::vector<double>> parse_condition_value(
    const std::string& value) {
  std::vector<std::string> parts = split(value, '|');
  if (parts.empty() || parts.size() > 2)
    throw ConfigError("malformed condition value '" + value + "'");
  std::vector<double> x0 = parse_double_list(parts[0], "initial concentration");
  std::vector<double> scale =
      parts.size() == 2 ? parse_double_list(parts[1], "rate scale") : std::vector<double>{};
  return {std::move(x0), std::move(scale)};
}

std::filesystem::path resolve(const std::filesystem::path& base,
                              const std::filesystem::path& p) {
  return p.is_absolute() ? p : base / p;
}

}  // namespace

ExperimentConfig load_config(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path))
    throw ConfigError("config file '" + path.string() + "' does not exist");
  ExperimentConfig cfg;
  cfg.config_path = path;
  std::string text = read_file(path);
  cfg.config_sha256 = sha256_hex(text);
  const std::filesystem::path base = path.has_parent_path() ? path.parent_path() : ".";

  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  bool mechanism_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (size_t pos = line.find('#'); pos != std::string::npos) line.erase(pos);
    line = trim(line);
    if (line.empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key=value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    auto need_double = [&](const std::string& what) {
      auto v = parse_double(value);
      if (!v) throw ConfigError("config line " + std::to_string(line_no) + ": malformed " + what);
      return *v;
    };
    auto need_int = [&](const std::string& what) {
      auto v = parse_int(value);
      if (!v) throw ConfigError("config line " + std::to_string(line_no) + ": malformed " + what);
      return *v;
    };

    if (key == "mechanism_path") {
      cfg.mechanism_path = resolve(base, value);
      mechanism_seen = true;
    } else if (key == "dt") {
      cfg.dt = need_double("dt");
    } else if (key == "T") {
      cfg.T = static_cast<int>(need_int("T"));
    } else if (key == "substeps") {
      cfg.substeps = static_cast<int>(need_int("substeps"));
    } else if (key == "sigma") {
      cfg.sigma = need_double("sigma");
    } else if (key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(need_int("seed"));
    } else if (key == "overflow_bound") {
      cfg.overflow_bound = need_double("overflow_bound");
    } else if (key == "conditions") {
      cfg.conditions_spec = value;
    } else if (key.rfind("condition.", 0) == 0) {
      auto id = parse_int(key.substr(10));
      if (!id) throw ConfigError("config line " + std::to_string(line_no) + ": malformed condition key");
      cfg.inline_conditions[static_cast<int>(*id)] = parse_condition_value(value);
    } else if (key == "train") {
      cfg.train_ids = parse_id_list(value);
    } else if (key == "holdout") {
      cfg.holdout_ids = parse_id_list(value);
    } else if (key == "epsilons") {
      cfg.epsilons = parse_double_list(value, "epsilon");
    } else if (key == "solver") {
      if (value == "exact")
        cfg.solver = SolverChoice::exact;
      else if (value == "relaxed")
        cfg.solver = SolverChoice::relaxed;
      else
        throw ConfigError("config line " + std::to_string(line_no) +
                          ": solver must be exact or relaxed");
    } else if (key == "tolerance_mode") {
      if (value == "relative")
        cfg.tolerance_mode = ToleranceMode::relative;
      else if (value == "paper-literal")
        cfg.tolerance_mode = ToleranceMode::paper_literal;
      else
        throw ConfigError("config line " + std::to_string(line_no) +
                          ": tolerance_mode must be relative or paper-literal");
    } else if (key == "prune_min_count") {
      cfg.prune_min_count = static_cast<int>(need_int("prune_min_count"));
    } else if (key == "rounding") {
      if (value == "threshold")
        cfg.rounding = RoundingMethod::threshold;
      else if (value == "randomized")
        cfg.rounding = RoundingMethod::randomized;
      else
        throw ConfigError("config line " + std::to_string(line_no) +
                          ": rounding must be threshold or randomized");
    } else if (key == "randomized_draws") {
      cfg.randomized_draws = static_cast<int>(need_int("randomized_draws"));
    } else if (key == "node_limit") {
      cfg.node_limit = need_int("node_limit");
    } else if (key == "workers") {
      cfg.workers = static_cast<int>(need_int("workers"));
    } else if (key == "output_dir") {
      cfg.output_dir = resolve(base, value);
    } else {
      throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }

  if (!mechanism_seen) throw ConfigError("config is missing mechanism_path");
  if (!std::filesystem::exists(cfg.mechanism_path))
    throw ConfigError("mechanism file '" + cfg.mechanism_path.string() + "' does not exist");
  if (cfg.conditions_spec.rfind("file:", 0) == 0) {
    std::filesystem::path p = resolve(base, cfg.conditions_spec.substr(5));
    if (!std::filesystem::exists(p))
      throw ConfigError("conditions file '" + p.string() + "' does not exist");
    cfg.conditions_spec = "file:" + p.string();
  }
  if (cfg.epsilons.empty()) throw ConfigError("config must list at least one epsilon");
  for (double e : cfg.epsilons)
    if (!(e > 0.0)) throw ConfigError("epsilons must be positive");
  {
    std::set<int> train(cfg.train_ids.begin(), cfg.train_ids.end());
    for (int id : cfg.holdout_ids)
      if (train.count(id))
        throw ConfigError("condition " + std::to_string(id) + " is in both train and holdout");
  }
  return cfg;
}

namespace {

std::uint64_t mix64(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

Condition random_condition(int id, std::uint64_t seed, int ns, int nr) {
  std::mt19937_64 engine(mix64(seed, static_cast<std::uint64_t>(id)));
  std::uniform_real_distribution<double> conc(0.05, 1.0);
  std::uniform_real_distribution<double> logscale(std::log(0.5), std::log(2.0));
  Condition cond;
  cond.id = id;
  cond.initial_concentrations = Vecd(ns);
  for (int s = 0; s < ns; ++s) cond.initial_concentrations[s] = conc(engine);
  cond.rate_scale = Vecd(nr);
  for (int i = 0; i < nr; ++i) cond.rate_scale[i] = std::exp(logscale(engine));
  return cond;
}

Condition condition_from_lists(int id, const std::vector<double>& x0,
                               const std::vector<double>& scale, int ns, int nr) {
  if (static_cast<int>(x0.size()) != ns)
    throw ConfigError("condition " + std::to_string(id) + ": expected " + std::to_string(ns) +
                      " initial concentrations, got " + std::to_string(x0.size()));
  if (!scale.empty() && static_cast<int>(scale.size()) != nr)
    throw ConfigError("condition " + std::to_string(id) + ": expected " + std::to_string(nr) +
                      " rate scales, got " + std::to_string(scale.size()));
  Condition cond;
  cond.id = id;
  cond.initial_concentrations = Eigen::Map<const Vecd>(x0.data(), x0.size());
  cond.rate_scale = scale.empty() ? Vecd::Ones(nr)
                                  : Vecd(Eigen::Map<const Vecd>(scale.data(), scale.size()));
  return cond;
}

}  // namespace

std::vector<Condition> materialize_conditions(const ExperimentConfig& config,
                                              const Mechanism& mech) {
  const int ns = mech.num_species();
  const int nr = mech.num_reactions();
  std::vector<Condition> conds;

  const std::string& spec = config.conditions_spec;
  if (spec.rfind("random:", 0) == 0) {
    auto count = parse_int(spec.substr(7));
    if (!count || *count < 1) throw ConfigError("malformed conditions spec '" + spec + "'");
    for (int id = 0; id < *count; ++id)
      conds.push_back(random_condition(id, config.seed, ns, nr));
  } else if (spec.rfind("file:", 0) == 0) {
    std::string text = read_file(spec.substr(5));
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (size_t pos = line.find('#'); pos != std::string::npos) line.erase(pos);
      line = trim(line);
      if (line.empty()) continue;
      std::vector<std::string> parts = split(line, '|');
      if (parts.size() < 2 || parts.size() > 3)
        throw ConfigError("conditions file line " + std::to_string(line_no) +
                          ": expected `<id> | <x0 csv> [| <scale csv>]`");
      auto id = parse_int(parts[0]);
      if (!id)
        throw ConfigError("conditions file line " + std::to_string(line_no) + ": malformed id");
      std::vector<double> x0 = parse_double_list(parts[1], "initial concentration");
      std::vector<double> scale =
          parts.size() == 3 ? parse_double_list(parts[2], "rate scale") : std::vector<double>{};
      conds.push_back(condition_from_lists(static_cast<int>(*id), x0, scale, ns, nr));
    }
  } else if (spec == "inline") {
    if (config.inline_conditions.empty())
      throw ConfigError("conditions=inline but no condition.<id> keys present");
    for (const auto& [id, lists] : config.inline_conditions)
      conds.push_back(condition_from_lists(id, lists.first, lists.second, ns, nr));
  } else {
    throw ConfigError("malformed conditions spec '" + spec + "'");
  }

  std::set<int> ids;
  for (const Condition& c : conds)
    if (!ids.insert(c.id).second)
      throw ConfigError("duplicate condition id " + std::to_string(c.id));
  for (int id : config.train_ids)
    if (!ids.count(id)) throw ConfigError("train id " + std::to_string(id) + " has no condition");
  for (int id : config.holdout_ids)
    if (!ids.count(id))
      throw ConfigError("holdout id " + std::to_string(id) + " has no condition");
  return conds;
}

PipelineOptions pipeline_options(const ExperimentConfig& config) {
  PipelineOptions opts;
  opts.tolerance_mode = config.tolerance_mode;
  opts.solver = config.solver;
  opts.prune_min_count = config.prune_min_count;
  opts.rounding = config.rounding;
  opts.randomized_draws = config.randomized_draws;
  opts.rounding_seed = config.seed;
  opts.workers = config.workers;
  opts.exact_limits.node_limit = config.node_limit;
  return opts;
}

}  // namespace crn
