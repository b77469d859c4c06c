#include "crn/trajectory_io.hpp"

#include <fstream>
#include <sstream>

#include "crn/error.hpp"
#include "crn/util.hpp"

namespace crn {

std::string trajectory_csv(const Mechanism& mech, const Trajectory& traj) {
  const int ns = mech.num_species();
  const int nr = mech.num_reactions();
  std::string out = "t";
  for (const Species& s : mech.species) out += ",X_" + s.name;
  for (int i = 1; i <= nr; ++i) out += ",r_" + std::to_string(i);
  out += '\n';
  const int T = traj.num_steps();
  for (int t = 1; t <= T + 1; ++t) {
    out += std::to_string(t);
    const Vecd& x = traj.states[t - 1];
    for (int s = 0; s < ns; ++s) {
      out += ',';
      out += format_double(x[s]);
    }
    for (int i = 0; i < nr; ++i) {
      out += ',';
      if (t <= T) out += format_double(traj.rates[t - 1][i]);
    }
    out += '\n';
  }
  return out;
}

Trajectory parse_trajectory_csv(const Mechanism& mech, const std::string& text) {
  const int ns = mech.num_species();
  const int nr = mech.num_reactions();
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  if (!std::getline(in, line)) throw ParseError("empty trajectory file", 1);
  ++line_no;
  {
    std::string expected = "t";
    for (const Species& s : mech.species) expected += ",X_" + s.name;
    for (int i = 1; i <= nr; ++i) expected += ",r_" + std::to_string(i);
    if (trim(line) != expected)
      throw ParseError("trajectory header does not match the mechanism", line_no);
  }

  Trajectory traj;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<std::string> fields = split(line, ',');
    if (static_cast<int>(fields.size()) != 1 + ns + nr)
      throw ParseError("wrong field count", line_no);
    Vecd x(ns);
    for (int s = 0; s < ns; ++s) {
      auto v = parse_double(fields[1 + s]);
      if (!v) throw ParseError("malformed concentration '" + fields[1 + s] + "'", line_no);
      x[s] = *v;
    }
    bool rates_empty = true;
    for (int i = 0; i < nr; ++i)
      if (!trim(fields[1 + ns + i]).empty()) rates_empty = false;
    traj.states.push_back(std::move(x));
    if (!rates_empty) {
      Vecd r(nr);
      for (int i = 0; i < nr; ++i) {
        auto v = parse_double(fields[1 + ns + i]);
        if (!v) throw ParseError("malformed rate '" + fields[1 + ns + i] + "'", line_no);
        r[i] = *v;
      }
      traj.rates.push_back(std::move(r));
    }
  }
  if (traj.states.size() != traj.rates.size() + 1)
    throw ParseError("expected exactly one trailing state row without rates", line_no);
  return traj;
}

std::string trajectory_meta_text(const TrajectoryMeta& meta) {
  std::string out;
  out += "condition_id=" + std::to_string(meta.condition_id) + "\n";
  out += "dt=" + format_double(meta.dt) + "\n";
  out += "T=" + std::to_string(meta.T) + "\n";
  out += "substeps=" + std::to_string(meta.substeps) + "\n";
  out += "sigma=" + format_double(meta.sigma) + "\n";
  out += "seed=" + std::to_string(meta.seed) + "\n";
  out += "mechanism_sha256=" + meta.mechanism_sha256 + "\n";
  out += "config_sha256=" + meta.config_sha256 + "\n";
  out += "tool_version=" + meta.tool_version + "\n";
  return out;
}

TrajectoryMeta parse_trajectory_meta(const std::string& text) {
  TrajectoryMeta meta;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("expected key=value", line_no);
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key == "condition_id") {
      meta.condition_id = static_cast<int>(parse_int(value).value_or(0));
    } else if (key == "dt") {
      auto v = parse_double(value);
      if (!v) throw ParseError("malformed dt", line_no);
      meta.dt = *v;
    } else if (key == "T") {
      meta.T = static_cast<int>(parse_int(value).value_or(0));
    } else if (key == "substeps") {
      meta.substeps = static_cast<int>(parse_int(value).value_or(1));
    } else if (key == "sigma") {
      auto v = parse_double(value);
      if (!v) throw ParseError("malformed sigma", line_no);
      meta.sigma = *v;
    } else if (key == "seed") {
      meta.seed = static_cast<std::uint64_t>(parse_int(value).value_or(0));
    } else if (key == "mechanism_sha256") {
      meta.mechanism_sha256 = value;
    } else if (key == "config_sha256") {
      meta.config_sha256 = value;
    } else if (key == "tool_version") {
      meta.tool_version = value;
    }
    // unknown keys tolerated
  }
  return meta;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out << content;
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace crn
