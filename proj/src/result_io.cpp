#include "crn/result_io.hpp"

#include <sstream>

#include "crn/error.hpp"
#include "crn/util.hpp"

namespace crn {

namespace {

std::string join_ids(const std::vector<int>& ids, char sep) {
  std::string out;
  for (size_t i = 0; i < ids.size(); ++i) {
    if (i) out += sep;
    out += std::to_string(ids[i]);
  }
  return out;
}

std::vector<int> parse_ids(const std::string& s, char sep) {
  std::vector<int> out;
  if (trim(s).empty()) return out;
  for (const std::string& part : split(s, sep)) {
    auto v = parse_int(part);
    if (!v) throw Error("malformed id list '" + s + "'");
    out.push_back(static_cast<int>(*v));
  }
  return out;
}

}  // namespace

std::string reduction_result_text(const ReductionResult& result,
                                  const std::string& config_sha256,
                                  const std::string& tool_version) {
  std::string out;
  out += "epsilon=" + format_double(result.epsilon) + "\n";
  out += "tolerance_mode=" + to_string(result.tolerance_mode) + "\n";
  out += "solver=" + to_string(result.solver) + "\n";
  out += "prune_min_count=" + std::to_string(result.prune_min_count) + "\n";
  out += "node_limit_hits=" + std::to_string(result.node_limit_hits) + "\n";
  out += "config_sha256=" + config_sha256 + "\n";
  out += "tool_version=" + tool_version + "\n";
  out += "support=" +
         join_ids(std::vector<int>(result.support.begin(), result.support.end()), ',') + "\n";
  out += "union_support=" +
         join_ids(std::vector<int>(result.union_support.begin(), result.union_support.end()),
                  ',') +
         "\n";
  out += "[frequency]\n";
  out += "reaction_id,count\n";
  for (const auto& [id, count] : result.frequency)
    out += std::to_string(id) + "," + std::to_string(count) + "\n";
  out += "[steps]\n";
  out += "condition_id,t,cardinality,status,support\n";
  for (const StepRecord& rec : result.steps)
    out += std::to_string(rec.condition_id) + "," + std::to_string(rec.t) + "," +
           std::to_string(rec.cardinality) + "," + rec.status + "," +
           join_ids(rec.support, ';') + "\n";
  out += "[degenerate]\n";
  out += "condition_id,t\n";
  for (const auto& [j, t] : result.degenerate_steps)
    out += std::to_string(j) + "," + std::to_string(t) + "\n";
  return out;
}

ReductionResult parse_reduction_result(const std::string& text) {
  ReductionResult result;
  std::istringstream in(text);
  std::string line;
  enum class Section { header, frequency, steps, degenerate } section = Section::header;
  bool skip_column_row = false;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    if (line == "[frequency]") {
      section = Section::frequency;
      skip_column_row = true;
      continue;
    }
    if (line == "[steps]") {
      section = Section::steps;
      skip_column_row = true;
      continue;
    }
    if (line == "[degenerate]") {
      section = Section::degenerate;
      skip_column_row = true;
      continue;
    }
    if (skip_column_row) {
      skip_column_row = false;
      continue;
    }
    switch (section) {
      case Section::header: {
        size_t eq = line.find('=');
        if (eq == std::string::npos) throw ParseError("expected key=value", line_no);
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key == "epsilon") {
          auto v = parse_double(value);
          if (!v) throw ParseError("malformed epsilon", line_no);
          result.epsilon = *v;
        } else if (key == "tolerance_mode") {
          result.tolerance_mode =
              value == "paper-literal" ? ToleranceMode::paper_literal : ToleranceMode::relative;
        } else if (key == "solver") {
          result.solver = value == "relaxed" ? SolverChoice::relaxed : SolverChoice::exact;
        } else if (key == "prune_min_count") {
          result.prune_min_count = static_cast<int>(parse_int(value).value_or(0));
        } else if (key == "node_limit_hits") {
          result.node_limit_hits = parse_int(value).value_or(0);
        } else if (key == "support") {
          for (int id : parse_ids(value, ',')) result.support.insert(id);
        } else if (key == "union_support") {
          for (int id : parse_ids(value, ',')) result.union_support.insert(id);
        }
        break;
      }
      case Section::frequency: {
        std::vector<std::string> f = split(line, ',');
        if (f.size() != 2) throw ParseError("malformed frequency row", line_no);
        result.frequency[static_cast<int>(parse_int(f[0]).value_or(0))] =
            static_cast<int>(parse_int(f[1]).value_or(0));
        break;
      }
      case Section::steps: {
        std::vector<std::string> f = split(line, ',');
        if (f.size() != 5) throw ParseError("malformed step row", line_no);
        StepRecord rec;
        rec.condition_id = static_cast<int>(parse_int(f[0]).value_or(0));
        rec.t = static_cast<int>(parse_int(f[1]).value_or(0));
        rec.cardinality = static_cast<int>(parse_int(f[2]).value_or(0));
        rec.status = f[3];
        rec.support = parse_ids(f[4], ';');
        result.per_step_supports[{rec.condition_id, rec.t}] = rec.support;
        result.steps.push_back(std::move(rec));
        break;
      }
      case Section::degenerate: {
        std::vector<std::string> f = split(line, ',');
        if (f.size() != 2) throw ParseError("malformed degenerate row", line_no);
        result.degenerate_steps.emplace_back(static_cast<int>(parse_int(f[0]).value_or(0)),
                                             static_cast<int>(parse_int(f[1]).value_or(0)));
        break;
      }
    }
  }
  return result;
}

std::string audit_csv(const AuditReport& report, const std::string& config_sha256,
                      const std::string& tool_version) {
  std::string out;
  out += "# config_sha256=" + config_sha256 + "\n";
  out += "# tool_version=" + tool_version + "\n";
  out += "condition_id,t,D,tau,satisfied\n";
  for (const AuditRow& row : report.rows)
    out += std::to_string(row.condition_id) + "," + std::to_string(row.t) + "," +
           format_double(row.fitting_error) + "," + format_double(row.tau) + "," +
           (row.satisfied ? "1" : "0") + "\n";
  return out;
}

std::string curve_csv(const AuditReport& report, int condition_id,
                      const std::string& config_sha256, const std::string& tool_version) {
  std::string out;
  out += "# config_sha256=" + config_sha256 + "\n";
  out += "# tool_version=" + tool_version + "\n";
  out += "t,D,bound\n";
  for (const AuditRow& row : report.rows)
    if (row.condition_id == condition_id)
      out += std::to_string(row.t) + "," + format_double(row.fitting_error) + "," +
             format_double(row.tau) + "\n";
  return out;
}

}  // namespace crn
