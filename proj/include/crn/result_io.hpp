#pragma once

#include <string>

#include "crn/pipeline.hpp"

namespace crn {

/// Reduction result file: key=value header followed by [frequency], [steps]
/// and [degenerate] CSV sections.
std::string reduction_result_text(const ReductionResult& result,
                                  const std::string& config_sha256,
                                  const std::string& tool_version);

ReductionResult parse_reduction_result(const std::string& text);

/// Audit CSV: `condition_id,t,D,tau,satisfied` (satisfied as 0/1), with
/// provenance comment lines up front.
std::string audit_csv(const AuditReport& report, const std::string& config_sha256,
                      const std::string& tool_version);

/// Plot-ready per-condition curve: `t,D,bound`.
std::string curve_csv(const AuditReport& report, int condition_id,
                      const std::string& config_sha256, const std::string& tool_version);

}  // namespace crn
