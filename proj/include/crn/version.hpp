#pragma once

namespace crn {

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace crn
