#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace crn {

// Shortest decimal string that round-trips the double exactly.
std::string format_double(double v);

std::optional<double> parse_double(std::string_view s);
std::optional<long long> parse_int(std::string_view s);

std::string trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);

// Whitespace-separated tokens, collapsing runs.
std::vector<std::string> tokenize(std::string_view s);

bool is_identifier(std::string_view s);

}  // namespace crn
