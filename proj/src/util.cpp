#include "crn/util.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>

namespace crn {

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::optional<double> parse_double(std::string_view s) {
  std::string tmp = trim(s);
  if (tmp.empty()) return std::nullopt;
  // from_chars rejects leading '+', accept it for config friendliness
  if (tmp.front() == '+') tmp.erase(tmp.begin());
  double value = 0.0;
  auto res = std::from_chars(tmp.data(), tmp.data() + tmp.size(), value);
  if (res.ec != std::errc{} || res.ptr != tmp.data() + tmp.size()) return std::nullopt;
  return value;
}

std::optional<long long> parse_int(std::string_view s) {
  std::string tmp = trim(s);
  if (tmp.empty()) return std::nullopt;
  if (tmp.front() == '+') tmp.erase(tmp.begin());
  long long value = 0;
  auto res = std::from_chars(tmp.data(), tmp.data() + tmp.size(), value);
  if (res.ec != std::errc{} || res.ptr != tmp.data() + tmp.size()) return std::nullopt;
  return value;
}

std::string trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(s.substr(start));
      break;
    }
    out.emplace_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

std::vector<std::string> tokenize(std::string_view s) {
  std::vector<std::string> out;
  size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  auto head = static_cast<unsigned char>(s[0]);
  if (!(std::isalpha(head) || s[0] == '_')) return false;
  for (char c : s.substr(1)) {
    auto u = static_cast<unsigned char>(c);
    if (!(std::isalnum(u) || c == '_')) return false;
  }
  return true;
}

}  // namespace crn
