#pragma once

#include <stdexcept>
#include <string>

namespace crn {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mechanism/config text could not be parsed. Carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class SimulationError : public Error {
 public:
  SimulationError(const std::string& what, int t) : Error(what), t_(t) {}
  int t() const { return t_; }

 private:
  int t_;
};

class InfeasibleError : public Error {
 public:
  using Error::Error;
};

}  // namespace crn
