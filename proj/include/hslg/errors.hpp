#pragma once

#include <stdexcept>
#include <string>

namespace hslg {

// error kinds surfaced to callers; the cli maps them to exit codes
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

struct ModeError : std::logic_error {
  using std::logic_error::logic_error;
};

struct ConditioningError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InternalError : std::logic_error {
  using std::logic_error::logic_error;
};

struct ParseError : std::runtime_error {
  ParseError(int line, std::string field, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line) + " (" + field + "): " + msg),
        line(line), field(std::move(field)) {}
  int line;
  std::string field;
};

}  // namespace hslg
