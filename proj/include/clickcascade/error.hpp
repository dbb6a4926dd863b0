#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace clickcascade {

/// Raised when an operation's precondition on its arguments is violated.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Aggregates several problems found while validating a batch of inputs
/// (CSV rows, config fields) so callers can report all of them at once.
class ValidationError : public InvalidInput {
 public:
  explicit ValidationError(std::vector<std::string> problems);

  const std::vector<std::string>& problems() const noexcept { return problems_; }

 private:
  std::vector<std::string> problems_;
};

}  // namespace clickcascade
