#pragma once

#include <stdexcept>
#include <string>

namespace supdiff {

/// Raised when an input violates an operation's precondition.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

/// Raised when a reference constant cannot be computed.
class OracleError : public std::runtime_error {
 public:
  OracleError(std::string constant, const std::string& what)
      : std::runtime_error(constant + ": " + what), constant_(std::move(constant)) {}

  const std::string& constant() const noexcept { return constant_; }

 private:
  std::string constant_;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ValidationError(message);
}

}  // namespace supdiff
