#pragma once

#include <stdexcept>
#include <string>

namespace jobfit {

enum class ErrorKind {
  kInvalidArgument,
  kShape,
  kNotLinear,
  kCapacity,
  kHypothesis,
  kUnsupported,
  kLoad,
  kNoRoot,
  kDegenerateFit,
  kUndefinedThreshold,
};

// Numerical failures (no root, degenerate fit, unattained threshold) are
// distinguished from input validation so front ends can map them to
// different exit statuses.
bool is_numerical(ErrorKind kind);
const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

inline void require(bool condition, ErrorKind kind, const std::string& message) {
  if (!condition) fail(kind, message);
}

}  // namespace jobfit
