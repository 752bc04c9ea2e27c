#include "jobfit/error.hpp"

namespace jobfit {

bool is_numerical(ErrorKind kind) {
  return kind == ErrorKind::kNoRoot || kind == ErrorKind::kDegenerateFit ||
         kind == ErrorKind::kUndefinedThreshold;
}

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "invalid argument";
    case ErrorKind::kShape: return "shape mismatch";
    case ErrorKind::kNotLinear: return "model not linear";
    case ErrorKind::kCapacity: return "capacity exceeded";
    case ErrorKind::kHypothesis: return "hypothesis violated";
    case ErrorKind::kUnsupported: return "unsupported";
    case ErrorKind::kLoad: return "load error";
    case ErrorKind::kNoRoot: return "no root";
    case ErrorKind::kDegenerateFit: return "degenerate fit";
    case ErrorKind::kUndefinedThreshold: return "undefined threshold";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(message), kind_(kind) {}

void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace jobfit
