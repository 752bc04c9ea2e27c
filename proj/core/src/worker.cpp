#include "jobfit/worker.hpp"

#include <cmath>

#include "jobfit/error.hpp"

namespace jobfit {

Worker::Worker(AbilityProfile decision, AbilityProfile action, double p)
    : alpha1(std::move(decision)), alpha2(std::move(action)), p(p) {
  require(std::isfinite(p) && p >= 0.0 && p <= 1.0, ErrorKind::kInvalidArgument,
          "dependency p must lie in [0, 1]");
}

}  // namespace jobfit
