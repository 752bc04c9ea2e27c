#pragma once

#include "jobfit/ability.hpp"
#include "jobfit/job.hpp"

namespace jobfit {

// A worker: decision-level profile, action-level profile and the probability
// p that a subskill outcome is tied to the shared per-trial status.
struct Worker {
  Worker(AbilityProfile decision, AbilityProfile action, double p = 0.0);

  AbilityProfile alpha1;
  AbilityProfile alpha2;
  double p;

  const AbilityProfile& level(Level l) const { return l == Level::kDecision ? alpha1 : alpha2; }
  AbilityProfile& level(Level l) { return l == Level::kDecision ? alpha1 : alpha2; }

  bool operator==(const Worker&) const = default;
};

}  // namespace jobfit
