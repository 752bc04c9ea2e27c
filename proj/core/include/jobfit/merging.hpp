#pragma once

#include <span>
#include <vector>

#include "jobfit/job.hpp"
#include "jobfit/simulate.hpp"
#include "jobfit/worker.hpp"

namespace jobfit {

enum class Source { kA, kB };
enum class MergeStrategy { kUniform, kPerSubskill, kTrustScaled };

const char* to_string(Source s);
const char* to_string(MergeStrategy s);

struct MergePlan {
  std::vector<Source> decision;
  std::vector<Source> action;
  MergeStrategy strategy = MergeStrategy::kUniform;
  double trust = 1.0;

  const std::vector<Source>& level(Level l) const { return l == Level::kDecision ? decision : action; }
  std::size_t count(Source s) const;
};

struct LevelPick {
  Source decision;
  Source action;
};

struct MergeResult {
  Worker worker;
  MergePlan plan;
};

// Whole levels taken from the chosen sources; p is the larger of the two.
Worker merge_uniform(const Worker& a, const Worker& b, LevelPick pick);
MergeResult merge_uniform(const Worker& a, const Worker& b, LevelPick pick, const JobSpec& spec);

// Each (skill, level) goes to the worker with the larger mean ability at that
// difficulty; ties go to A.
MergeResult merge_per_subskill(const Worker& a, const Worker& b, const JobSpec& spec);

enum class TrustTarget { kAction, kDecision, kBoth };

// As merge_per_subskill, but B's mean on the targeted level(s) is multiplied
// by `trust` when deciding the assignment. Draws use B's true profile.
MergeResult merge_with_trust(const Worker& a, const Worker& b, const JobSpec& spec, double trust,
                             TrustTarget which = TrustTarget::kAction);

struct MergeGain {
  double delta = 0.0;
  std::vector<SimEstimate> bases;
  std::vector<SimEstimate> candidates;
};

// delta = max over candidates - max over bases, all simulated with one seed.
MergeGain evaluate_merge_gain(std::span<const Worker> bases, std::span<const Worker> candidates,
                              const JobSpec& spec, const ErrorModel& model, const SimConfig& config);

}  // namespace jobfit
