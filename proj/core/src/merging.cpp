#include "jobfit/merging.hpp"

#include <algorithm>
#include <cmath>

#include "jobfit/error.hpp"

namespace jobfit {
namespace {

// Mean as a line m0 + slope * s, if the profile is a plain line.
std::optional<std::pair<double, double>> as_line(const AbilityProfile& p) {
  if (const auto* f = std::get_if<Constant>(&p.family())) return std::pair{f->c, 0.0};
  if (const auto* f = std::get_if<Linear>(&p.family())) return std::pair{f->c, -(1.0 - f->a)};
  return std::nullopt;
}

// Upper envelope of two lines with a shared noise model, as knots.
std::optional<AbilityProfile> envelope(const AbilityProfile& x, const AbilityProfile& y) {
  auto lx = as_line(x);
  auto ly = as_line(y);
  if (!lx || !ly || !(x.noise() == y.noise())) return std::nullopt;
  std::vector<double> at{0.0, 1.0};
  double ds = lx->second - ly->second;
  if (ds != 0.0) {
    double cross = (ly->first - lx->first) / ds;
    if (cross > 0.0 && cross < 1.0) at.insert(at.begin() + 1, cross);
  }
  std::vector<Knot> knots;
  for (double s : at) {
    double m = std::max(lx->first + lx->second * s, ly->first + ly->second * s);
    knots.push_back({s, std::clamp(m, 0.0, 1.0)});
  }
  // Rounding can make a flat envelope look like it rises by an ulp.
  for (std::size_t i = 1; i < knots.size(); ++i) knots[i].mean = std::min(knots[i].mean, knots[i - 1].mean);
  return AbilityProfile::piecewise(std::move(knots), x.noise());
}

bool picks_b(const AbilityProfile& a, const AbilityProfile& b, double s, double scale) {
  return scale * mean_ability(b, s) > mean_ability(a, s);
}

std::vector<Source> assign(const AbilityProfile& a, const AbilityProfile& b,
                           const std::vector<double>& s, double scale) {
  std::vector<Source> out;
  out.reserve(s.size());
  for (double v : s) out.push_back(picks_b(a, b, v, scale) ? Source::kB : Source::kA);
  return out;
}

AbilityProfile merged_level(const AbilityProfile& a, const AbilityProfile& b, double scale) {
  if (scale == 1.0) {
    if (auto env = envelope(a, b)) return *env;
  }
  return AbilityProfile::selection(a, b, scale);
}

}  // namespace

const char* to_string(Source s) { return s == Source::kA ? "A" : "B"; }

const char* to_string(MergeStrategy s) {
  switch (s) {
    case MergeStrategy::kUniform: return "uniform";
    case MergeStrategy::kPerSubskill: return "per_subskill";
    case MergeStrategy::kTrustScaled: return "trust_scaled";
  }
  return "?";
}

std::size_t MergePlan::count(Source s) const {
  return static_cast<std::size_t>(std::count(decision.begin(), decision.end(), s) +
                                  std::count(action.begin(), action.end(), s));
}

Worker merge_uniform(const Worker& a, const Worker& b, LevelPick pick) {
  return Worker(pick.decision == Source::kA ? a.alpha1 : b.alpha1,
                pick.action == Source::kA ? a.alpha2 : b.alpha2, std::max(a.p, b.p));
}

MergeResult merge_uniform(const Worker& a, const Worker& b, LevelPick pick, const JobSpec& spec) {
  MergePlan plan;
  plan.decision.assign(spec.n(), pick.decision);
  plan.action.assign(spec.n(), pick.action);
  plan.strategy = MergeStrategy::kUniform;
  return {merge_uniform(a, b, pick), std::move(plan)};
}

MergeResult merge_per_subskill(const Worker& a, const Worker& b, const JobSpec& spec) {
  MergePlan plan;
  plan.decision = assign(a.alpha1, b.alpha1, spec.s1(), 1.0);
  plan.action = assign(a.alpha2, b.alpha2, spec.s2(), 1.0);
  plan.strategy = MergeStrategy::kPerSubskill;
  Worker merged(merged_level(a.alpha1, b.alpha1, 1.0), merged_level(a.alpha2, b.alpha2, 1.0),
                std::max(a.p, b.p));
  return {std::move(merged), std::move(plan)};
}

MergeResult merge_with_trust(const Worker& a, const Worker& b, const JobSpec& spec, double trust,
                             TrustTarget which) {
  require(std::isfinite(trust) && trust >= 0.0, ErrorKind::kInvalidArgument,
          "trust must be finite and >= 0");
  const double s1 = which == TrustTarget::kAction ? 1.0 : trust;
  const double s2 = which == TrustTarget::kDecision ? 1.0 : trust;
  MergePlan plan;
  plan.decision = assign(a.alpha1, b.alpha1, spec.s1(), s1);
  plan.action = assign(a.alpha2, b.alpha2, spec.s2(), s2);
  plan.strategy = MergeStrategy::kTrustScaled;
  plan.trust = trust;
  Worker merged(merged_level(a.alpha1, b.alpha1, s1), merged_level(a.alpha2, b.alpha2, s2),
                std::max(a.p, b.p));
  return {std::move(merged), std::move(plan)};
}

MergeGain evaluate_merge_gain(std::span<const Worker> bases, std::span<const Worker> candidates,
                              const JobSpec& spec, const ErrorModel& model, const SimConfig& config) {
  require(!bases.empty() && !candidates.empty(), ErrorKind::kInvalidArgument,
          "merge gain needs at least one base and one candidate");
  MergeGain gain;
  double best_base = 0.0, best_candidate = 0.0;
  for (const auto& w : bases) {
    gain.bases.push_back(estimate_success_probability(w, spec, model, config));
    best_base = std::max(best_base, gain.bases.back().value);
  }
  for (const auto& w : candidates) {
    gain.candidates.push_back(estimate_success_probability(w, spec, model, config));
    best_candidate = std::max(best_candidate, gain.candidates.back().value);
  }
  gain.delta = best_candidate - best_base;
  return gain;
}

}  // namespace jobfit
