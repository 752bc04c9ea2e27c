#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "jobfit/ability.hpp"
#include "jobfit/job.hpp"
#include "jobfit/random.hpp"
#include "jobfit/worker.hpp"

namespace jobfit {

inline constexpr std::uint64_t kDefaultSeed = 20240917;
inline constexpr std::size_t kDefaultTrials = 10000;

struct SimConfig {
  std::size_t trials = kDefaultTrials;
  std::uint64_t seed = kDefaultSeed;
  double ci_level = 0.95;
  // 0 selects std::thread::hardware_concurrency().
  unsigned threads = 0;
};

struct SimEstimate {
  double value = 0.0;
  double std_error = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
};

// Uniform slots used inside one trial's stream. Exposed so tests can
// reproduce individual draws.
struct TrialSlots {
  static constexpr std::uint64_t kStatus = 0;
  static std::uint64_t noise(std::size_t j, Level l) { return 1 + 2 * (2 * j + index_of(l)); }
  static std::uint64_t selector(std::size_t j, Level l) { return 2 + 2 * (2 * j + index_of(l)); }
};

ErrorMatrix draw_error_matrix(const Worker& worker, const JobSpec& spec, const RandomStream& stream);

// Job error of every trial, in trial order.
std::vector<double> simulate_job_errors(const Worker& worker, const JobSpec& spec,
                                        const ErrorModel& model, const SimConfig& config);

SimEstimate success_estimate(const std::vector<double>& errors, double tau, const SimConfig& config);
SimEstimate mean_estimate(const std::vector<double>& errors, const SimConfig& config);

SimEstimate estimate_success_probability(const Worker& worker, const JobSpec& spec,
                                         const ErrorModel& model, const SimConfig& config);

// Closed-form expected job error: available for linear models when every
// subskill distribution used by the worker is symmetric about its location
// (UniformScaled noise or a point mass).
std::optional<double> closed_form_err_avg(const Worker& worker, const JobSpec& spec,
                                          const ErrorModel& model);

struct ErrAvgEstimate {
  SimEstimate monte_carlo;
  std::optional<double> exact;
};

ErrAvgEstimate estimate_err_avg(const Worker& worker, const JobSpec& spec, const ErrorModel& model,
                                const SimConfig& config);

// Quadrature oracle for tiny instances (2n <= 6, p in {0, 1}). The outer
// dimensions use the midpoint rule with `resolution` cells each; the last
// dimension is integrated exactly by bisection, since the job error is
// monotone in every uniform variate.
double brute_force_success_probability(const Worker& worker, const JobSpec& spec,
                                       const ErrorModel& model, std::size_t resolution);

}  // namespace jobfit
