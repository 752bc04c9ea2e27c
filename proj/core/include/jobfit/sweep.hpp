#pragma once

#include <optional>
#include <string>
#include <vector>

#include "jobfit/job.hpp"
#include "jobfit/simulate.hpp"
#include "jobfit/worker.hpp"

namespace jobfit {

// Named parameters a sweep or finite difference can vary.
//   a1, a2    slope parameter of a linear profile at that level ("a" is a1)
//   c         action-level constant (Constant c or Linear intercept)
//   c1        decision-level counterpart of c
//   sigma     noise level of both levels; sigma1/sigma2 for one level
//   p         dependency probability
//   tau       success threshold
//   trust     misestimation factor of the merge partner (needs a partner)
enum class Knob { kA1, kA2, kC, kC1, kSigma, kSigma1, kSigma2, kP, kTau, kTrust };

Knob parse_knob(const std::string& name);
const char* to_string(Knob knob);

// A worker on a job. With a merge partner, the simulated worker is the
// trust-scaled per-subskill merge of partner (A) and worker (B).
struct Scenario {
  Worker worker;
  JobSpec spec;
  std::optional<Worker> merge_partner;
  double trust = 1.0;

  Worker realized() const;
};

Scenario apply_knob(const Scenario& scenario, Knob knob, double value);
double knob_value(const Scenario& scenario, Knob knob);

struct SweepRow {
  double value;
  SimEstimate estimate;
};

// crn = true reuses config.seed at every grid point; otherwise each point gets
// its own derived seed.
std::vector<SweepRow> sweep(const Scenario& scenario, const ErrorModel& model, Knob knob,
                            const std::vector<double>& grid, const SimConfig& config, bool crn);

struct Heatmap {
  std::vector<double> x;
  std::vector<double> y;
  std::vector<SimEstimate> cells;  // row-major over (y, x)
};

Heatmap sweep2d(const Scenario& scenario, const ErrorModel& model, Knob knob_x,
                   const std::vector<double>& grid_x, Knob knob_y, const std::vector<double>& grid_y,
                   const SimConfig& config, bool crn);

struct FiniteDifference {
  double value;  // |P(at + step) - P(at - step)| / (2 step)
  SimEstimate lower;
  SimEstimate upper;
};

// Central difference with common random numbers on both sides.
FiniteDifference finite_diff_derivative(const Scenario& scenario, const ErrorModel& model, Knob knob,
                                        double at, double step, const SimConfig& config);

double default_step(Knob knob);

}  // namespace jobfit
