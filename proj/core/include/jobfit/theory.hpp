#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "jobfit/ability.hpp"
#include "jobfit/job.hpp"
#include "jobfit/simulate.hpp"
#include "jobfit/worker.hpp"

namespace jobfit {

// The scalar ability parameter of a profile family: a (Linear), c (Constant)
// or beta (Polynomial). Error rates decrease as it grows.
double family_parameter(const AbilityProfile& profile);
AbilityProfile with_family_parameter(const AbilityProfile& profile, double value);
std::pair<double, double> parameter_domain(const AbilityProfile& profile);
bool same_family(const AbilityProfile& x, const AbilityProfile& y);

Worker with_level_parameter(const Worker& worker, Level level, double value);

struct ExpectedErrorOptions {
  // Used only when no closed form exists.
  SimConfig monte_carlo{100000, kDefaultSeed, 0.95, 0};
};

// Err_avg of a worker: closed form when available, otherwise a Monte Carlo
// mean with the configured seed (so repeated calls share random numbers).
double expected_error(const Worker& worker, const JobSpec& spec, const ErrorModel& model,
                      const ExpectedErrorOptions& options = {});

struct CriticalAbility {
  double mu_c;
  bool closed_form;
  int iterations;
};

// Root of mu -> Err_avg(mu) = tau over the family's full parameter domain of
// the varied level, by bisection (tolerance 1e-6, at most 60 iterations).
CriticalAbility critical_ability(const JobSpec& spec, const ErrorModel& model, const Worker& worker,
                                 Level vary, double tau, const ExpectedErrorOptions& options = {});

struct MinDerivative {
  double value;
  bool zero_warning;  // value == 0, so every width built on it is infinite
};

// Closed forms for linear models: Linear -> factor * sum c_j s_jl,
// Constant -> factor * sum c_j, Polynomial -> infimum over `domain` of
// factor * sum c_j beta s_jl^(beta - 1) (domain defaults to [0.5, 2]).
MinDerivative min_derivative(const JobSpec& spec, const ErrorModel& model,
                             const AbilityProfile& profile, Level which,
                             std::optional<std::pair<double, double>> domain = std::nullopt);

// Numeric fallback: smallest |slope| of err_avg between neighbouring points of
// an evenly spaced grid over the domain.
MinDerivative min_derivative_numeric(const std::function<double(double)>& err_avg,
                                     std::pair<double, double> domain, int points = 21);

// kMain:    n (sigma1^2 + sigma2^2) whatever the noise kind.
// kGeneral: per-subskill subgaussian bounds, sigma^2/4 for UniformScaled and
//           sigma^2 for TruncNormal.
enum class DispersionConvention { kMain, kGeneral };
const char* to_string(DispersionConvention c);

double max_dispersion(const NoiseModel& noise1, const NoiseModel& noise2, std::size_t n,
                      DispersionConvention convention = DispersionConvention::kGeneral);

// gamma = L sqrt(max_disp ln(1/theta)) / min_der; +infinity when min_der == 0.
double transition_width(double L, double max_disp, double min_der, double theta);

// gamma = L sqrt(max_disp) max{sqrt(ln(2(1-p)/theta)), sqrt(n ln(2p/theta))} / min_der,
// dropping a term whose log argument is <= 1.
double dependent_transition_width(double L, double max_disp, double min_der, double theta, double p,
                                  std::size_t n);

struct PhaseOptions {
  SimConfig simulation{};
  ExpectedErrorOptions expected{};
  DispersionConvention convention = DispersionConvention::kGeneral;
};

struct PhaseCheck {
  double mu = 0.0;
  bool in_domain = false;  // false: the bound is vacuous at this side
  SimEstimate p{};
  bool passed = true;
};

struct PhaseReport {
  double mu1_c = 0.0;
  double gamma1 = 0.0;
  double L = 0.0;
  double min_der = 0.0;
  double max_disp = 0.0;
  double theta = 0.0;
  DispersionConvention convention = DispersionConvention::kGeneral;
  bool closed_form = false;
  PhaseCheck low;
  PhaseCheck high;
  bool verified = false;
};

PhaseReport verify_phase_transition(const JobSpec& spec, const ErrorModel& model,
                                    const Worker& worker, Level vary, double theta,
                                    const PhaseOptions& options = {});

struct MergeReport {
  double mu1_w1 = 0.0, mu2_w1 = 0.0, mu1_w2 = 0.0, mu2_w2 = 0.0;
  double gamma1_w1 = 0.0;
  double gamma1_w2 = 0.0;
  double err_avg_low = 0.0;   // Err_avg of the merged worker at mu1(W1) - gamma
  double err_avg_high = 0.0;  // Err_avg of W2 at mu1(W2) + gamma
  bool condition_holds = false;
  double guaranteed_gain = 0.0;
  SimEstimate p1, p2, p12, p21;
  double delta = 0.0;
};

// W1 is expected to be the stronger decision-level worker and W2 the stronger
// action-level worker. Both must share a profile family per level.
MergeReport merging_condition(const Worker& w1, const Worker& w2, const JobSpec& spec,
                              const ErrorModel& model, double theta, const PhaseOptions& options = {});

struct CompressionReport {
  SimEstimate p1, p2, p1_merged, p2_merged;
  double pc = 0.0;
  bool hypothesis_holds = false;
  bool condition_holds = false;
  double guaranteed_pc = 0.0;
  double gamma2_low = 0.0, gamma2_high = 0.0, gamma2_ai = 0.0;
};

CompressionReport compression_bound(const Worker& low, const Worker& high, const Worker& ai,
                                    const JobSpec& spec, const ErrorModel& model, double theta,
                                    const PhaseOptions& options = {});

// Density of abilities on [0, 1]: uniform, or piecewise-linear through
// tabulated (a, pdf) points.
class AbilityDensity {
 public:
  static AbilityDensity uniform();
  static AbilityDensity tabulated(std::vector<double> a, std::vector<double> pdf);

  double mass(double lo, double hi) const;

 private:
  std::vector<double> a_;
  std::vector<double> cumulative_;
  std::vector<double> pdf_;
  double total_ = 1.0;
  double cumulative_at(double x) const;
};

struct TabulatedCurve {
  std::vector<double> a;
  std::vector<double> p;
};

struct BiasThresholds {
  double a_qualify;
  double a_reject;
};

BiasThresholds bias_thresholds(const TabulatedCurve& curve, double qualify_p, double reject_p);

double bias_misclassification_rate(double beta, const TabulatedCurve& curve, double qualify_p = 0.8,
                                   double reject_p = 0.6,
                                   const AbilityDensity& density = AbilityDensity::uniform());

}  // namespace jobfit
