#pragma once

#include <memory>
#include <span>
#include <variant>
#include <vector>

#include "jobfit/random.hpp"

namespace jobfit {

enum class NoiseKind { kUniformScaled, kTruncNormal };

// UniformScaled: X = E + min{E, 1-E} * U[-sigma, sigma], sigma in [0, 1].
// TruncNormal: normal with location E and standard deviation sigma,
// truncated to [0, 1].
struct NoiseModel {
  NoiseKind kind = NoiseKind::kUniformScaled;
  double sigma = 0.0;

  static NoiseModel uniform_scaled(double sigma) { return {NoiseKind::kUniformScaled, sigma}; }
  static NoiseModel trunc_normal(double sigma) { return {NoiseKind::kTruncNormal, sigma}; }
  static NoiseModel trunc_normal_variance(double variance);

  double variance() const { return sigma * sigma; }
  bool operator==(const NoiseModel&) const = default;
};

struct Constant {
  double c;
  bool operator==(const Constant&) const = default;
};

// E(s) = c - (1 - a) s.
struct Linear {
  double a;
  double c = 1.0;
  bool operator==(const Linear&) const = default;
};

// E(s) = 1 - s^beta.
struct Polynomial {
  double beta;
  bool operator==(const Polynomial&) const = default;
};

struct Knot {
  double s;
  double mean;
  bool operator==(const Knot&) const = default;
};

struct PiecewiseLinear {
  std::vector<Knot> knots;
  bool operator==(const PiecewiseLinear&) const = default;
};

class AbilityProfile;

// Difficulty-keyed choice between two source profiles: at difficulty s the
// second source is used iff second_scale * E_second(s) > E_first(s). The
// scale only affects the choice; draws come from the unscaled source.
struct Selection {
  std::shared_ptr<const AbilityProfile> first;
  std::shared_ptr<const AbilityProfile> second;
  double second_scale = 1.0;
  bool operator==(const Selection& other) const;
};

using ProfileFamily = std::variant<Constant, Linear, Polynomial, PiecewiseLinear, Selection>;

class AbilityProfile {
 public:
  // Throws Error(kInvalidArgument) when the family or noise is invalid.
  AbilityProfile(ProfileFamily family, NoiseModel noise);

  static AbilityProfile constant(double c, NoiseModel noise);
  static AbilityProfile linear(double a, NoiseModel noise, double c = 1.0);
  static AbilityProfile polynomial(double beta, NoiseModel noise);
  static AbilityProfile piecewise(std::vector<Knot> knots, NoiseModel noise);
  static AbilityProfile selection(AbilityProfile first, AbilityProfile second, double second_scale = 1.0);

  const ProfileFamily& family() const { return family_; }
  // For Selection profiles this is the first source's noise; use noise_at.
  const NoiseModel& noise() const { return noise_; }
  NoiseModel noise_at(double s) const;

  // The profile that actually generates draws at difficulty s. Identity for
  // every family except Selection.
  const AbilityProfile& source_at(double s) const;

  bool is_selection() const { return std::holds_alternative<Selection>(family_); }

  AbilityProfile with_noise(NoiseModel noise) const;

  bool operator==(const AbilityProfile&) const = default;

 private:
  ProfileFamily family_;
  NoiseModel noise_;
};

double mean_ability(const AbilityProfile& profile, double s);

// Distribution of a profile at one fixed difficulty. Construct once and reuse
// when evaluating many cdf/quantile values at the same s.
class AbilityDistribution {
 public:
  AbilityDistribution(const AbilityProfile& profile, double s);

  double location() const { return location_; }
  double lower() const;
  double upper() const;
  bool is_point_mass() const { return point_mass_; }

  double cdf(double x) const;
  // Pr[X >= x]; differs from 1 - cdf(x) only at a point mass.
  double survival(double x) const;
  double quantile(double q) const;

 private:
  NoiseKind kind_;
  double location_;
  double sigma_;
  bool point_mass_;
  double half_width_ = 0.0;
  // Normal cdf/upper-tail values at the truncation points, in standard units.
  double phi_lo_ = 0.0;
  double q_hi_ = 0.0;
  double mass_ = 1.0;
};

double cdf(const AbilityProfile& profile, double s, double x);
double quantile(const AbilityProfile& profile, double s, double q);
double sample_ability(const AbilityProfile& profile, double s, RandomStream& stream);

struct DominanceVerdict {
  bool dominates = true;
  double worst_violation = 0.0;
  double at_s = 0.0;
  double at_x = 0.0;
};

DominanceVerdict check_dominance(const AbilityProfile& strong, const AbilityProfile& weak,
                                 std::span<const double> s_grid, std::span<const double> x_grid);

struct DifficultyAccuracy {
  double difficulty;
  double accuracy;
};

struct LinearFit {
  double a;
  double sigma_sq;
  std::size_t points;
};

// Least squares for accuracy = 1 - (1 - a) * difficulty.
LinearFit fit_linear_profile(std::span<const DifficultyAccuracy> points);

// Standard normal helpers shared with the theory layer.
double normal_cdf(double z);
double normal_upper_tail(double z);
double normal_quantile(double p);

}  // namespace jobfit
