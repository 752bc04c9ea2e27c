#include "jobfit/ability.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/special_functions/erf.hpp>

#include "jobfit/error.hpp"

namespace jobfit {
namespace {

constexpr double kSqrt2 = 1.41421356237309504880;

bool in_unit(double x) { return x >= 0.0 && x <= 1.0; }

void validate_noise(const NoiseModel& noise) {
  require(std::isfinite(noise.sigma) && noise.sigma >= 0.0, ErrorKind::kInvalidArgument,
          "noise sigma must be finite and >= 0");
  if (noise.kind == NoiseKind::kUniformScaled) {
    require(noise.sigma <= 1.0, ErrorKind::kInvalidArgument,
            "uniform-scaled noise sigma must lie in [0, 1]");
  }
}

struct FamilyValidator {
  void operator()(const Constant& f) const {
    require(in_unit(f.c), ErrorKind::kInvalidArgument, "constant profile: c must lie in [0, 1]");
  }
  void operator()(const Linear& f) const {
    require(in_unit(f.a) && in_unit(f.c), ErrorKind::kInvalidArgument,
            "linear profile: a and c must lie in [0, 1]");
    require(f.a + f.c >= 1.0 - 1e-12, ErrorKind::kInvalidArgument,
            "linear profile: a + c must be >= 1");
  }
  void operator()(const Polynomial& f) const {
    require(std::isfinite(f.beta) && f.beta >= 0.0, ErrorKind::kInvalidArgument,
            "polynomial profile: beta must be >= 0");
  }
  void operator()(const PiecewiseLinear& f) const {
    require(!f.knots.empty(), ErrorKind::kInvalidArgument, "piecewise profile: no knots");
    for (std::size_t i = 0; i < f.knots.size(); ++i) {
      const Knot& k = f.knots[i];
      require(in_unit(k.s) && in_unit(k.mean), ErrorKind::kInvalidArgument,
              "piecewise profile: knots must lie in [0, 1]^2");
      if (i > 0) {
        require(k.s > f.knots[i - 1].s, ErrorKind::kInvalidArgument,
                "piecewise profile: knot abscissae must be strictly increasing");
        require(k.mean <= f.knots[i - 1].mean, ErrorKind::kInvalidArgument,
                "piecewise profile: mean must be non-increasing");
      }
    }
  }
  void operator()(const Selection& f) const {
    require(f.first && f.second, ErrorKind::kInvalidArgument, "selection profile: missing source");
    require(std::isfinite(f.second_scale) && f.second_scale >= 0.0, ErrorKind::kInvalidArgument,
            "selection profile: scale must be >= 0");
  }
};

double piecewise_mean(const PiecewiseLinear& f, double s) {
  const auto& k = f.knots;
  if (s <= k.front().s) return k.front().mean;
  if (s >= k.back().s) return k.back().mean;
  auto it = std::upper_bound(k.begin(), k.end(), s, [](double v, const Knot& kn) { return v < kn.s; });
  const Knot& hi = *it;
  const Knot& lo = *(it - 1);
  double t = (s - lo.s) / (hi.s - lo.s);
  return lo.mean + t * (hi.mean - lo.mean);
}

bool selects_second(const Selection& f, double s) {
  return f.second_scale * mean_ability(*f.second, s) > mean_ability(*f.first, s);
}

}  // namespace

bool Selection::operator==(const Selection& other) const {
  auto same = [](const std::shared_ptr<const AbilityProfile>& x,
                 const std::shared_ptr<const AbilityProfile>& y) {
    if (x == y) return true;
    return x && y && *x == *y;
  };
  return second_scale == other.second_scale && same(first, other.first) && same(second, other.second);
}

NoiseModel NoiseModel::trunc_normal_variance(double variance) {
  require(variance >= 0.0, ErrorKind::kInvalidArgument, "variance must be >= 0");
  return trunc_normal(std::sqrt(variance));
}

AbilityProfile::AbilityProfile(ProfileFamily family, NoiseModel noise)
    : family_(std::move(family)), noise_(noise) {
  std::visit(FamilyValidator{}, family_);
  if (const auto* sel = std::get_if<Selection>(&family_)) noise_ = sel->first->noise_;
  validate_noise(noise_);
}

AbilityProfile AbilityProfile::constant(double c, NoiseModel noise) { return {Constant{c}, noise}; }

AbilityProfile AbilityProfile::linear(double a, NoiseModel noise, double c) {
  return {Linear{a, c}, noise};
}

AbilityProfile AbilityProfile::polynomial(double beta, NoiseModel noise) {
  return {Polynomial{beta}, noise};
}

AbilityProfile AbilityProfile::piecewise(std::vector<Knot> knots, NoiseModel noise) {
  return {PiecewiseLinear{std::move(knots)}, noise};
}

AbilityProfile AbilityProfile::selection(AbilityProfile first, AbilityProfile second,
                                         double second_scale) {
  NoiseModel noise = first.noise_;
  return {Selection{std::make_shared<const AbilityProfile>(std::move(first)),
                    std::make_shared<const AbilityProfile>(std::move(second)), second_scale},
          noise};
}

const AbilityProfile& AbilityProfile::source_at(double s) const {
  const auto* sel = std::get_if<Selection>(&family_);
  if (!sel) return *this;
  return selects_second(*sel, s) ? sel->second->source_at(s) : sel->first->source_at(s);
}

NoiseModel AbilityProfile::noise_at(double s) const { return source_at(s).noise_; }

AbilityProfile AbilityProfile::with_noise(NoiseModel noise) const {
  if (const auto* sel = std::get_if<Selection>(&family_)) {
    return selection(sel->first->with_noise(noise), sel->second->with_noise(noise), sel->second_scale);
  }
  return {family_, noise};
}

double mean_ability(const AbilityProfile& profile, double s) {
  require(in_unit(s), ErrorKind::kInvalidArgument, "difficulty must lie in [0, 1]");
  double e = std::visit(
      [s](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Constant>) {
          return f.c;
        } else if constexpr (std::is_same_v<T, Linear>) {
          return f.c - (1.0 - f.a) * s;
        } else if constexpr (std::is_same_v<T, Polynomial>) {
          return 1.0 - std::pow(s, f.beta);
        } else if constexpr (std::is_same_v<T, PiecewiseLinear>) {
          return piecewise_mean(f, s);
        } else {
          return mean_ability(selects_second(f, s) ? *f.second : *f.first, s);
        }
      },
      profile.family());
  return std::clamp(e, 0.0, 1.0);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / kSqrt2); }

double normal_upper_tail(double z) { return 0.5 * std::erfc(z / kSqrt2); }

double normal_quantile(double p) {
  require(p > 0.0 && p < 1.0, ErrorKind::kInvalidArgument, "normal quantile needs p in (0, 1)");
  return -kSqrt2 * boost::math::erfc_inv(2.0 * p);
}

AbilityDistribution::AbilityDistribution(const AbilityProfile& profile, double s) {
  const AbilityProfile& src = profile.source_at(s);
  kind_ = src.noise().kind;
  sigma_ = src.noise().sigma;
  location_ = mean_ability(src, s);
  if (kind_ == NoiseKind::kUniformScaled) {
    half_width_ = std::min(location_, 1.0 - location_) * sigma_;
    point_mass_ = half_width_ <= 0.0;
  } else {
    point_mass_ = sigma_ <= 0.0;
    if (!point_mass_) {
      phi_lo_ = normal_cdf(-location_ / sigma_);
      q_hi_ = normal_upper_tail((1.0 - location_) / sigma_);
      mass_ = 1.0 - phi_lo_ - q_hi_;
    }
  }
}

double AbilityDistribution::lower() const {
  if (point_mass_) return location_;
  return kind_ == NoiseKind::kUniformScaled ? location_ - half_width_ : 0.0;
}

double AbilityDistribution::upper() const {
  if (point_mass_) return location_;
  return kind_ == NoiseKind::kUniformScaled ? location_ + half_width_ : 1.0;
}

double AbilityDistribution::cdf(double x) const {
  if (point_mass_) return x >= location_ ? 1.0 : 0.0;
  if (x <= lower()) return 0.0;
  if (x >= upper()) return 1.0;
  if (kind_ == NoiseKind::kUniformScaled) return (x - lower()) / (2.0 * half_width_);
  double z = (x - location_) / sigma_;
  double v = z <= 0.0 ? (normal_cdf(z) - phi_lo_) / mass_ : 1.0 - (normal_upper_tail(z) - q_hi_) / mass_;
  return std::clamp(v, 0.0, 1.0);
}

double AbilityDistribution::survival(double x) const {
  if (point_mass_) return x <= location_ ? 1.0 : 0.0;
  return 1.0 - cdf(x);
}

double AbilityDistribution::quantile(double q) const {
  if (point_mass_) return location_;
  if (q <= 0.0) return lower();
  if (q >= 1.0) return upper();
  if (kind_ == NoiseKind::kUniformScaled) return lower() + 2.0 * half_width_ * q;
  // Work in whichever tail keeps the target probability small so the inverse
  // normal stays accurate near both truncation points.
  double lower_mass = phi_lo_ + q * mass_;
  double x;
  if (lower_mass <= 0.5) {
    if (lower_mass <= 0.0) return 0.0;
    x = location_ + sigma_ * normal_quantile(lower_mass);
  } else {
    double upper_mass = q_hi_ + (1.0 - q) * mass_;
    if (upper_mass <= 0.0) return 1.0;
    x = location_ - sigma_ * normal_quantile(upper_mass);
  }
  return std::clamp(x, 0.0, 1.0);
}

double cdf(const AbilityProfile& profile, double s, double x) {
  return AbilityDistribution(profile, s).cdf(x);
}

double quantile(const AbilityProfile& profile, double s, double q) {
  require(q >= 0.0 && q <= 1.0, ErrorKind::kInvalidArgument, "quantile level must lie in [0, 1]");
  return AbilityDistribution(profile, s).quantile(q);
}

double sample_ability(const AbilityProfile& profile, double s, RandomStream& stream) {
  return AbilityDistribution(profile, s).quantile(stream.next_uniform());
}

DominanceVerdict check_dominance(const AbilityProfile& strong, const AbilityProfile& weak,
                                 std::span<const double> s_grid, std::span<const double> x_grid) {
  constexpr double kSlack = 1e-12;
  DominanceVerdict verdict;
  for (double s : s_grid) {
    AbilityDistribution ds(strong, s);
    AbilityDistribution dw(weak, s);
    for (double x : x_grid) {
      double gap = dw.survival(x) - ds.survival(x);
      if (gap > verdict.worst_violation) {
        verdict.worst_violation = gap;
        verdict.at_s = s;
        verdict.at_x = x;
      }
    }
  }
  verdict.dominates = verdict.worst_violation <= kSlack;
  return verdict;
}

LinearFit fit_linear_profile(std::span<const DifficultyAccuracy> points) {
  require(points.size() >= 2, ErrorKind::kDegenerateFit, "linear fit needs at least 2 points");
  double sxx = 0.0;
  double sxy = 0.0;
  bool distinct = false;
  for (const auto& p : points) {
    require(in_unit(p.difficulty) && in_unit(p.accuracy), ErrorKind::kInvalidArgument,
            "fit points must lie in [0, 1]^2");
    if (p.difficulty != points.front().difficulty) distinct = true;
    sxx += p.difficulty * p.difficulty;
    sxy += p.difficulty * (1.0 - p.accuracy);
  }
  require(distinct && sxx > 0.0, ErrorKind::kDegenerateFit,
          "linear fit needs at least two distinct difficulties");
  double a = std::clamp(1.0 - sxy / sxx, 0.0, 1.0);
  double sse = 0.0;
  for (const auto& p : points) {
    double r = p.accuracy - (1.0 - (1.0 - a) * p.difficulty);
    sse += r * r;
  }
  return {a, sse / static_cast<double>(points.size()), points.size()};
}

}  // namespace jobfit
