#include "jobfit/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "jobfit/error.hpp"
#include "jobfit/merging.hpp"

namespace jobfit {
namespace {

constexpr double kRootTolerance = 1e-6;
constexpr int kMaxBisections = 60;
constexpr double kPolynomialBetaMax = 64.0;
// Half-width of the window around the critical ability used when MinDer has
// to be estimated numerically.
constexpr double kNumericWindow = 0.1;

bool has_closed_min_derivative(const ErrorModel& model, const AbilityProfile& p) {
  return model.is_linear() && !std::holds_alternative<PiecewiseLinear>(p.family()) &&
         !std::holds_alternative<Selection>(p.family());
}

MinDerivative min_derivative_for(const JobSpec& spec, const ErrorModel& model, const Worker& worker,
                                 Level vary, double mu_c, const ExpectedErrorOptions& opts) {
  const AbilityProfile& p = worker.level(vary);
  if (has_closed_min_derivative(model, p)) return min_derivative(spec, model, p, vary);
  auto [lo, hi] = parameter_domain(p);
  auto err = [&](double mu) {
    return expected_error(with_level_parameter(worker, vary, mu), spec, model, opts);
  };
  return min_derivative_numeric(err, {std::max(lo, mu_c - kNumericWindow), std::min(hi, mu_c + kNumericWindow)});
}

double width_for(double L, double max_disp, double min_der, double theta, double p, std::size_t n) {
  return p > 0.0 ? dependent_transition_width(L, max_disp, min_der, theta, p, n)
                 : transition_width(L, max_disp, min_der, theta);
}

bool in_domain(const AbilityProfile& p, double mu) {
  auto [lo, hi] = parameter_domain(p);
  return mu >= lo && mu <= hi;
}

}  // namespace

double family_parameter(const AbilityProfile& profile) {
  const auto& f = profile.family();
  if (const auto* x = std::get_if<Linear>(&f)) return x->a;
  if (const auto* x = std::get_if<Constant>(&f)) return x->c;
  if (const auto* x = std::get_if<Polynomial>(&f)) return x->beta;
  fail(ErrorKind::kUnsupported, "profile family has no scalar ability parameter");
}

AbilityProfile with_family_parameter(const AbilityProfile& profile, double value) {
  const auto& f = profile.family();
  if (const auto* x = std::get_if<Linear>(&f)) return AbilityProfile(Linear{value, x->c}, profile.noise());
  if (std::holds_alternative<Constant>(f)) return AbilityProfile(Constant{value}, profile.noise());
  if (std::holds_alternative<Polynomial>(f)) return AbilityProfile(Polynomial{value}, profile.noise());
  fail(ErrorKind::kUnsupported, "profile family has no scalar ability parameter");
}

std::pair<double, double> parameter_domain(const AbilityProfile& profile) {
  const auto& f = profile.family();
  if (const auto* x = std::get_if<Linear>(&f)) return {1.0 - x->c, 1.0};
  if (std::holds_alternative<Constant>(f)) return {0.0, 1.0};
  if (std::holds_alternative<Polynomial>(f)) return {0.0, kPolynomialBetaMax};
  fail(ErrorKind::kUnsupported, "profile family has no scalar ability parameter");
}

bool same_family(const AbilityProfile& x, const AbilityProfile& y) {
  if (x.family().index() != y.family().index()) return false;
  const auto* lx = std::get_if<Linear>(&x.family());
  const auto* ly = std::get_if<Linear>(&y.family());
  return !lx || lx->c == ly->c;
}

Worker with_level_parameter(const Worker& worker, Level level, double value) {
  Worker out = worker;
  out.level(level) = with_family_parameter(worker.level(level), value);
  return out;
}

double expected_error(const Worker& worker, const JobSpec& spec, const ErrorModel& model,
                      const ExpectedErrorOptions& options) {
  if (auto exact = closed_form_err_avg(worker, spec, model)) return *exact;
  return mean_estimate(simulate_job_errors(worker, spec, model, options.monte_carlo), options.monte_carlo)
      .value;
}

CriticalAbility critical_ability(const JobSpec& spec, const ErrorModel& model, const Worker& worker,
                                 Level vary, double tau, const ExpectedErrorOptions& options) {
  auto [lo, hi] = parameter_domain(worker.level(vary));
  const bool closed = closed_form_err_avg(worker, spec, model).has_value();
  auto gap = [&](double mu) {
    return expected_error(with_level_parameter(worker, vary, mu), spec, model, options) - tau;
  };
  constexpr double kExact = 1e-12;
  const double g_hi = gap(hi);
  if (std::abs(g_hi) <= kExact) return {hi, closed, 0};
  const double g_lo = gap(lo);
  if (std::abs(g_lo) <= kExact) return {lo, closed, 0};
  require(g_lo > 0.0 && g_hi < 0.0, ErrorKind::kNoRoot,
          "tau = " + std::to_string(tau) + " is outside the attainable expected-error range [" +
              std::to_string(g_hi + tau) + ", " + std::to_string(g_lo + tau) + "]");
  int it = 0;
  while (it < kMaxBisections && hi - lo > 2.0 * kRootTolerance) {
    const double mid = 0.5 * (lo + hi);
    (gap(mid) > 0.0 ? lo : hi) = mid;
    ++it;
  }
  return {0.5 * (lo + hi), closed, it};
}

MinDerivative min_derivative(const JobSpec& spec, const ErrorModel& model, const AbilityProfile& profile,
                             Level which, std::optional<std::pair<double, double>> domain) {
  const auto c = effective_coefficients(spec, model);
  const double factor = model.level_factor();
  const auto& s = spec.difficulties(which);
  const auto& f = profile.family();
  double value = 0.0;
  if (std::holds_alternative<Linear>(f)) {
    for (std::size_t j = 0; j < spec.n(); ++j) value += c[j] * s[j];
    value *= factor;
  } else if (std::holds_alternative<Constant>(f)) {
    for (double cj : c) value += cj;
    value *= factor;
  } else if (std::holds_alternative<Polynomial>(f)) {
    auto [lo, hi] = domain.value_or(std::pair{0.5, 2.0});
    require(lo <= hi && lo >= 0.0, ErrorKind::kInvalidArgument, "invalid polynomial domain");
    if (lo == 0.0) return {0.0, true};
    constexpr int kGrid = 400;
    value = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= kGrid; ++k) {
      const double beta = lo + (hi - lo) * k / kGrid;
      double sum = 0.0;
      for (std::size_t j = 0; j < spec.n(); ++j) {
        if (c[j] > 0.0) sum += c[j] * beta * std::pow(s[j], beta - 1.0);
      }
      value = std::min(value, factor * sum);
    }
  } else {
    fail(ErrorKind::kUnsupported, "no closed-form MinDer for this profile family");
  }
  return {value, value == 0.0};
}

MinDerivative min_derivative_numeric(const std::function<double(double)>& err_avg,
                                     std::pair<double, double> domain, int points) {
  require(points >= 2 && domain.second > domain.first, ErrorKind::kInvalidArgument,
          "numeric MinDer needs a non-empty domain and at least 2 points");
  const double h = (domain.second - domain.first) / (points - 1);
  double prev = err_avg(domain.first);
  double best = std::numeric_limits<double>::infinity();
  for (int k = 1; k < points; ++k) {
    const double cur = err_avg(domain.first + k * h);
    best = std::min(best, std::abs(cur - prev) / h);
    prev = cur;
  }
  return {best, best == 0.0};
}

const char* to_string(DispersionConvention c) {
  return c == DispersionConvention::kMain ? "main" : "general";
}

double max_dispersion(const NoiseModel& noise1, const NoiseModel& noise2, std::size_t n,
                      DispersionConvention convention) {
  auto per_subskill = [convention](const NoiseModel& m) {
    if (convention == DispersionConvention::kMain || m.kind == NoiseKind::kTruncNormal) return m.variance();
    return m.variance() / 4.0;
  };
  return static_cast<double>(n) * (per_subskill(noise1) + per_subskill(noise2));
}

double transition_width(double L, double max_disp, double min_der, double theta) {
  require(theta > 0.0 && theta < 0.5, ErrorKind::kInvalidArgument, "theta must lie in (0, 0.5)");
  require(L >= 0.0 && max_disp >= 0.0 && min_der >= 0.0, ErrorKind::kInvalidArgument,
          "L, MaxDisp and MinDer must be >= 0");
  if (min_der == 0.0) return std::numeric_limits<double>::infinity();
  return L * std::sqrt(max_disp * std::log(1.0 / theta)) / min_der;
}

double dependent_transition_width(double L, double max_disp, double min_der, double theta, double p,
                                  std::size_t n) {
  require(theta > 0.0 && theta < 0.5, ErrorKind::kInvalidArgument, "theta must lie in (0, 0.5)");
  require(p >= 0.0 && p <= 1.0, ErrorKind::kInvalidArgument, "p must lie in [0, 1]");
  require(L >= 0.0 && max_disp >= 0.0 && min_der >= 0.0, ErrorKind::kInvalidArgument,
          "L, MaxDisp and MinDer must be >= 0");
  if (min_der == 0.0) return std::numeric_limits<double>::infinity();
  const double independent_arg = 2.0 * (1.0 - p) / theta;
  const double tied_arg = 2.0 * p / theta;
  const double independent = independent_arg > 1.0 ? std::sqrt(std::log(independent_arg)) : 0.0;
  const double tied = tied_arg > 1.0 ? std::sqrt(static_cast<double>(n) * std::log(tied_arg)) : 0.0;
  return L * std::sqrt(max_disp) * std::max(independent, tied) / min_der;
}

PhaseReport verify_phase_transition(const JobSpec& spec, const ErrorModel& model, const Worker& worker,
                                    Level vary, double theta, const PhaseOptions& options) {
  PhaseReport r;
  r.theta = theta;
  r.convention = options.convention;
  const auto crit = critical_ability(spec, model, worker, vary, spec.tau(), options.expected);
  r.mu1_c = crit.mu_c;
  r.closed_form = crit.closed_form;
  r.L = lipschitz_bound(spec, model);
  r.min_der = min_derivative_for(spec, model, worker, vary, r.mu1_c, options.expected).value;
  r.max_disp = max_dispersion(worker.alpha1.noise(), worker.alpha2.noise(), spec.n(), options.convention);
  r.gamma1 = width_for(r.L, r.max_disp, r.min_der, theta, worker.p, spec.n());

  // The root is only known to the bisection tolerance, so never probe closer
  // to it than that.
  const double offset = std::max(r.gamma1, kRootTolerance);
  auto probe = [&](PhaseCheck& check, double mu, bool low_side) {
    check.mu = mu;
    check.in_domain = std::isfinite(mu) && in_domain(worker.level(vary), mu);
    if (!check.in_domain) return;
    check.p = estimate_success_probability(with_level_parameter(worker, vary, mu), spec, model,
                                           options.simulation);
    const double slack = 3.0 * check.p.std_error;
    check.passed = low_side ? check.p.value <= theta + slack : check.p.value >= 1.0 - theta - slack;
  };
  probe(r.low, r.mu1_c - offset, true);
  probe(r.high, r.mu1_c + offset, false);
  r.verified = r.low.passed && r.high.passed;
  return r;
}

MergeReport merging_condition(const Worker& w1, const Worker& w2, const JobSpec& spec,
                              const ErrorModel& model, double theta, const PhaseOptions& options) {
  require(same_family(w1.alpha1, w2.alpha1) && same_family(w1.alpha2, w2.alpha2), ErrorKind::kHypothesis,
          "workers do not share a profile family per level; use merge_per_subskill instead");
  MergeReport r;
  r.mu1_w1 = family_parameter(w1.alpha1);
  r.mu2_w1 = family_parameter(w1.alpha2);
  r.mu1_w2 = family_parameter(w2.alpha1);
  r.mu2_w2 = family_parameter(w2.alpha2);

  const Worker w12 = merge_uniform(w1, w2, {Source::kA, Source::kB});
  const Worker w21 = merge_uniform(w1, w2, {Source::kB, Source::kA});
  const double L = lipschitz_bound(spec, model);
  const double p = std::max(w1.p, w2.p);

  const double der12 = min_derivative_for(spec, model, w12, Level::kDecision, r.mu1_w1, options.expected).value;
  const double der2 = min_derivative_for(spec, model, w2, Level::kDecision, r.mu1_w2, options.expected).value;
  r.gamma1_w1 = width_for(L, max_dispersion(w1.alpha1.noise(), w2.alpha2.noise(), spec.n(), options.convention),
                          der12, theta, p, spec.n());
  r.gamma1_w2 = width_for(L, max_dispersion(w2.alpha1.noise(), w2.alpha2.noise(), spec.n(), options.convention),
                          der2, theta, p, spec.n());

  const double mu_low = r.mu1_w1 - r.gamma1_w1;
  const double mu_high = r.mu1_w2 + r.gamma1_w2;
  const bool ok_low = std::isfinite(mu_low) && in_domain(w1.alpha1, mu_low);
  const bool ok_high = std::isfinite(mu_high) && in_domain(w2.alpha1, mu_high);
  r.err_avg_low = ok_low ? expected_error(with_level_parameter(w12, Level::kDecision, mu_low), spec, model,
                                          options.expected)
                         : std::numeric_limits<double>::quiet_NaN();
  r.err_avg_high = ok_high ? expected_error(with_level_parameter(w2, Level::kDecision, mu_high), spec, model,
                                            options.expected)
                           : std::numeric_limits<double>::quiet_NaN();
  r.condition_holds = ok_low && ok_high && r.err_avg_low <= spec.tau() && spec.tau() <= r.err_avg_high;
  r.guaranteed_gain = r.condition_holds ? 1.0 - 2.0 * theta : 0.0;

  const auto& cfg = options.simulation;
  r.p1 = estimate_success_probability(w1, spec, model, cfg);
  r.p2 = estimate_success_probability(w2, spec, model, cfg);
  r.p12 = estimate_success_probability(w12, spec, model, cfg);
  r.p21 = estimate_success_probability(w21, spec, model, cfg);
  const double base = std::max(r.p1.value, r.p2.value);
  r.delta = std::max({base, r.p12.value, r.p21.value}) - base;
  return r;
}

CompressionReport compression_bound(const Worker& low, const Worker& high, const Worker& ai,
                                    const JobSpec& spec, const ErrorModel& model, double theta,
                                    const PhaseOptions& options) {
  CompressionReport r;
  const auto& cfg = options.simulation;
  r.p1 = estimate_success_probability(low, spec, model, cfg);
  r.p2 = estimate_success_probability(high, spec, model, cfg);
  r.p1_merged = estimate_success_probability(merge_per_subskill(low, ai, spec).worker, spec, model, cfg);
  r.p2_merged = estimate_success_probability(merge_per_subskill(high, ai, spec).worker, spec, model, cfg);
  r.pc = std::abs(r.p2.value - r.p1.value) - std::abs(r.p2_merged.value - r.p1_merged.value);

  auto has_param = [](const AbilityProfile& p) {
    const auto& f = p.family();
    return std::holds_alternative<Linear>(f) || std::holds_alternative<Constant>(f) ||
           std::holds_alternative<Polynomial>(f);
  };
  r.hypothesis_holds = low.alpha1 == high.alpha1 && has_param(low.alpha1) && has_param(low.alpha2) &&
                       same_family(low.alpha1, ai.alpha1) && same_family(low.alpha2, high.alpha2) &&
                       same_family(low.alpha2, ai.alpha2) &&
                       family_parameter(low.alpha1) > family_parameter(ai.alpha1);
  if (!r.hypothesis_holds) return r;

  const AbilityProfile& decision = low.alpha1;
  const double L = lipschitz_bound(spec, model);
  auto gamma2 = [&](const Worker& w) {
    Worker paired(decision, w.alpha2, w.p);
    const double der =
        min_derivative_for(spec, model, paired, Level::kAction, family_parameter(w.alpha2), options.expected)
            .value;
    return width_for(L, max_dispersion(decision.noise(), w.alpha2.noise(), spec.n(), options.convention), der,
                     theta, w.p, spec.n());
  };
  r.gamma2_low = gamma2(low);
  r.gamma2_high = gamma2(high);
  r.gamma2_ai = gamma2(ai);

  // Err_avg of (shared decision profile, w's action profile shifted to mu),
  // or NaN when mu leaves the parameter domain.
  auto err_at = [&](const Worker& w, double mu) {
    if (!std::isfinite(mu) || !in_domain(w.alpha2, mu)) return std::numeric_limits<double>::quiet_NaN();
    Worker paired(decision, with_family_parameter(w.alpha2, mu), w.p);
    return expected_error(paired, spec, model, options.expected);
  };
  const double e_ai = err_at(ai, family_parameter(ai.alpha2) - r.gamma2_ai);
  const double e_high = err_at(high, family_parameter(high.alpha2) - r.gamma2_high);
  const double e_low = err_at(low, family_parameter(low.alpha2) + r.gamma2_low);
  const double tau = spec.tau();
  r.condition_holds = std::max(e_ai, e_high) <= tau && tau <= e_low;
  r.guaranteed_pc = r.condition_holds ? 1.0 - 2.0 * theta : 0.0;
  return r;
}

AbilityDensity AbilityDensity::uniform() { return AbilityDensity(); }

AbilityDensity AbilityDensity::tabulated(std::vector<double> a, std::vector<double> pdf) {
  require(a.size() >= 2 && a.size() == pdf.size(), ErrorKind::kInvalidArgument,
          "density table needs matching abscissae and values (at least 2)");
  AbilityDensity d;
  d.cumulative_.assign(a.size(), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    require(pdf[i] >= 0.0 && std::isfinite(pdf[i]), ErrorKind::kInvalidArgument, "density must be >= 0");
    if (i > 0) {
      require(a[i] > a[i - 1], ErrorKind::kInvalidArgument, "density abscissae must increase");
      d.cumulative_[i] = d.cumulative_[i - 1] + 0.5 * (pdf[i] + pdf[i - 1]) * (a[i] - a[i - 1]);
    }
  }
  d.total_ = d.cumulative_.back();
  require(d.total_ > 0.0, ErrorKind::kInvalidArgument, "density has zero mass");
  d.a_ = std::move(a);
  d.pdf_ = std::move(pdf);
  return d;
}

double AbilityDensity::cumulative_at(double x) const {
  if (a_.empty()) return std::clamp(x, 0.0, 1.0);
  if (x <= a_.front()) return 0.0;
  if (x >= a_.back()) return total_;
  const auto i = static_cast<std::size_t>(std::upper_bound(a_.begin(), a_.end(), x) - a_.begin()) - 1;
  const double h = a_[i + 1] - a_[i];
  const double d = x - a_[i];
  return cumulative_[i] + pdf_[i] * d + (pdf_[i + 1] - pdf_[i]) * d * d / (2.0 * h);
}

double AbilityDensity::mass(double lo, double hi) const {
  if (hi <= lo) return 0.0;
  return (cumulative_at(hi) - cumulative_at(lo)) / total_;
}

BiasThresholds bias_thresholds(const TabulatedCurve& curve, double qualify_p, double reject_p) {
  const auto& a = curve.a;
  const auto& p = curve.p;
  require(a.size() >= 2 && a.size() == p.size(), ErrorKind::kInvalidArgument,
          "curve needs matching abscissae and values (at least 2)");
  require(qualify_p > reject_p, ErrorKind::kInvalidArgument, "qualify_p must exceed reject_p");
  for (std::size_t i = 1; i < a.size(); ++i) {
    require(a[i] > a[i - 1], ErrorKind::kInvalidArgument, "curve abscissae must increase");
    require(p[i] >= p[i - 1], ErrorKind::kInvalidArgument, "curve must be non-decreasing");
  }
  auto lerp = [&](std::size_t i, double target) {
    if (p[i + 1] == p[i]) return a[i];
    return a[i] + (target - p[i]) * (a[i + 1] - a[i]) / (p[i + 1] - p[i]);
  };
  // First point reaching qualify_p.
  auto q = std::find_if(p.begin(), p.end(), [&](double v) { return v >= qualify_p; });
  require(q != p.end(), ErrorKind::kUndefinedThreshold, "curve never reaches the qualify threshold");
  const auto iq = static_cast<std::size_t>(q - p.begin());
  const double a_q = iq == 0 ? a.front() : lerp(iq - 1, qualify_p);
  // Last point not exceeding reject_p.
  auto rr = std::find_if(p.rbegin(), p.rend(), [&](double v) { return v <= reject_p; });
  require(rr != p.rend(), ErrorKind::kUndefinedThreshold, "curve never falls to the reject threshold");
  const auto ir = static_cast<std::size_t>(p.rend() - rr) - 1;
  const double a_r = ir + 1 == a.size() ? a.back() : lerp(ir, reject_p);
  return {a_q, a_r};
}

double bias_misclassification_rate(double beta, const TabulatedCurve& curve, double qualify_p,
                                   double reject_p, const AbilityDensity& density) {
  require(beta > 0.0 && beta <= 1.0, ErrorKind::kInvalidArgument, "beta must lie in (0, 1]");
  const auto t = bias_thresholds(curve, qualify_p, reject_p);
  const double qualified = density.mass(t.a_qualify, 1.0);
  require(qualified > 0.0, ErrorKind::kUndefinedThreshold, "no ability mass above the qualify threshold");
  const double rejected = density.mass(t.a_qualify, std::min(1.0, t.a_reject / beta));
  return std::clamp(rejected / qualified, 0.0, 1.0);
}

}  // namespace jobfit
