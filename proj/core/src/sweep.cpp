#include "jobfit/sweep.hpp"

#include <cmath>

#include "jobfit/error.hpp"
#include "jobfit/merging.hpp"

namespace jobfit {
namespace {

AbilityProfile set_slope(const AbilityProfile& p, double a) {
  const auto* f = std::get_if<Linear>(&p.family());
  require(f != nullptr, ErrorKind::kInvalidArgument, "slope knobs need a linear profile");
  return AbilityProfile(Linear{a, f->c}, p.noise());
}

AbilityProfile set_constant(const AbilityProfile& p, double c) {
  if (std::holds_alternative<Constant>(p.family())) return AbilityProfile(Constant{c}, p.noise());
  if (const auto* f = std::get_if<Linear>(&p.family())) return AbilityProfile(Linear{f->a, c}, p.noise());
  fail(ErrorKind::kInvalidArgument, "knob c needs a constant or linear profile");
}

AbilityProfile set_sigma(const AbilityProfile& p, double sigma) {
  return p.with_noise({p.noise().kind, sigma});
}

std::pair<double, double> knob_domain(Knob knob) {
  switch (knob) {
    case Knob::kSigma:
    case Knob::kSigma1:
    case Knob::kSigma2:
    case Knob::kTrust: return {0.0, INFINITY};
    default: return {0.0, 1.0};
  }
}

}  // namespace

Knob parse_knob(const std::string& name) {
  if (name == "a1" || name == "a") return Knob::kA1;
  if (name == "a2") return Knob::kA2;
  if (name == "c" || name == "c2") return Knob::kC;
  if (name == "c1") return Knob::kC1;
  if (name == "sigma") return Knob::kSigma;
  if (name == "sigma1") return Knob::kSigma1;
  if (name == "sigma2") return Knob::kSigma2;
  if (name == "p") return Knob::kP;
  if (name == "tau") return Knob::kTau;
  if (name == "trust" || name == "lambda") return Knob::kTrust;
  fail(ErrorKind::kInvalidArgument, "unknown knob '" + name + "'");
}

const char* to_string(Knob knob) {
  switch (knob) {
    case Knob::kA1: return "a1";
    case Knob::kA2: return "a2";
    case Knob::kC: return "c";
    case Knob::kC1: return "c1";
    case Knob::kSigma: return "sigma";
    case Knob::kSigma1: return "sigma1";
    case Knob::kSigma2: return "sigma2";
    case Knob::kP: return "p";
    case Knob::kTau: return "tau";
    case Knob::kTrust: return "trust";
  }
  return "?";
}

Worker Scenario::realized() const {
  if (!merge_partner) return worker;
  return merge_with_trust(*merge_partner, worker, spec, trust).worker;
}

Scenario apply_knob(const Scenario& scenario, Knob knob, double value) {
  require(std::isfinite(value), ErrorKind::kInvalidArgument, "knob value must be finite");
  Scenario out = scenario;
  Worker& w = out.worker;
  switch (knob) {
    case Knob::kA1: w.alpha1 = set_slope(w.alpha1, value); break;
    case Knob::kA2: w.alpha2 = set_slope(w.alpha2, value); break;
    case Knob::kC: w.alpha2 = set_constant(w.alpha2, value); break;
    case Knob::kC1: w.alpha1 = set_constant(w.alpha1, value); break;
    case Knob::kSigma:
      w.alpha1 = set_sigma(w.alpha1, value);
      w.alpha2 = set_sigma(w.alpha2, value);
      break;
    case Knob::kSigma1: w.alpha1 = set_sigma(w.alpha1, value); break;
    case Knob::kSigma2: w.alpha2 = set_sigma(w.alpha2, value); break;
    case Knob::kP: out.worker = Worker(w.alpha1, w.alpha2, value); break;
    case Knob::kTau: out.spec = scenario.spec.with_tau(value); break;
    case Knob::kTrust:
      require(scenario.merge_partner.has_value(), ErrorKind::kInvalidArgument,
              "knob trust needs a merge partner");
      require(value >= 0.0, ErrorKind::kInvalidArgument, "trust must be >= 0");
      out.trust = value;
      break;
  }
  return out;
}

double knob_value(const Scenario& scenario, Knob knob) {
  const Worker& w = scenario.worker;
  auto slope = [](const AbilityProfile& p) {
    const auto* f = std::get_if<Linear>(&p.family());
    require(f != nullptr, ErrorKind::kInvalidArgument, "slope knobs need a linear profile");
    return f->a;
  };
  auto constant = [](const AbilityProfile& p) {
    if (const auto* f = std::get_if<Constant>(&p.family())) return f->c;
    if (const auto* f = std::get_if<Linear>(&p.family())) return f->c;
    fail(ErrorKind::kInvalidArgument, "knob c needs a constant or linear profile");
  };
  switch (knob) {
    case Knob::kA1: return slope(w.alpha1);
    case Knob::kA2: return slope(w.alpha2);
    case Knob::kC: return constant(w.alpha2);
    case Knob::kC1: return constant(w.alpha1);
    case Knob::kSigma:
    case Knob::kSigma1: return w.alpha1.noise().sigma;
    case Knob::kSigma2: return w.alpha2.noise().sigma;
    case Knob::kP: return w.p;
    case Knob::kTau: return scenario.spec.tau();
    case Knob::kTrust: return scenario.trust;
  }
  return 0.0;
}

std::vector<SweepRow> sweep(const Scenario& scenario, const ErrorModel& model, Knob knob,
                            const std::vector<double>& grid, const SimConfig& config, bool crn) {
  require(!grid.empty(), ErrorKind::kInvalidArgument, "sweep grid is empty");
  std::vector<SweepRow> rows;
  rows.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    Scenario at = apply_knob(scenario, knob, grid[i]);
    SimConfig c = config;
    if (!crn) c.seed = mix64(config.seed + i);
    rows.push_back({grid[i], estimate_success_probability(at.realized(), at.spec, model, c)});
  }
  return rows;
}

Heatmap sweep2d(const Scenario& scenario, const ErrorModel& model, Knob knob_x,
                const std::vector<double>& grid_x, Knob knob_y, const std::vector<double>& grid_y,
                const SimConfig& config, bool crn) {
  require(!grid_x.empty() && !grid_y.empty(), ErrorKind::kInvalidArgument, "heatmap grid is empty");
  Heatmap out{grid_x, grid_y, {}};
  out.cells.reserve(grid_x.size() * grid_y.size());
  for (std::size_t iy = 0; iy < grid_y.size(); ++iy) {
    Scenario row = apply_knob(scenario, knob_y, grid_y[iy]);
    for (std::size_t ix = 0; ix < grid_x.size(); ++ix) {
      Scenario at = apply_knob(row, knob_x, grid_x[ix]);
      SimConfig c = config;
      if (!crn) c.seed = mix64(config.seed + iy * grid_x.size() + ix);
      out.cells.push_back(estimate_success_probability(at.realized(), at.spec, model, c));
    }
  }
  return out;
}

double default_step(Knob knob) {
  switch (knob) {
    case Knob::kSigma:
    case Knob::kSigma1:
    case Knob::kSigma2: return 0.005;
    default: return 0.01;
  }
}

FiniteDifference finite_diff_derivative(const Scenario& scenario, const ErrorModel& model, Knob knob,
                                        double at, double step, const SimConfig& config) {
  require(step > 0.0, ErrorKind::kInvalidArgument, "step must be > 0");
  auto [lo, hi] = knob_domain(knob);
  require(at - step >= lo && at + step <= hi, ErrorKind::kInvalidArgument,
          std::string("finite difference leaves the domain of knob ") + to_string(knob));
  Scenario below = apply_knob(scenario, knob, at - step);
  Scenario above = apply_knob(scenario, knob, at + step);
  FiniteDifference fd;
  fd.lower = estimate_success_probability(below.realized(), below.spec, model, config);
  fd.upper = estimate_success_probability(above.realized(), above.spec, model, config);
  fd.value = std::abs(fd.upper.value - fd.lower.value) / (2.0 * step);
  return fd;
}

}  // namespace jobfit
