#include "jobfit/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "jobfit/error.hpp"

namespace jobfit {
namespace {

// Per-(j, level) distributions at the job's difficulties, laid out row-major.
std::vector<AbilityDistribution> subskill_distributions(const Worker& worker, const JobSpec& spec) {
  std::vector<AbilityDistribution> out;
  out.reserve(2 * spec.n());
  for (std::size_t j = 0; j < spec.n(); ++j) {
    out.emplace_back(worker.alpha1, spec.s1()[j]);
    out.emplace_back(worker.alpha2, spec.s2()[j]);
  }
  return out;
}

void fill_errors(const std::vector<AbilityDistribution>& dists, double p, const RandomStream& stream,
                 std::span<double> zeta) {
  const double beta = stream.uniform_at(TrialSlots::kStatus);
  for (std::size_t k = 0; k < dists.size(); ++k) {
    const std::size_t j = k / 2;
    const Level l = k % 2 == 0 ? Level::kDecision : Level::kAction;
    bool tied = p > 0.0 && stream.uniform_at(TrialSlots::selector(j, l)) < p;
    double u = tied ? beta : stream.uniform_at(TrialSlots::noise(j, l));
    zeta[k] = 1.0 - dists[k].quantile(u);
  }
}

unsigned resolve_threads(const SimConfig& config, std::size_t trials) {
  unsigned t = config.threads != 0 ? config.threads : std::thread::hardware_concurrency();
  t = std::max(1u, t);
  return static_cast<unsigned>(std::min<std::size_t>(t, std::max<std::size_t>(1, trials / 256)));
}

double z_for(double ci_level) {
  require(ci_level > 0.0 && ci_level < 1.0, ErrorKind::kInvalidArgument,
          "ci_level must lie in (0, 1)");
  return normal_quantile(0.5 + 0.5 * ci_level);
}

void check_config(const SimConfig& config) {
  require(config.trials >= 1, ErrorKind::kInvalidArgument, "trials must be >= 1");
}

}  // namespace

ErrorMatrix draw_error_matrix(const Worker& worker, const JobSpec& spec, const RandomStream& stream) {
  ErrorMatrix zeta(spec.n());
  fill_errors(subskill_distributions(worker, spec), worker.p, stream, zeta.values());
  return zeta;
}

std::vector<double> simulate_job_errors(const Worker& worker, const JobSpec& spec,
                                        const ErrorModel& model, const SimConfig& config) {
  check_config(config);
  const auto dists = subskill_distributions(worker, spec);
  const JobErrorFunction err(spec, model);
  std::vector<double> out(config.trials);

  auto run = [&](std::size_t begin, std::size_t end) {
    std::vector<double> zeta(2 * spec.n());
    for (std::size_t t = begin; t < end; ++t) {
      fill_errors(dists, worker.p, RandomStream(config.seed, t), zeta);
      out[t] = err(zeta);
    }
  };

  const unsigned threads = resolve_threads(config, config.trials);
  if (threads == 1) {
    run(0, config.trials);
    return out;
  }
  {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (config.trials + threads - 1) / threads;
    for (unsigned i = 0; i < threads; ++i) {
      std::size_t begin = i * chunk;
      std::size_t end = std::min(config.trials, begin + chunk);
      if (begin < end) pool.emplace_back(run, begin, end);
    }
  }
  return out;
}

SimEstimate success_estimate(const std::vector<double>& errors, double tau, const SimConfig& config) {
  require(!errors.empty(), ErrorKind::kInvalidArgument, "no trials");
  const double n = static_cast<double>(errors.size());
  std::size_t hits = 0;
  for (double e : errors) hits += e <= tau ? 1 : 0;
  const double p = static_cast<double>(hits) / n;
  const double z = z_for(config.ci_level);
  // Wilson score interval; always contains p.
  const double z2 = z * z;
  const double centre = (p + z2 / (2 * n)) / (1 + z2 / n);
  const double half = z / (1 + z2 / n) * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n));
  SimEstimate est;
  est.value = p;
  est.std_error = std::sqrt(p * (1 - p) / n);
  est.ci_lo = std::min(p, std::max(0.0, centre - half));
  est.ci_hi = std::max(p, std::min(1.0, centre + half));
  est.trials = errors.size();
  est.seed = config.seed;
  return est;
}

SimEstimate mean_estimate(const std::vector<double>& errors, const SimConfig& config) {
  require(!errors.empty(), ErrorKind::kInvalidArgument, "no trials");
  const double n = static_cast<double>(errors.size());
  double sum = 0.0;
  for (double e : errors) sum += e;
  const double mean = sum / n;
  double ss = 0.0;
  for (double e : errors) ss += (e - mean) * (e - mean);
  const double var = errors.size() > 1 ? ss / (n - 1) : 0.0;
  SimEstimate est;
  est.value = mean;
  est.std_error = std::sqrt(var / n);
  const double half = z_for(config.ci_level) * est.std_error;
  est.ci_lo = mean - half;
  est.ci_hi = mean + half;
  est.trials = errors.size();
  est.seed = config.seed;
  return est;
}

SimEstimate estimate_success_probability(const Worker& worker, const JobSpec& spec,
                                         const ErrorModel& model, const SimConfig& config) {
  return success_estimate(simulate_job_errors(worker, spec, model, config), spec.tau(), config);
}

std::optional<double> closed_form_err_avg(const Worker& worker, const JobSpec& spec,
                                          const ErrorModel& model) {
  if (!model.is_linear()) return std::nullopt;
  const auto c = effective_coefficients(spec, model);
  double total = 0.0;
  for (std::size_t j = 0; j < spec.n(); ++j) {
    double sum = 0.0;
    for (Level l : {Level::kDecision, Level::kAction}) {
      const double s = spec.difficulty(j, l);
      const NoiseModel noise = worker.level(l).noise_at(s);
      if (noise.kind != NoiseKind::kUniformScaled && noise.sigma > 0.0) return std::nullopt;
      sum += 1.0 - mean_ability(worker.level(l), s);
    }
    total += c[j] * sum;
  }
  return model.level_factor() * total;
}

ErrAvgEstimate estimate_err_avg(const Worker& worker, const JobSpec& spec, const ErrorModel& model,
                                const SimConfig& config) {
  return {mean_estimate(simulate_job_errors(worker, spec, model, config), config),
          closed_form_err_avg(worker, spec, model)};
}

double brute_force_success_probability(const Worker& worker, const JobSpec& spec,
                                       const ErrorModel& model, std::size_t resolution) {
  require(worker.p == 0.0 || worker.p == 1.0, ErrorKind::kInvalidArgument,
          "brute force needs p = 0 or p = 1");
  require(resolution >= 1, ErrorKind::kInvalidArgument, "resolution must be >= 1");
  const bool tied = worker.p == 1.0;
  const std::size_t subskills = 2 * spec.n();
  require(tied || subskills <= 6, ErrorKind::kCapacity,
          "brute force supports at most 6 independent subskills");

  const auto dists = subskill_distributions(worker, spec);
  const JobErrorFunction err(spec, model);
  const double tau = spec.tau();
  const std::size_t dims = tied ? 1 : subskills;
  const std::size_t outer = dims - 1;

  // Midpoint quantiles for the outer dimensions.
  std::vector<std::vector<double>> grid(outer, std::vector<double>(resolution));
  for (std::size_t d = 0; d < outer; ++d) {
    for (std::size_t r = 0; r < resolution; ++r) {
      grid[d][r] = 1.0 - dists[d].quantile((static_cast<double>(r) + 0.5) / resolution);
    }
  }

  std::vector<double> zeta(subskills);
  std::vector<std::size_t> idx(outer, 0);

  // Probability that the last free coordinate keeps Err <= tau. Err is
  // non-decreasing in that coordinate, so the success set is an interval.
  auto success_mass = [&]() -> double {
    if (tied) {
      auto error_at = [&](double u) {
        for (std::size_t k = 0; k < subskills; ++k) zeta[k] = 1.0 - dists[k].quantile(u);
        return err(zeta);
      };
      if (error_at(1.0) > tau) return 0.0;
      if (error_at(0.0) <= tau) return 1.0;
      double lo = 0.0, hi = 1.0;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (error_at(mid) <= tau ? hi : lo) = mid;
      }
      return 1.0 - hi;
    }
    const AbilityDistribution& last = dists[subskills - 1];
    const double z_lo = 1.0 - last.upper();
    const double z_hi = 1.0 - last.lower();
    auto error_at = [&](double z) {
      zeta[subskills - 1] = z;
      return err(zeta);
    };
    if (error_at(z_lo) > tau) return 0.0;
    if (error_at(z_hi) <= tau) return 1.0;
    double lo = z_lo, hi = z_hi;
    for (int it = 0; it < 60 && hi - lo > 1e-11; ++it) {
      const double mid = 0.5 * (lo + hi);
      (error_at(mid) <= tau ? lo : hi) = mid;
    }
    // Pr[zeta <= lo] = Pr[X >= 1 - lo].
    return last.survival(1.0 - lo);
  };

  double total = 0.0;
  std::size_t cells = 0;
  while (true) {
    for (std::size_t d = 0; d < outer; ++d) zeta[d] = grid[d][idx[d]];
    total += success_mass();
    ++cells;
    std::size_t d = 0;
    while (d < outer && ++idx[d] == resolution) idx[d++] = 0;
    if (d == outer) break;
  }
  return total / static_cast<double>(cells);
}

}  // namespace jobfit
