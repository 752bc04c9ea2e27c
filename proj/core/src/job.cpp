#include "jobfit/job.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "jobfit/error.hpp"
#include "jobfit/random.hpp"

namespace jobfit {
namespace {

void check_unit_vector(const std::vector<double>& x, const char* name) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    require(std::isfinite(x[i]) && x[i] >= 0.0 && x[i] <= 1.0, ErrorKind::kInvalidArgument,
            std::string(name) + "[" + std::to_string(i) + "] must lie in [0, 1]");
  }
}

double combine_levels(SkillAggregator h, double z1, double z2) {
  switch (h) {
    case SkillAggregator::kAverage: return 0.5 * (z1 + z2);
    case SkillAggregator::kSum: return z1 + z2;
    case SkillAggregator::kMax: return std::max(z1, z2);
  }
  return 0.0;
}

std::vector<double> normalized(const std::vector<double>& raw, Aggregator agg, const char* what) {
  std::vector<double> out(raw.size(), 1.0 / static_cast<double>(raw.size()));
  if (agg != Aggregator::kWeightedAverage) return out;
  double total = std::accumulate(raw.begin(), raw.end(), 0.0);
  require(total > 0.0, ErrorKind::kInvalidArgument,
          std::string("weighted average over ") + what + " with zero total weight");
  for (std::size_t i = 0; i < raw.size(); ++i) out[i] = raw[i] / total;
  return out;
}

}  // namespace

JobSpec::JobSpec(std::vector<double> s1, std::vector<double> s2, std::vector<double> w,
                 std::vector<double> v, std::vector<std::vector<std::size_t>> tasks, double tau,
                 std::vector<std::size_t> inactive_skills)
    : s1_(std::move(s1)),
      s2_(std::move(s2)),
      w_(std::move(w)),
      v_(std::move(v)),
      tasks_(std::move(tasks)),
      tau_(tau),
      inactive_(std::move(inactive_skills)) {
  const std::size_t n = s1_.size();
  require(n >= 1, ErrorKind::kShape, "job needs at least one skill");
  require(s2_.size() == n && w_.size() == n, ErrorKind::kShape,
          "s1, s2 and w must have the same length");
  require(!v_.empty() && v_.size() == tasks_.size(), ErrorKind::kShape,
          "v must have one entry per task and at least one task");
  check_unit_vector(s1_, "s1");
  check_unit_vector(s2_, "s2");
  check_unit_vector(w_, "w");
  check_unit_vector(v_, "v");
  require(std::isfinite(tau_) && tau_ >= 0.0 && tau_ <= 1.0, ErrorKind::kInvalidArgument,
          "tau must lie in [0, 1]");

  std::vector<int> uses(n, 0);
  for (std::size_t i = 0; i < tasks_.size(); ++i) {
    const auto& t = tasks_[i];
    require(!t.empty(), ErrorKind::kInvalidArgument, "task " + std::to_string(i) + " is empty");
    std::vector<std::size_t> sorted = t;
    std::sort(sorted.begin(), sorted.end());
    require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(),
            ErrorKind::kInvalidArgument, "task " + std::to_string(i) + " lists a skill twice");
    for (std::size_t j : t) {
      require(j < n, ErrorKind::kInvalidArgument,
              "task " + std::to_string(i) + " references unknown skill " + std::to_string(j));
      ++uses[j];
    }
  }
  std::vector<bool> inactive(n, false);
  for (std::size_t j : inactive_) {
    require(j < n, ErrorKind::kInvalidArgument, "inactive skill index out of range");
    require(uses[j] == 0, ErrorKind::kInvalidArgument,
            "skill " + std::to_string(j) + " is declared inactive but required by a task");
    inactive[j] = true;
  }
  for (std::size_t j = 0; j < n; ++j) {
    require(uses[j] > 0 || inactive[j], ErrorKind::kInvalidArgument,
            "skill " + std::to_string(j) + " is not required by any task");
  }
}

JobSpec JobSpec::with_tau(double tau) const {
  return JobSpec(s1_, s2_, w_, v_, tasks_, tau, inactive_);
}

JobSpec random_balanced_job(std::size_t n, std::size_t m, std::size_t k, double tau,
                            std::uint64_t seed) {
  require(n >= 1 && m >= 1 && k >= 1 && k <= n, ErrorKind::kInvalidArgument,
          "balanced job needs 1 <= k <= n and m >= 1");
  require((m * k) % n == 0, ErrorKind::kInvalidArgument,
          "balanced job needs n to divide m*k");
  RandomStream stream(seed, 0);
  std::vector<double> s1(n), s2(n);
  for (std::size_t j = 0; j < n; ++j) {
    s1[j] = stream.uniform_at(2 * j);
    s2[j] = stream.uniform_at(2 * j + 1);
  }
  std::vector<std::vector<std::size_t>> tasks(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t t = 0; t < k; ++t) tasks[i].push_back((i * k + t) % n);
  }
  return JobSpec(std::move(s1), std::move(s2), std::vector<double>(n, 1.0),
                 std::vector<double>(m, 1.0), std::move(tasks), tau);
}

const char* to_string(SkillAggregator h) {
  switch (h) {
    case SkillAggregator::kAverage: return "average";
    case SkillAggregator::kMax: return "max";
    case SkillAggregator::kSum: return "sum";
  }
  return "?";
}

const char* to_string(Aggregator a) {
  switch (a) {
    case Aggregator::kAverage: return "average";
    case Aggregator::kWeightedAverage: return "weighted";
    case Aggregator::kMax: return "max";
  }
  return "?";
}

SkillAggregator parse_skill_aggregator(const std::string& name) {
  if (name == "average") return SkillAggregator::kAverage;
  if (name == "max") return SkillAggregator::kMax;
  if (name == "sum") return SkillAggregator::kSum;
  fail(ErrorKind::kInvalidArgument, "unknown skill aggregator '" + name + "'");
}

Aggregator parse_aggregator(const std::string& name) {
  if (name == "average") return Aggregator::kAverage;
  if (name == "weighted") return Aggregator::kWeightedAverage;
  if (name == "max") return Aggregator::kMax;
  fail(ErrorKind::kInvalidArgument, "unknown aggregator '" + name + "'");
}

ErrorMatrix::ErrorMatrix(std::size_t n, std::vector<double> row_major) : data_(std::move(row_major)) {
  require(data_.size() == 2 * n, ErrorKind::kShape, "error matrix must have 2n entries");
}

JobErrorFunction::JobErrorFunction(const JobSpec& spec, ErrorModel model)
    : model_(model), n_(spec.n()), tasks_(spec.tasks()) {
  skill_weights_.reserve(tasks_.size());
  for (const auto& t : tasks_) {
    std::vector<double> raw;
    raw.reserve(t.size());
    for (std::size_t j : t) raw.push_back(spec.w()[j]);
    skill_weights_.push_back(normalized(raw, model.g, "task skills"));
  }
  task_weights_ = normalized(spec.v(), model.f, "tasks");
}

double JobErrorFunction::operator()(std::span<const double> zeta) const {
  require(zeta.size() == 2 * n_, ErrorKind::kShape, "error matrix does not match the job");
  double job = 0.0;
  for (std::size_t i = 0; i < tasks_.size(); ++i) {
    const auto& t = tasks_[i];
    double task = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k) {
      std::size_t j = t[k];
      double e = combine_levels(model_.h, zeta[2 * j], zeta[2 * j + 1]);
      task = model_.g == Aggregator::kMax ? std::max(task, e) : task + skill_weights_[i][k] * e;
    }
    job = model_.f == Aggregator::kMax ? std::max(job, task) : job + task_weights_[i] * task;
  }
  return job;
}

double job_error(const JobSpec& spec, const ErrorModel& model, const ErrorMatrix& zeta) {
  require(zeta.rows() == spec.n(), ErrorKind::kShape, "error matrix does not match the job");
  return JobErrorFunction(spec, model)(zeta.values());
}

std::vector<double> effective_coefficients(const JobSpec& spec, const ErrorModel& model) {
  require(model.is_linear(), ErrorKind::kNotLinear,
          "effective coefficients need a model without max aggregation");
  std::vector<double> c(spec.n(), 0.0);
  auto task_w = normalized(spec.v(), model.f, "tasks");
  for (std::size_t i = 0; i < spec.m(); ++i) {
    const auto& t = spec.tasks()[i];
    std::vector<double> raw;
    for (std::size_t j : t) raw.push_back(spec.w()[j]);
    auto skill_w = normalized(raw, model.g, "task skills");
    for (std::size_t k = 0; k < t.size(); ++k) c[t[k]] += task_w[i] * skill_w[k];
  }
  return c;
}

double lipschitz_bound(const JobSpec& spec, const ErrorModel& model) {
  if (!model.is_linear()) return 1.0;
  auto c = effective_coefficients(spec, model);
  return model.level_factor() * *std::max_element(c.begin(), c.end());
}

}  // namespace jobfit
