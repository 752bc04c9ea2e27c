#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace jobfit {

enum class Level { kDecision = 0, kAction = 1 };

inline std::size_t index_of(Level level) { return static_cast<std::size_t>(level); }

// Skills are indexed 0..n-1 and tasks 0..m-1. A skill that no task requires
// must be listed in `inactive_skills`; otherwise construction fails.
class JobSpec {
 public:
  JobSpec(std::vector<double> s1, std::vector<double> s2, std::vector<double> w,
          std::vector<double> v, std::vector<std::vector<std::size_t>> tasks, double tau,
          std::vector<std::size_t> inactive_skills = {});

  std::size_t n() const { return s1_.size(); }
  std::size_t m() const { return v_.size(); }
  const std::vector<double>& s1() const { return s1_; }
  const std::vector<double>& s2() const { return s2_; }
  const std::vector<double>& difficulties(Level level) const {
    return level == Level::kDecision ? s1_ : s2_;
  }
  double difficulty(std::size_t j, Level level) const { return difficulties(level)[j]; }
  const std::vector<double>& w() const { return w_; }
  const std::vector<double>& v() const { return v_; }
  const std::vector<std::vector<std::size_t>>& tasks() const { return tasks_; }
  const std::vector<std::size_t>& inactive_skills() const { return inactive_; }
  double tau() const { return tau_; }

  JobSpec with_tau(double tau) const;

  bool operator==(const JobSpec&) const = default;

 private:
  std::vector<double> s1_, s2_, w_, v_;
  std::vector<std::vector<std::size_t>> tasks_;
  double tau_;
  std::vector<std::size_t> inactive_;
};

// Uniform weights, difficulties drawn i.i.d. from U[0, 1], and a circulant
// dependency graph: task i requires skills (i*k + t) mod n for t < k. Every
// skill then appears in exactly m*k/n tasks, which must be an integer.
JobSpec random_balanced_job(std::size_t n, std::size_t m, std::size_t k, double tau,
                            std::uint64_t seed);

enum class SkillAggregator { kAverage, kMax, kSum };
enum class Aggregator { kAverage, kWeightedAverage, kMax };

// Err = f(g(h(zeta_j1, zeta_j2) for j in T_i) for each task i).
struct ErrorModel {
  SkillAggregator h = SkillAggregator::kAverage;
  Aggregator g = Aggregator::kAverage;
  Aggregator f = Aggregator::kAverage;

  static ErrorModel all_average() { return {}; }
  static ErrorModel all_max() { return {SkillAggregator::kMax, Aggregator::kMax, Aggregator::kMax}; }
  // Summed subskills with importance-weighted task and job averages.
  static ErrorModel weighted_sum() {
    return {SkillAggregator::kSum, Aggregator::kWeightedAverage, Aggregator::kWeightedAverage};
  }

  bool is_linear() const {
    return h != SkillAggregator::kMax && g != Aggregator::kMax && f != Aggregator::kMax;
  }
  // 1 for h = Sum, 1/2 for h = Average. Only meaningful for linear models.
  double level_factor() const { return h == SkillAggregator::kSum ? 1.0 : 0.5; }

  bool operator==(const ErrorModel&) const = default;
};

const char* to_string(SkillAggregator h);
const char* to_string(Aggregator a);
SkillAggregator parse_skill_aggregator(const std::string& name);
Aggregator parse_aggregator(const std::string& name);

// n x 2 matrix of subskill error rates.
class ErrorMatrix {
 public:
  explicit ErrorMatrix(std::size_t n) : data_(2 * n, 0.0) {}
  ErrorMatrix(std::size_t n, std::vector<double> row_major);

  std::size_t rows() const { return data_.size() / 2; }
  double& operator()(std::size_t j, std::size_t level) { return data_[2 * j + level]; }
  double operator()(std::size_t j, std::size_t level) const { return data_[2 * j + level]; }
  std::span<const double> values() const { return data_; }
  std::span<double> values() { return data_; }

 private:
  std::vector<double> data_;
};

// Precomputed composition for repeated evaluation on one job. Input is the
// row-major (j, level) error vector of length 2n.
class JobErrorFunction {
 public:
  JobErrorFunction(const JobSpec& spec, ErrorModel model);

  double operator()(std::span<const double> zeta) const;
  std::size_t n() const { return n_; }

 private:
  ErrorModel model_;
  std::size_t n_;
  std::vector<std::vector<std::size_t>> tasks_;
  std::vector<std::vector<double>> skill_weights_;  // normalized within each task
  std::vector<double> task_weights_;                // normalized over tasks
};

double job_error(const JobSpec& spec, const ErrorModel& model, const ErrorMatrix& zeta);

// c_j such that Err = factor * sum_j c_j (zeta_j1 + zeta_j2), factor from
// ErrorModel::level_factor. Throws Error(kNotLinear) for Max models.
std::vector<double> effective_coefficients(const JobSpec& spec, const ErrorModel& model);

double lipschitz_bound(const JobSpec& spec, const ErrorModel& model);

}  // namespace jobfit
