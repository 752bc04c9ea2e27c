#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "jobfit/ability.hpp"
#include "jobfit/job.hpp"
#include "jobfit/worker.hpp"

namespace jobfit {

using Json = nlohmann::ordered_json;

// Monotone map psi on [0, 1] with psi(0) = 0 and psi(1) = 1 that sets the
// decision-level share of a skill's difficulty.
class DivisionMap {
 public:
  static DivisionMap identity();
  static DivisionMap square();
  // lambda / (lambda + (1 - lambda) e^{-lambda}). The variant with an extra
  // "+ 1" in the denominator gives psi(1) = 1/2 and is not a valid map.
  static DivisionMap saturating();
  static DivisionMap custom(std::string name, std::function<double(double)> psi);
  static DivisionMap named(const std::string& name);

  double operator()(double lambda) const { return psi_(lambda); }
  const std::string& name() const { return name_; }

 private:
  DivisionMap(std::string name, std::function<double(double)> psi);
  std::string name_;
  std::function<double(double)> psi_;
};

// (s1, s2) with s1 = psi(lambda) s and s1 + s2 = s.
std::pair<double, double> divide_subskills(double proficiency, double lambda,
                                           const DivisionMap& psi = DivisionMap::identity());

// Two copies of a TruncNormal profile, each with half the variance.
std::pair<AbilityProfile, AbilityProfile> split_skill_profile(const AbilityProfile& skill_profile);

struct RawSkill {
  std::string name;
  double proficiency = 0.0;
  double importance = 0.0;
  double decision_degree = 0.0;
  bool operator==(const RawSkill&) const = default;
};

struct RawTask {
  std::string name;
  double importance = 0.0;
  std::vector<std::size_t> skills;  // 1-based, as written in job files
  bool operator==(const RawTask&) const = default;
};

struct RawJobRecord {
  std::string name;
  double tau = 0.0;
  std::vector<RawSkill> skills;
  std::vector<RawTask> tasks;
  std::vector<std::size_t> unused_skills;  // 1-based
  Json provenance = Json::object();
  Json extra = Json::object();  // unrecognised top-level members, kept verbatim
  bool operator==(const RawJobRecord&) const = default;
};

inline constexpr const char* kJobSchema = "jobfit.job/1";

// Throws Error(kLoad) naming the offending member.
RawJobRecord parse_job_record(const Json& document);
Json to_json(const RawJobRecord& record);
RawJobRecord read_job_record(const std::filesystem::path& path);

JobSpec build_job_spec(const RawJobRecord& record, const DivisionMap& psi = DivisionMap::identity());
JobSpec load_job_spec(const std::filesystem::path& path, const DivisionMap& psi = DivisionMap::identity());

// Same job without subskill division: every skill sits entirely at the
// decision level and the action level has difficulty 0.
JobSpec build_undivided_job_spec(const RawJobRecord& record);

// Inverse of split_skill_profile for a worker: the decision level gets the
// whole skill profile and the action level is error-free. Pair with
// build_undivided_job_spec.
Worker undivided_worker(const Worker& split);

// Benchmark accuracy table. The second CSV column declares how the per-skill
// score is oriented: "difficulty" is used as is, "ease" is converted to
// difficulty = 1 - ease.
struct BenchmarkRow {
  std::string skill;
  double difficulty = 0.0;
  std::vector<std::optional<double>> accuracy;
};

struct BenchmarkTable {
  std::string orientation;
  std::vector<std::string> columns;
  std::vector<BenchmarkRow> rows;

  std::size_t column_index(const std::string& name) const;
};

BenchmarkTable parse_benchmark_table(std::istream& in);
BenchmarkTable load_benchmark_table(const std::filesystem::path& path);
LinearFit fit_benchmark_column(const BenchmarkTable& table, const std::string& column);
std::map<std::string, LinearFit> fit_benchmark_columns(const BenchmarkTable& table);

Json to_json(const NoiseModel& noise);
NoiseModel noise_from_json(const Json& j);
Json to_json(const AbilityProfile& profile);
AbilityProfile profile_from_json(const Json& j);
Json to_json(const Worker& worker);
Worker worker_from_json(const Json& j);

inline constexpr const char* kWorkersSchema = "jobfit.workers/1";

// Named workers. An entry either lists `alpha1`/`alpha2` directly or gives an
// undivided `skill_profile` with `"split": true`, in which case both levels
// get split_skill_profile's halves.
std::map<std::string, Worker> parse_workers(const Json& document);
std::map<std::string, Worker> load_workers(const std::filesystem::path& path);

Json read_json_file(const std::filesystem::path& path);

}  // namespace jobfit
