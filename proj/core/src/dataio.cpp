#include "jobfit/dataio.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "jobfit/error.hpp"

namespace jobfit {
namespace {

[[noreturn]] void load_error(const std::string& where, const std::string& what) {
  fail(ErrorKind::kLoad, where + ": " + what);
}

const Json& member(const Json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) load_error(where, std::string("missing member '") + key + "'");
  return obj.at(key);
}

double unit_number(const Json& j, const std::string& where) {
  if (!j.is_number()) load_error(where, "must be a number");
  double x = j.get<double>();
  if (!std::isfinite(x) || x < 0.0 || x > 1.0) load_error(where, "must lie in [0, 1]");
  return x;
}

std::string text(const Json& j, const std::string& where) {
  if (!j.is_string()) load_error(where, "must be a string");
  return j.get<std::string>();
}

std::vector<std::size_t> index_list(const Json& j, const std::string& where, std::size_t n) {
  if (!j.is_array()) load_error(where, "must be an array of skill numbers");
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < j.size(); ++k) {
    const auto& e = j[k];
    const std::string at = where + "[" + std::to_string(k) + "]";
    if (!e.is_number_integer()) load_error(at, "must be an integer");
    auto v = e.get<long long>();
    if (v < 1 || static_cast<std::size_t>(v) > n) {
      load_error(at, "skill number " + std::to_string(v) + " outside 1.." + std::to_string(n));
    }
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

std::string trim(std::string s) {
  auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_decimal(const std::string& s, const std::string& where) {
  double x = 0.0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || end != s.data() + s.size()) load_error(where, "'" + s + "' is not a number");
  if (!std::isfinite(x) || x < 0.0 || x > 1.0) load_error(where, "must lie in [0, 1]");
  return x;
}

const char* noise_tag(NoiseKind k) { return k == NoiseKind::kUniformScaled ? "uniform_scaled" : "trunc_normal"; }

}  // namespace

DivisionMap::DivisionMap(std::string name, std::function<double(double)> psi)
    : name_(std::move(name)), psi_(std::move(psi)) {}

DivisionMap DivisionMap::identity() {
  return {"identity", [](double l) { return l; }};
}

DivisionMap DivisionMap::square() {
  return {"square", [](double l) { return l * l; }};
}

DivisionMap DivisionMap::saturating() {
  return {"saturating", [](double l) { return l / (l + (1.0 - l) * std::exp(-l)); }};
}

DivisionMap DivisionMap::custom(std::string name, std::function<double(double)> psi) {
  require(static_cast<bool>(psi), ErrorKind::kInvalidArgument, "division map is empty");
  constexpr double kTol = 1e-12;
  require(std::abs(psi(0.0)) <= kTol && std::abs(psi(1.0) - 1.0) <= kTol, ErrorKind::kInvalidArgument,
          "division map must satisfy psi(0) = 0 and psi(1) = 1");
  return {std::move(name), std::move(psi)};
}

DivisionMap DivisionMap::named(const std::string& name) {
  if (name == "identity") return identity();
  if (name == "square") return square();
  if (name == "saturating") return saturating();
  fail(ErrorKind::kInvalidArgument, "unknown division map '" + name + "'");
}

std::pair<double, double> divide_subskills(double proficiency, double lambda, const DivisionMap& psi) {
  require(proficiency >= 0.0 && proficiency <= 1.0 && lambda >= 0.0 && lambda <= 1.0,
          ErrorKind::kInvalidArgument, "proficiency and degree must lie in [0, 1]");
  const double share = psi(lambda);
  require(share >= 0.0 && share <= 1.0, ErrorKind::kInvalidArgument, "division map left [0, 1]");
  const double s1 = share * proficiency;
  return {s1, proficiency - s1};
}

std::pair<AbilityProfile, AbilityProfile> split_skill_profile(const AbilityProfile& skill_profile) {
  require(skill_profile.noise().kind == NoiseKind::kTruncNormal && !skill_profile.is_selection(),
          ErrorKind::kUnsupported, "only truncated-normal profiles can be split");
  const auto half = NoiseModel::trunc_normal_variance(skill_profile.noise().variance() / 2.0);
  AbilityProfile p = skill_profile.with_noise(half);
  return {p, p};
}

Worker undivided_worker(const Worker& split) {
  require(split.alpha1 == split.alpha2, ErrorKind::kUnsupported,
          "undivided worker needs identical split halves");
  require(split.alpha1.noise().kind == NoiseKind::kTruncNormal && !split.alpha1.is_selection(),
          ErrorKind::kUnsupported, "only truncated-normal profiles can be joined");
  const auto full = NoiseModel::trunc_normal_variance(2.0 * split.alpha1.noise().variance());
  return Worker(split.alpha1.with_noise(full), AbilityProfile::constant(1.0, NoiseModel::trunc_normal(0.0)),
                split.p);
}

RawJobRecord parse_job_record(const Json& doc) {
  const std::string root = "job";
  if (!doc.is_object()) load_error(root, "document must be a JSON object");
  const std::string schema = text(member(doc, "schema", root), "job.schema");
  if (schema != kJobSchema) load_error("job.schema", "unsupported schema '" + schema + "'");

  RawJobRecord r;
  r.name = doc.contains("name") ? text(doc.at("name"), "job.name") : std::string();
  r.tau = unit_number(member(doc, "tau", root), "job.tau");

  const Json& skills = member(doc, "skills", root);
  if (!skills.is_array() || skills.empty()) load_error("job.skills", "must be a non-empty array");
  for (std::size_t j = 0; j < skills.size(); ++j) {
    const std::string at = "job.skills[" + std::to_string(j) + "]";
    const Json& s = skills[j];
    RawSkill rs;
    rs.name = text(member(s, "name", at), at + ".name");
    rs.proficiency = unit_number(member(s, "proficiency", at), at + ".proficiency");
    rs.importance = unit_number(member(s, "importance", at), at + ".importance");
    rs.decision_degree = unit_number(member(s, "decision_degree", at), at + ".decision_degree");
    r.skills.push_back(std::move(rs));
  }
  const std::size_t n = r.skills.size();

  const Json& tasks = member(doc, "tasks", root);
  if (!tasks.is_array() || tasks.empty()) load_error("job.tasks", "must be a non-empty array");
  std::vector<int> uses(n + 1, 0);
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const std::string at = "job.tasks[" + std::to_string(i) + "]";
    const Json& t = tasks[i];
    RawTask rt;
    rt.name = text(member(t, "name", at), at + ".name");
    rt.importance = unit_number(member(t, "importance", at), at + ".importance");
    rt.skills = index_list(member(t, "skills", at), at + ".skills", n);
    if (rt.skills.empty()) load_error(at + ".skills", "task requires no skills");
    for (std::size_t j : rt.skills) ++uses[j];
    r.tasks.push_back(std::move(rt));
  }

  if (doc.contains("unused_skills")) r.unused_skills = index_list(doc.at("unused_skills"), "job.unused_skills", n);
  for (std::size_t j : r.unused_skills) {
    if (uses[j] > 0) load_error("job.unused_skills", "skill " + std::to_string(j) + " is required by a task");
  }
  for (std::size_t j = 1; j <= n; ++j) {
    bool declared = std::find(r.unused_skills.begin(), r.unused_skills.end(), j) != r.unused_skills.end();
    if (uses[j] == 0 && !declared) {
      load_error("job.skills[" + std::to_string(j - 1) + "]",
                 "skill '" + r.skills[j - 1].name + "' is required by no task and not listed in unused_skills");
    }
  }

  if (doc.contains("provenance")) {
    if (!doc.at("provenance").is_object()) load_error("job.provenance", "must be an object");
    r.provenance = doc.at("provenance");
  }
  static const char* known[] = {"schema", "name", "tau", "skills", "tasks", "unused_skills", "provenance"};
  for (const auto& [key, value] : doc.items()) {
    if (std::find(std::begin(known), std::end(known), key) == std::end(known)) r.extra[key] = value;
  }
  return r;
}

Json to_json(const RawJobRecord& r) {
  Json doc;
  doc["schema"] = kJobSchema;
  doc["name"] = r.name;
  doc["tau"] = r.tau;
  Json skills = Json::array();
  for (const auto& s : r.skills) {
    skills.push_back({{"name", s.name},
                      {"proficiency", s.proficiency},
                      {"importance", s.importance},
                      {"decision_degree", s.decision_degree}});
  }
  doc["skills"] = std::move(skills);
  Json tasks = Json::array();
  for (const auto& t : r.tasks) {
    tasks.push_back({{"name", t.name}, {"importance", t.importance}, {"skills", t.skills}});
  }
  doc["tasks"] = std::move(tasks);
  doc["unused_skills"] = r.unused_skills;
  doc["provenance"] = r.provenance;
  for (const auto& [key, value] : r.extra.items()) doc[key] = value;
  return doc;
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kLoad, "cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kLoad, path.string() + ": " + e.what());
  }
}

RawJobRecord read_job_record(const std::filesystem::path& path) {
  return parse_job_record(read_json_file(path));
}

JobSpec build_job_spec(const RawJobRecord& r, const DivisionMap& psi) {
  const std::size_t n = r.skills.size();
  std::vector<double> s1(n), s2(n), w(n), v;
  for (std::size_t j = 0; j < n; ++j) {
    std::tie(s1[j], s2[j]) = divide_subskills(r.skills[j].proficiency, r.skills[j].decision_degree, psi);
    w[j] = r.skills[j].importance;
  }
  std::vector<std::vector<std::size_t>> tasks;
  for (const auto& t : r.tasks) {
    v.push_back(t.importance);
    std::vector<std::size_t> zero_based;
    for (std::size_t j : t.skills) zero_based.push_back(j - 1);
    tasks.push_back(std::move(zero_based));
  }
  std::vector<std::size_t> inactive;
  for (std::size_t j : r.unused_skills) inactive.push_back(j - 1);
  return JobSpec(std::move(s1), std::move(s2), std::move(w), std::move(v), std::move(tasks), r.tau,
                 std::move(inactive));
}

JobSpec load_job_spec(const std::filesystem::path& path, const DivisionMap& psi) {
  return build_job_spec(read_job_record(path), psi);
}

JobSpec build_undivided_job_spec(const RawJobRecord& record) {
  RawJobRecord r = record;
  for (auto& s : r.skills) s.decision_degree = 1.0;
  return build_job_spec(r, DivisionMap::identity());
}

std::size_t BenchmarkTable::column_index(const std::string& name) const {
  auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) fail(ErrorKind::kInvalidArgument, "benchmark table has no column '" + name + "'");
  return static_cast<std::size_t>(it - columns.begin());
}

BenchmarkTable parse_benchmark_table(std::istream& in) {
  BenchmarkTable table;
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    auto cells = split_csv_line(t);
    const std::string where = "benchmark line " + std::to_string(line_no);
    if (!header) {
      if (cells.size() < 3 || cells[0] != "skill") {
        load_error(where, "header must be skill,<difficulty|ease>,<worker columns...>");
      }
      if (cells[1] != "difficulty" && cells[1] != "ease") {
        load_error(where, "second column must be 'difficulty' or 'ease'");
      }
      table.orientation = cells[1];
      table.columns.assign(cells.begin() + 2, cells.end());
      header = true;
      continue;
    }
    if (cells.size() != table.columns.size() + 2) {
      load_error(where, "expected " + std::to_string(table.columns.size() + 2) + " cells");
    }
    BenchmarkRow row;
    row.skill = cells[0];
    double score = parse_decimal(cells[1], where + " column " + table.orientation);
    row.difficulty = table.orientation == "ease" ? 1.0 - score : score;
    for (std::size_t k = 0; k < table.columns.size(); ++k) {
      const std::string& c = cells[k + 2];
      if (c == "NA") {
        row.accuracy.emplace_back(std::nullopt);
      } else {
        row.accuracy.emplace_back(parse_decimal(c, where + " column " + table.columns[k]));
      }
    }
    table.rows.push_back(std::move(row));
  }
  if (!header) fail(ErrorKind::kLoad, "benchmark table: missing header");
  return table;
}

BenchmarkTable load_benchmark_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kLoad, "cannot open " + path.string());
  return parse_benchmark_table(in);
}

LinearFit fit_benchmark_column(const BenchmarkTable& table, const std::string& column) {
  const std::size_t k = table.column_index(column);
  std::vector<DifficultyAccuracy> points;
  for (const auto& row : table.rows) {
    if (row.accuracy[k]) points.push_back({row.difficulty, *row.accuracy[k]});
  }
  return fit_linear_profile(points);
}

std::map<std::string, LinearFit> fit_benchmark_columns(const BenchmarkTable& table) {
  std::map<std::string, LinearFit> out;
  for (const auto& c : table.columns) out.emplace(c, fit_benchmark_column(table, c));
  return out;
}

Json to_json(const NoiseModel& noise) {
  return {{"kind", noise_tag(noise.kind)}, {"sigma", noise.sigma}};
}

NoiseModel noise_from_json(const Json& j) {
  const std::string kind = text(member(j, "kind", "noise"), "noise.kind");
  NoiseKind k;
  if (kind == "uniform_scaled") {
    k = NoiseKind::kUniformScaled;
  } else if (kind == "trunc_normal") {
    k = NoiseKind::kTruncNormal;
  } else {
    load_error("noise.kind", "unknown noise kind '" + kind + "'");
  }
  if (j.contains("variance")) {
    if (k != NoiseKind::kTruncNormal) load_error("noise.variance", "only valid for trunc_normal");
    return NoiseModel::trunc_normal_variance(j.at("variance").get<double>());
  }
  return {k, member(j, "sigma", "noise").get<double>()};
}

Json to_json(const AbilityProfile& profile) {
  Json j = std::visit(
      [](const auto& f) -> Json {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Constant>) {
          return {{"family", "constant"}, {"c", f.c}};
        } else if constexpr (std::is_same_v<T, Linear>) {
          return {{"family", "linear"}, {"a", f.a}, {"c", f.c}};
        } else if constexpr (std::is_same_v<T, Polynomial>) {
          return {{"family", "polynomial"}, {"beta", f.beta}};
        } else if constexpr (std::is_same_v<T, PiecewiseLinear>) {
          Json knots = Json::array();
          for (const auto& k : f.knots) knots.push_back({k.s, k.mean});
          return {{"family", "piecewise"}, {"knots", knots}};
        } else {
          return {{"family", "selection"},
                  {"first", to_json(*f.first)},
                  {"second", to_json(*f.second)},
                  {"second_scale", f.second_scale}};
        }
      },
      profile.family());
  if (!profile.is_selection()) j["noise"] = to_json(profile.noise());
  return j;
}

AbilityProfile profile_from_json(const Json& j) {
  const std::string family = text(member(j, "family", "profile"), "profile.family");
  try {
    if (family == "selection") {
      return AbilityProfile::selection(profile_from_json(member(j, "first", "profile")),
                                       profile_from_json(member(j, "second", "profile")),
                                       j.value("second_scale", 1.0));
    }
    NoiseModel noise = noise_from_json(member(j, "noise", "profile"));
    if (family == "constant") return AbilityProfile::constant(member(j, "c", "profile").get<double>(), noise);
    if (family == "linear") {
      return AbilityProfile::linear(member(j, "a", "profile").get<double>(), noise, j.value("c", 1.0));
    }
    if (family == "polynomial") {
      return AbilityProfile::polynomial(member(j, "beta", "profile").get<double>(), noise);
    }
    if (family == "piecewise") {
      std::vector<Knot> knots;
      for (const auto& k : member(j, "knots", "profile")) knots.push_back({k.at(0).get<double>(), k.at(1).get<double>()});
      return AbilityProfile::piecewise(std::move(knots), noise);
    }
  } catch (const nlohmann::json::exception& e) {
    load_error("profile", e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kLoad) throw;
    load_error("profile", e.what());
  }
  load_error("profile.family", "unknown family '" + family + "'");
}

Json to_json(const Worker& worker) {
  return {{"alpha1", to_json(worker.alpha1)}, {"alpha2", to_json(worker.alpha2)}, {"p", worker.p}};
}

Worker worker_from_json(const Json& j) {
  const double p = j.value("p", 0.0);
  if (j.value("split", false)) {
    auto [a1, a2] = split_skill_profile(profile_from_json(member(j, "skill_profile", "worker")));
    return Worker(a1, a2, p);
  }
  return Worker(profile_from_json(member(j, "alpha1", "worker")),
                profile_from_json(member(j, "alpha2", "worker")), p);
}

std::map<std::string, Worker> parse_workers(const Json& doc) {
  const std::string schema = text(member(doc, "schema", "workers"), "workers.schema");
  if (schema != kWorkersSchema) load_error("workers.schema", "unsupported schema '" + schema + "'");
  const Json& list = member(doc, "workers", "workers");
  if (!list.is_object()) load_error("workers.workers", "must be an object");
  std::map<std::string, Worker> out;
  for (const auto& [name, entry] : list.items()) out.emplace(name, worker_from_json(entry));
  return out;
}

std::map<std::string, Worker> load_workers(const std::filesystem::path& path) {
  return parse_workers(read_json_file(path));
}

}  // namespace jobfit
