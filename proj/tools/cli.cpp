#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "jobfit/jobfit.hpp"

namespace jobfit::cli {
namespace {

namespace fs = std::filesystem;

struct Options {
  // global
  std::string job;
  std::string balanced;  // "n,m,k"
  std::uint64_t job_seed = 1;
  std::string workers_file;
  std::uint64_t seed = kDefaultSeed;
  std::size_t trials = kDefaultTrials;
  unsigned threads = 0;
  std::string out;
  std::string format = "json";
  std::optional<double> tau;
  std::string h, g, f;
  std::string psi = "identity";
  bool undivided = false;

  // worker
  std::string worker = "human";
  std::optional<double> a1, a2, c1, c2, sigma, sigma1, sigma2, p;
  std::string noise = "trunc";
  std::string partner;
  std::string low, high, ai;

  // analyses
  std::string knob, grid, knob2, grid2;
  bool no_crn = false;
  double trust = 1.0;
  int vary = 1;
  double theta = 0.1;
  std::string convention = "general";
  std::string strategy = "per-subskill";
  std::string pick = "AB";
  double beta = 1.0;
  double qualify = 0.8;
  double reject = 0.6;
  std::string curve;
  double s = 0.0;
  double lambda = 0.0;
  std::string table;
  std::string column;
  std::string manifest;
};

std::string default_fixture(const char* name) {
  return (fs::path(JOBFIT_DEFAULT_FIXTURE_DIR) / name).string();
}

std::vector<double> parse_grid(const std::string& spec) {
  std::vector<double> out;
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  try {
    if (parts.size() == 3) {
      const double lo = std::stod(parts[0]);
      const double hi = std::stod(parts[1]);
      const long steps = std::stol(parts[2]);
      require(steps >= 1, ErrorKind::kInvalidArgument, "grid needs at least one step");
      if (steps == 1) return {lo};
      for (long i = 0; i < steps; ++i) out.push_back(lo + (hi - lo) * static_cast<double>(i) / (steps - 1));
      return out;
    }
    if (parts.size() == 1) {
      std::stringstream vs(spec);
      while (std::getline(vs, item, ',')) out.push_back(std::stod(item));
      if (!out.empty()) return out;
    }
  } catch (const std::logic_error&) {
  }
  fail(ErrorKind::kInvalidArgument, "grid '" + spec + "' must be lo:hi:steps or a comma-separated list");
}

std::map<std::string, std::string> parse_pairs(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto eq = item.find('=');
    require(eq != std::string::npos, ErrorKind::kInvalidArgument,
            "worker spec entry '" + item + "' is not key=value");
    kv[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return kv;
}

double to_number(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    double x = std::stod(s, &used);
    if (used == s.size()) return x;
  } catch (const std::logic_error&) {
  }
  fail(ErrorKind::kInvalidArgument, what + ": '" + s + "' is not a number");
}

NoiseKind noise_kind(const std::string& s) {
  if (s == "trunc" || s == "trunc_normal") return NoiseKind::kTruncNormal;
  if (s == "uniform" || s == "uniform_scaled") return NoiseKind::kUniformScaled;
  fail(ErrorKind::kInvalidArgument, "unknown noise kind '" + s + "'");
}

// Worker from a fixture name or a "key=value,..." spec. Keys: a1 a2 c1 c2
// noise sigma sigma1 sigma2 var var1 var2 p.
Worker worker_from_spec(const std::string& spec, const std::map<std::string, Worker>& named) {
  if (auto it = named.find(spec); it != named.end()) return it->second;
  require(spec.find('=') != std::string::npos, ErrorKind::kInvalidArgument,
          "unknown worker '" + spec + "'");
  auto kv = parse_pairs(spec);
  static const char* known[] = {"a1", "a2", "c1", "c2", "noise", "sigma", "sigma1", "sigma2", "var", "var1", "var2", "p"};
  for (const auto& [k, v] : kv) {
    require(std::find(std::begin(known), std::end(known), k) != std::end(known), ErrorKind::kInvalidArgument,
            "unknown worker spec key '" + k + "'");
  }
  auto num = [&](const std::string& k) -> std::optional<double> {
    if (auto it = kv.find(k); it != kv.end()) return to_number(it->second, k);
    return std::nullopt;
  };
  const NoiseKind kind = kv.count("noise") ? noise_kind(kv["noise"]) : NoiseKind::kTruncNormal;
  auto level = [&](const char* a, const char* c, const char* sg, const char* var) {
    double sd = 0.0;
    if (auto x = num(sg)) {
      sd = *x;
    } else if (auto v = num(var)) {
      sd = std::sqrt(*v);
    } else if (auto x2 = num("sigma")) {
      sd = *x2;
    } else if (auto v2 = num("var")) {
      sd = std::sqrt(*v2);
    }
    NoiseModel noise{kind, sd};
    if (auto av = num(a)) return AbilityProfile::linear(*av, noise, num(c).value_or(1.0));
    if (auto cv = num(c)) return AbilityProfile::constant(*cv, noise);
    fail(ErrorKind::kInvalidArgument, std::string("worker spec needs ") + a + " or " + c);
  };
  return Worker(level("a1", "c1", "sigma1", "var1"), level("a2", "c2", "sigma2", "var2"), num("p").value_or(0.0));
}

class Command {
 public:
  Command(std::string name, const Options& o, std::ostream& out) : name_(std::move(name)), o_(o), out_(out) {}

  const std::map<std::string, Worker>& named_workers() {
    if (!named_) {
      named_ = o_.workers_file.empty() ? load_workers(default_fixture("workers.json")) : load_workers(o_.workers_file);
      config_["workers_file"] = o_.workers_file.empty() ? "<bundled>/workers.json" : o_.workers_file;
    }
    return *named_;
  }

  JobSpec job() {
    JobSpec spec = [&] {
      if (!o_.balanced.empty()) {
        auto dims = parse_grid(o_.balanced);
        require(dims.size() == 3, ErrorKind::kInvalidArgument, "--balanced expects n,m,k");
        config_["job"] = {{"balanced", {{"n", dims[0]}, {"m", dims[1]}, {"k", dims[2]}}}, {"job_seed", o_.job_seed}};
        return random_balanced_job(static_cast<std::size_t>(dims[0]), static_cast<std::size_t>(dims[1]),
                                   static_cast<std::size_t>(dims[2]), o_.tau.value_or(0.25), o_.job_seed);
      }
      const std::string path = o_.job.empty() ? default_fixture("computer_programmers.json") : o_.job;
      config_["job"] = {{"path", o_.job.empty() ? "<bundled>/computer_programmers.json" : o_.job},
                        {"psi", o_.psi},
                        {"undivided", o_.undivided}};
      auto record = read_job_record(path);
      return o_.undivided ? build_undivided_job_spec(record) : build_job_spec(record, DivisionMap::named(o_.psi));
    }();
    if (o_.tau) spec = spec.with_tau(*o_.tau);
    config_["tau"] = spec.tau();
    return spec;
  }

  ErrorModel model() {
    const bool balanced = !o_.balanced.empty();
    ErrorModel m = balanced ? ErrorModel::all_average() : ErrorModel::weighted_sum();
    if (!o_.h.empty()) m.h = parse_skill_aggregator(o_.h);
    if (!o_.g.empty()) m.g = parse_aggregator(o_.g);
    if (!o_.f.empty()) m.f = parse_aggregator(o_.f);
    config_["model"] = {{"h", to_string(m.h)}, {"g", to_string(m.g)}, {"f", to_string(m.f)}};
    return m;
  }

  Worker worker_named(const std::string& role, const std::string& spec) {
    Worker w = worker_from_spec(spec, spec.find('=') == std::string::npos ? named_workers() : empty_);
    config_["workers"][role] = {{"spec", spec}, {"resolved", to_json(w)}};
    return w;
  }

  // The primary worker: explicit level flags win over --worker.
  Worker primary_worker() {
    const bool explicit_levels = o_.a1 || o_.a2 || o_.c1 || o_.c2;
    if (!explicit_levels) {
      Worker w = worker_named("worker", o_.worker);
      if (o_.undivided) w = undivided_worker(w);
      if (o_.p) w = Worker(w.alpha1, w.alpha2, *o_.p);
      if (o_.sigma || o_.sigma1 || o_.sigma2) {
        auto with = [](const AbilityProfile& a, std::optional<double> s) {
          return s ? a.with_noise({a.noise().kind, *s}) : a;
        };
        w = Worker(with(w.alpha1, o_.sigma1 ? o_.sigma1 : o_.sigma), with(w.alpha2, o_.sigma2 ? o_.sigma2 : o_.sigma), w.p);
      }
      config_["workers"]["worker"]["resolved"] = to_json(w);
      return w;
    }
    std::ostringstream spec;
    spec << "noise=" << o_.noise;
    auto put = [&](const char* k, const std::optional<double>& v) {
      if (v) spec << ',' << k << '=' << format_number(*v);
    };
    put("a1", o_.a1);
    put("a2", o_.a2);
    put("c1", o_.c1);
    put("c2", o_.c2);
    put("sigma", o_.sigma);
    put("sigma1", o_.sigma1);
    put("sigma2", o_.sigma2);
    put("p", o_.p);
    return worker_named("worker", spec.str());
  }

  SimConfig sim() {
    SimConfig c;
    c.trials = o_.trials;
    c.seed = o_.seed;
    c.threads = o_.threads;
    config_["trials"] = c.trials;
    config_["seed"] = c.seed;
    return c;
  }

  Json& config() { return config_; }

  void emit_json(const Json& payload) { emit(payload.dump(2) + "\n"); }

  void emit(const std::string& payload) {
    if (o_.out.empty()) {
      out_ << payload;
      return;
    }
    write_file(o_.out, payload);
    outputs_.push_back(o_.out);
  }

  void require_json() {
    require(o_.format == "json", ErrorKind::kInvalidArgument, name_ + " only supports --format json");
  }

  void finish(const std::vector<std::string>& argv) {
    if (o_.out.empty()) return;
    Json manifest;
    manifest["tool"] = "jobfit";
    manifest["version"] = JOBFIT_VERSION;
    manifest["subcommand"] = name_;
    manifest["argv"] = argv;
    manifest["config"] = config_;
    manifest["outputs"] = outputs_;
    write_file(o_.out + ".manifest.json", manifest.dump(2) + "\n");
  }

 private:
  static void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    require(static_cast<bool>(f), ErrorKind::kInvalidArgument, "cannot write " + path);
    f << text;
  }

  std::string name_;
  const Options& o_;
  std::ostream& out_;
  Json config_ = Json::object();
  std::vector<std::string> outputs_;
  std::optional<std::map<std::string, Worker>> named_;
  const std::map<std::string, Worker> empty_;
};

void cmd_estimate(Command& c, const Options& o) {
  const JobSpec spec = c.job();
  const ErrorModel model = c.model();
  const Worker w = c.primary_worker();
  const SimConfig cfg = c.sim();
  const auto errors = simulate_job_errors(w, spec, model, cfg);
  const SimEstimate p = success_estimate(errors, spec.tau(), cfg);
  const SimEstimate e = mean_estimate(errors, cfg);
  if (o.format == "csv") {
    std::ostringstream csv;
    csv << "p_hat,stderr,ci_lo,ci_hi,trials,seed\n"
        << format_number(p.value) << ',' << format_number(p.std_error) << ',' << format_number(p.ci_lo) << ','
        << format_number(p.ci_hi) << ',' << p.trials << ',' << p.seed << '\n';
    c.emit(csv.str());
    return;
  }
  Json err_avg = to_json(e);
  if (auto exact = closed_form_err_avg(w, spec, model)) err_avg["exact"] = *exact;
  c.emit_json({{"P", to_json(p)}, {"err_avg", err_avg}, {"tau", spec.tau()}});
}

void cmd_sweep(Command& c, const Options& o) {
  require(!o.knob.empty() && !o.grid.empty(), ErrorKind::kInvalidArgument, "sweep needs --knob and --grid");
  JobSpec spec = c.job();
  const ErrorModel model = c.model();
  Scenario sc{c.primary_worker(), spec, std::nullopt, o.trust};
  if (!o.partner.empty()) sc.merge_partner = c.worker_named("partner", o.partner);
  const SimConfig cfg = c.sim();
  const Knob k1 = parse_knob(o.knob);
  const auto g1 = parse_grid(o.grid);
  c.config()["sweep"] = {{"knob", to_string(k1)}, {"grid", g1}, {"crn", !o.no_crn}, {"trust", o.trust}};
  if (o.knob2.empty()) {
    auto rows = sweep(sc, model, k1, g1, cfg, !o.no_crn);
    if (o.format == "csv") {
      c.emit(sweep_csv(k1, rows));
    } else {
      Json arr = Json::array();
      for (const auto& r : rows) arr.push_back({{"param", to_string(k1)}, {"value", r.value}, {"estimate", to_json(r.estimate)}});
      c.emit_json({{"rows", arr}});
    }
    return;
  }
  c.require_json();
  const Knob k2 = parse_knob(o.knob2);
  const auto g2 = parse_grid(o.grid2);
  c.config()["sweep"]["knob2"] = to_string(k2);
  c.config()["sweep"]["grid2"] = g2;
  c.emit_json(to_json(sweep2d(sc, model, k1, g1, k2, g2, cfg, !o.no_crn), k1, k2));
}

DispersionConvention convention(const std::string& s) {
  if (s == "main") return DispersionConvention::kMain;
  if (s == "general") return DispersionConvention::kGeneral;
  fail(ErrorKind::kInvalidArgument, "unknown convention '" + s + "'");
}

void cmd_phase(Command& c, const Options& o) {
  c.require_json();
  const JobSpec spec = c.job();
  const ErrorModel model = c.model();
  const Worker w = c.primary_worker();
  PhaseOptions opts;
  opts.simulation = c.sim();
  opts.expected.monte_carlo.seed = o.seed;
  opts.convention = convention(o.convention);
  require(o.vary == 1 || o.vary == 2, ErrorKind::kInvalidArgument, "--vary must be 1 or 2");
  c.config()["phase"] = {{"vary", o.vary}, {"theta", o.theta}, {"convention", o.convention}};
  const auto report =
      verify_phase_transition(spec, model, w, o.vary == 1 ? Level::kDecision : Level::kAction, o.theta, opts);
  c.emit_json(to_json(report));
}

void cmd_merge(Command& c, const Options& o) {
  c.require_json();
  require(!o.partner.empty(), ErrorKind::kInvalidArgument, "merge needs --partner");
  const JobSpec spec = c.job();
  const ErrorModel model = c.model();
  const Worker a = c.primary_worker();
  const Worker b = c.worker_named("partner", o.partner);
  const SimConfig cfg = c.sim();
  c.config()["merge"] = {{"strategy", o.strategy}, {"trust", o.trust}, {"pick", o.pick}, {"theta", o.theta}};
  if (o.strategy == "condition") {
    PhaseOptions opts;
    opts.simulation = cfg;
    opts.expected.monte_carlo.seed = o.seed;
    opts.convention = convention(o.convention);
    c.emit_json(to_json(merging_condition(a, b, spec, model, o.theta, opts)));
    return;
  }
  MergeResult merged = [&] {
    if (o.strategy == "uniform") {
      require(o.pick.size() == 2, ErrorKind::kInvalidArgument, "--pick expects two letters, e.g. AB");
      auto src = [](char ch) {
        require(ch == 'A' || ch == 'B', ErrorKind::kInvalidArgument, "--pick letters must be A or B");
        return ch == 'A' ? Source::kA : Source::kB;
      };
      return merge_uniform(a, b, {src(o.pick[0]), src(o.pick[1])}, spec);
    }
    if (o.strategy == "per-subskill") return merge_per_subskill(a, b, spec);
    if (o.strategy == "trust") return merge_with_trust(a, b, spec, o.trust);
    fail(ErrorKind::kInvalidArgument, "unknown merge strategy '" + o.strategy + "'");
  }();
  std::vector<Worker> bases{a, b};
  std::vector<Worker> candidates{merged.worker};
  const auto gain = evaluate_merge_gain(bases, candidates, spec, model, cfg);
  c.emit_json({{"plan", to_json(merged.plan)},
               {"P_A", to_json(gain.bases[0])},
               {"P_B", to_json(gain.bases[1])},
               {"P_merge", to_json(gain.candidates[0])},
               {"delta", gain.delta}});
}

void cmd_compress(Command& c, const Options& o) {
  c.require_json();
  require(!o.low.empty() && !o.high.empty() && !o.ai.empty(), ErrorKind::kInvalidArgument,
          "compress needs --low, --high and --ai");
  const JobSpec spec = c.job();
  const ErrorModel model = c.model();
  const Worker low = c.worker_named("low", o.low);
  const Worker high = c.worker_named("high", o.high);
  const Worker ai = c.worker_named("ai", o.ai);
  PhaseOptions opts;
  opts.simulation = c.sim();
  opts.expected.monte_carlo.seed = o.seed;
  opts.convention = convention(o.convention);
  c.config()["compress"] = {{"theta", o.theta}};
  c.emit_json(to_json(compression_bound(low, high, ai, spec, model, o.theta, opts)));
}

TabulatedCurve read_curve(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::kLoad, "cannot open " + path);
  TabulatedCurve curve;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      header = true;
      require(line.rfind("a,p", 0) == 0, ErrorKind::kLoad, path + ": header must start with a,p");
      continue;
    }
    auto comma = line.find(',');
    require(comma != std::string::npos, ErrorKind::kLoad, path + ": malformed row '" + line + "'");
    curve.a.push_back(to_number(line.substr(0, comma), "curve a"));
    curve.p.push_back(to_number(line.substr(comma + 1), "curve p"));
  }
  return curve;
}

void cmd_bias(Command& c, const Options& o) {
  c.require_json();
  TabulatedCurve curve;
  if (!o.curve.empty()) {
    curve = read_curve(o.curve);
    c.config()["curve"] = o.curve;
  } else {
    const JobSpec spec = c.job();
    const ErrorModel model = c.model();
    const Worker w = c.primary_worker();
    const auto grid = parse_grid(o.grid.empty() ? "0:1:101" : o.grid);
    auto rows = sweep(Scenario{w, spec, std::nullopt, 1.0}, model, Knob::kA1, grid, c.sim(), true);
    for (const auto& r : rows) {
      curve.a.push_back(r.value);
      curve.p.push_back(r.estimate.value);
    }
    c.config()["curve"] = {{"knob", "a1"}, {"grid", grid}};
  }
  c.config()["bias"] = {{"beta", o.beta}, {"qualify", o.qualify}, {"reject", o.reject}};
  const auto t = bias_thresholds(curve, o.qualify, o.reject);
  const double r = bias_misclassification_rate(o.beta, curve, o.qualify, o.reject);
  c.emit_json({{"beta", o.beta}, {"a_qualify", t.a_qualify}, {"a_reject", t.a_reject}, {"r_beta", r}});
}

void cmd_divide(Command& c, const Options& o, bool whole_job) {
  const DivisionMap psi = DivisionMap::named(o.psi);
  c.config()["divide"] = {{"psi", o.psi}};
  if (!whole_job) {
    auto [s1, s2] = divide_subskills(o.s, o.lambda, psi);
    c.config()["divide"]["s"] = o.s;
    c.config()["divide"]["lambda"] = o.lambda;
    if (o.format == "csv") {
      c.emit("s,lambda,s1,s2\n" + format_number(o.s) + "," + format_number(o.lambda) + "," + format_number(s1) +
             "," + format_number(s2) + "\n");
    } else {
      c.emit_json({{"s", o.s}, {"lambda", o.lambda}, {"s1", s1}, {"s2", s2}});
    }
    return;
  }
  const std::string path = o.job.empty() ? default_fixture("computer_programmers.json") : o.job;
  const auto record = read_job_record(path);
  c.config()["job"] = {{"path", o.job.empty() ? "<bundled>/computer_programmers.json" : o.job}};
  std::ostringstream csv;
  csv << "skill,name,s,lambda,s1,s2\n";
  Json rows = Json::array();
  for (std::size_t j = 0; j < record.skills.size(); ++j) {
    const auto& sk = record.skills[j];
    auto [s1, s2] = divide_subskills(sk.proficiency, sk.decision_degree, psi);
    csv << j + 1 << ",\"" << sk.name << "\"," << format_number(sk.proficiency) << ','
        << format_number(sk.decision_degree) << ',' << format_number(s1) << ',' << format_number(s2) << '\n';
    rows.push_back({{"skill", j + 1}, {"name", sk.name}, {"s", sk.proficiency}, {"lambda", sk.decision_degree},
                    {"s1", s1}, {"s2", s2}});
  }
  if (o.format == "csv") {
    c.emit(csv.str());
  } else {
    c.emit_json({{"skills", rows}});
  }
}

void cmd_fit(Command& c, const Options& o) {
  c.require_json();
  const std::string path = o.table.empty() ? default_fixture("bbl_accuracy.csv") : o.table;
  c.config()["table"] = o.table.empty() ? "<bundled>/bbl_accuracy.csv" : o.table;
  const auto table = load_benchmark_table(path);
  Json fits = Json::object();
  auto add = [&](const std::string& col) {
    const auto fit = fit_benchmark_column(table, col);
    fits[col] = {{"a", fit.a}, {"sigma_sq", fit.sigma_sq}, {"points", fit.points}};
  };
  if (!o.column.empty()) {
    add(o.column);
  } else {
    for (const auto& col : table.columns) add(col);
  }
  c.emit_json({{"orientation", table.orientation}, {"fits", fits}});
}

void add_worker_flags(CLI::App* sub, Options& o) {
  sub->add_option("--worker", o.worker, "Worker name from the workers fixture or key=value spec");
  sub->add_option("--a1", o.a1, "Decision-level slope a (linear profile)");
  sub->add_option("--a2", o.a2, "Action-level slope a (linear profile)");
  sub->add_option("--c1", o.c1, "Decision-level constant c");
  sub->add_option("--c2", o.c2, "Action-level constant c");
  sub->add_option("--noise", o.noise, "Noise kind: trunc or uniform")->check(CLI::IsMember({"trunc", "uniform"}));
  sub->add_option("--sigma", o.sigma, "Noise level of both levels");
  sub->add_option("--sigma1", o.sigma1, "Decision-level noise level");
  sub->add_option("--sigma2", o.sigma2, "Action-level noise level");
  sub->add_option("--p", o.p, "Dependency probability");
}

void add_job_flags(CLI::App* sub, Options& o) {
  sub->set_help_flag("--help", "Print this help message and exit");
  sub->add_option("--tau", o.tau, "Success threshold");
  sub->add_option("--h", o.h, "Skill aggregator: average, max, sum");
  sub->add_option("--g", o.g, "Task aggregator: average, weighted, max");
  sub->add_option("--f", o.f, "Job aggregator: average, weighted, max");
  sub->add_option("--psi", o.psi, "Division map: identity, square, saturating");
  sub->add_flag("--undivided", o.undivided, "Put each whole skill at the decision level");
  sub->add_option("--balanced", o.balanced, "Random balanced job n,m,k instead of --job");
  sub->add_option("--job-seed", o.job_seed, "Seed for the balanced job's difficulties");
}

int run_once(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, int depth);

int replay(const std::string& manifest_path, const std::string& out_override, std::ostream& out,
           std::ostream& err, int depth) {
  require(depth == 0, ErrorKind::kInvalidArgument, "a manifest cannot replay another manifest");
  const Json m = read_json_file(manifest_path);
  require(m.contains("argv") && m["argv"].is_array(), ErrorKind::kLoad, manifest_path + ": missing argv");
  auto argv = m["argv"].get<std::vector<std::string>>();
  if (!out_override.empty()) {
    bool replaced = false;
    for (std::size_t i = 0; i + 1 < argv.size(); ++i) {
      if (argv[i] == "--out") {
        argv[i + 1] = out_override;
        replaced = true;
      }
    }
    if (!replaced) {
      argv.push_back("--out");
      argv.push_back(out_override);
    }
  }
  return run_once(argv, out, err, depth + 1);
}

int run_once(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, int depth) {
  Options o;
  CLI::App app{"Job-worker fit simulator", "jobfit"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--job", o.job, "Job fixture (JSON)");
  app.add_option("--workers", o.workers_file, "Workers fixture (JSON)");
  app.add_option("--seed", o.seed, "Master seed")->capture_default_str();
  app.add_option("--trials", o.trials, "Monte Carlo trials per point")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--threads", o.threads, "Worker threads (0 = hardware concurrency)");
  app.add_option("--out", o.out, "Output file; a run manifest is written next to it");
  app.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();

  auto* estimate = app.add_subcommand("estimate", "Job success probability of one worker");
  add_worker_flags(estimate, o);
  add_job_flags(estimate, o);

  auto* sweep_cmd = app.add_subcommand("sweep", "Success probability along one or two knobs");
  add_worker_flags(sweep_cmd, o);
  add_job_flags(sweep_cmd, o);
  sweep_cmd->add_option("--knob", o.knob, "a1 (alias a), a2, c, c1, sigma, sigma1, sigma2, p, tau, trust");
  sweep_cmd->add_option("--grid", o.grid, "lo:hi:steps or comma list");
  sweep_cmd->add_option("--knob2", o.knob2, "Second knob for a heatmap");
  sweep_cmd->add_option("--grid2", o.grid2, "Grid of the second knob");
  sweep_cmd->add_flag("--no-crn", o.no_crn, "Independent random numbers per grid point");
  sweep_cmd->add_option("--partner", o.partner, "Merge partner (A); the swept worker is B");
  sweep_cmd->add_option("--trust", o.trust, "Trust factor for the merge");

  auto* phase = app.add_subcommand("phase", "Critical ability, transition width and empirical check");
  add_worker_flags(phase, o);
  add_job_flags(phase, o);
  phase->add_option("--vary", o.vary, "Level whose ability parameter varies (1 or 2)");
  phase->add_option("--theta", o.theta, "Confidence level in (0, 0.5)");
  phase->add_option("--convention", o.convention, "Dispersion convention: main or general");

  auto* merge = app.add_subcommand("merge", "Merge two workers and report the gain");
  add_worker_flags(merge, o);
  add_job_flags(merge, o);
  merge->add_option("--partner", o.partner, "Second worker (B)");
  merge->add_option("--strategy", o.strategy, "uniform, per-subskill, trust or condition");
  merge->add_option("--pick", o.pick, "Uniform merge sources for decision and action, e.g. AB");
  merge->add_option("--trust", o.trust, "Trust factor applied to B's action level");
  merge->add_option("--theta", o.theta, "Confidence level for --strategy condition");
  merge->add_option("--convention", o.convention, "Dispersion convention: main or general");

  auto* compress = app.add_subcommand("compress", "Productivity compression from merging with an AI worker");
  add_job_flags(compress, o);
  compress->add_option("--low", o.low, "Lower-skilled worker");
  compress->add_option("--high", o.high, "Higher-skilled worker");
  compress->add_option("--ai", o.ai, "AI worker");
  compress->add_option("--theta", o.theta, "Confidence level");
  compress->add_option("--convention", o.convention, "Dispersion convention: main or general");

  auto* bias = app.add_subcommand("bias", "Misclassification rate under biased ability estimates");
  add_worker_flags(bias, o);
  add_job_flags(bias, o);
  bias->add_option("--beta", o.beta, "Bias factor in (0, 1]");
  bias->add_option("--qualify", o.qualify, "Qualify threshold on P");
  bias->add_option("--reject", o.reject, "Reject threshold on P");
  bias->add_option("--curve", o.curve, "CSV with a,p columns; otherwise simulated over --grid");
  bias->add_option("--grid", o.grid, "Grid over the decision-level slope a1");

  auto* divide = app.add_subcommand("divide", "Split skill difficulty into decision and action parts");
  divide->add_option("--s", o.s, "Skill proficiency");
  divide->add_option("--lambda", o.lambda, "Decision-level degree");
  divide->add_option("--psi", o.psi, "Division map: identity, square, saturating");

  auto* fit = app.add_subcommand("fit", "Fit linear ability profiles to a benchmark table");
  fit->add_option("--table", o.table, "Benchmark CSV");
  fit->add_option("--column", o.column, "Only this worker column");

  auto* replay_cmd = app.add_subcommand("replay", "Re-run the invocation recorded in a manifest");
  replay_cmd->add_option("manifest", o.manifest, "Manifest file")->required();

  std::vector<const char*> argv{"jobfit"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "jobfit: " << e.what() << "\n";
    return kExitValidation;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    if (name == "replay") return replay(o.manifest, o.out, out, err, depth);
    Command cmd(name, o, out);
    if (name == "estimate") cmd_estimate(cmd, o);
    if (name == "sweep") cmd_sweep(cmd, o);
    if (name == "phase") cmd_phase(cmd, o);
    if (name == "merge") cmd_merge(cmd, o);
    if (name == "compress") cmd_compress(cmd, o);
    if (name == "bias") cmd_bias(cmd, o);
    if (name == "divide") cmd_divide(cmd, o, divide->count("--s") == 0 && divide->count("--lambda") == 0);
    if (name == "fit") cmd_fit(cmd, o);
    cmd.finish(args);
  } catch (const Error& e) {
    err << "jobfit " << name << ": " << to_string(e.kind()) << ": " << e.what() << "\n";
    return is_numerical(e.kind()) ? kExitNumerical : kExitValidation;
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  return run_once(args, out, err, 0);
}

}  // namespace jobfit::cli
