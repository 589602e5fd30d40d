#include "dimlab/report.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "dimlab/assouad.hpp"
#include "dimlab/covering.hpp"
#include "dimlab/errors.hpp"

namespace dimlab {
namespace {

void reject_unknown(const Json& j, std::initializer_list<const char*> allowed,
                    const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  const std::set<std::string> known(allowed.begin(), allowed.end());
  for (const auto& item : j.items())
    if (!known.contains(item.key()))
      throw ConfigError(where + ": unknown key '" + item.key() + "'");
}

template <class T>
void read(const Json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

SetSpec set_from_json(const Json& j, const std::string& where) {
  reject_unknown(j, {"generator", "p", "n", "depth", "points", "dim", "csv", "embed", "factors"},
                 where);
  SetSpec s;
  read(j, "generator", s.generator);
  read(j, "p", s.p);
  read(j, "n", s.n);
  read(j, "depth", s.depth);
  read(j, "points", s.points);
  read(j, "dim", s.dim);
  read(j, "csv", s.csv);
  read(j, "embed", s.embed);
  if (j.contains("factors"))
    for (const auto& f : j.at("factors")) s.factors.push_back(set_from_json(f, where + ".factors"));
  return s;
}

Json set_to_json(const SetSpec& s) {
  Json j = {{"generator", s.generator}, {"p", s.p},         {"n", s.n},
            {"depth", s.depth},         {"points", s.points}, {"dim", s.dim},
            {"csv", s.csv},             {"embed", s.embed}};
  Json factors = Json::array();
  for (const auto& f : s.factors) factors.push_back(set_to_json(f));
  j["factors"] = factors;
  return j;
}

Json slacks_to_json(const Slacks& s) {
  Json j = Json::object();
  Slacks copy = s;
  for (const auto& name : slack_names()) j[name] = *slack_field(copy, name);
  return j;
}

template <class T>
T override_or(const Json& overrides, const char* key, T fallback) {
  return overrides.contains(key) ? overrides.at(key).get<T>() : fallback;
}

struct Fnv {
  std::uint64_t h = 0xcbf29ce484222325ull;
  void add(const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ull;
    }
  }
};

}  // namespace

const std::vector<std::string>& check_names() {
  static const std::vector<std::string> names{
      "projection_profile", "marstrand_quasi", "spectrum_bound",   "profile_ratio",
      "banaji",             "fbm",             "box_collapse", "exceptional_frequency"};
  return names;
}

const std::vector<std::string>& slack_names() {
  static const std::vector<std::string> names{
      "projection", "marstrand", "spectrum_bound", "profile_ratio",
      "banaji",     "fbm",       "box_collapse", "box_collapse_gate"};
  return names;
}

double* slack_field(Slacks& s, const std::string& name) {
  if (name == "projection") return &s.projection;
  if (name == "marstrand") return &s.marstrand;
  if (name == "spectrum_bound") return &s.spectrum_bound;
  if (name == "profile_ratio") return &s.profile_ratio;
  if (name == "banaji") return &s.banaji;
  if (name == "fbm") return &s.fbm;
  if (name == "box_collapse") return &s.box_collapse;
  if (name == "box_collapse_gate") return &s.box_collapse_gate;
  return nullptr;
}

ExperimentConfig ExperimentConfig::from_json(const Json& j) {
  try {
    reject_unknown(j, {"set", "estimator", "stochastic", "checks", "output", "slacks"},
                   "config");
    ExperimentConfig c;
    if (j.contains("set")) c.set = set_from_json(j.at("set"), "set");
    if (j.contains("estimator")) {
      const auto& e = j.at("estimator");
      reject_unknown(e, {"thetas", "ts", "k_min", "k_max", "mode"}, "estimator");
      read(e, "thetas", c.estimator.thetas);
      read(e, "ts", c.estimator.ts);
      read(e, "k_min", c.estimator.k_min);
      read(e, "k_max", c.estimator.k_max);
      if (e.contains("mode"))
        c.estimator.mode = parse_aggregate(e.at("mode").get<std::string>());
    }
    if (j.contains("stochastic")) {
      const auto& s = j.at("stochastic");
      reject_unknown(s, {"m", "alpha", "n_dirs", "n_seeds", "seed"}, "stochastic");
      read(s, "m", c.stochastic.m);
      read(s, "alpha", c.stochastic.alpha);
      read(s, "n_dirs", c.stochastic.n_dirs);
      read(s, "n_seeds", c.stochastic.n_seeds);
      read(s, "seed", c.stochastic.seed);
    }
    if (j.contains("checks")) {
      c.checks.clear();
      for (const auto& item : j.at("checks")) {
        CheckSpec spec;
        if (item.is_string()) {
          spec.name = item.get<std::string>();
        } else {
          reject_unknown(item, {"name", "theta", "thetas", "t", "s", "alpha", "m",
                                "lambda", "n_dirs", "n_seeds"},
                         "checks");
          spec.name = item.at("name").get<std::string>();
          spec.overrides = item;
          spec.overrides.erase("name");
        }
        if (std::find(check_names().begin(), check_names().end(), spec.name) ==
            check_names().end())
          throw ConfigError("checks: unknown check '" + spec.name + "'");
        c.checks.push_back(std::move(spec));
      }
    }
    read(j, "output", c.output);
    if (j.contains("slacks")) {
      const auto& s = j.at("slacks");
      if (!s.is_object()) throw ConfigError("slacks: expected an object");
      for (const auto& item : s.items()) {
        double* field = slack_field(c.slacks, item.key());
        if (!field) throw ConfigError("slacks: unknown key '" + item.key() + "'");
        *field = item.value().get<double>();
      }
    }
    return c;
  } catch (const nlohmann::json::exception& ex) {
    throw ConfigError(std::string("config: ") + ex.what());
  } catch (const DomainError& ex) {
    throw ConfigError(std::string("config: ") + ex.what());
  }
}

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& ex) {
    throw ConfigError(std::string("config parse error: ") + ex.what());
  }
  return from_json(j);
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::stringstream text;
  text << in.rdbuf();
  return parse(text.str());
}

Json ExperimentConfig::to_json() const {
  Json checks_json = Json::array();
  for (const auto& c : checks) {
    Json item = {{"name", c.name}};
    for (const auto& o : c.overrides.items()) item[o.key()] = o.value();
    checks_json.push_back(item);
  }
  return {{"set", set_to_json(set)},
          {"estimator",
           {{"thetas", estimator.thetas},
            {"ts", estimator.ts},
            {"k_min", estimator.k_min},
            {"k_max", estimator.k_max},
            {"mode", std::string(dimlab::to_string(estimator.mode))}}},
          {"stochastic",
           {{"m", stochastic.m},
            {"alpha", stochastic.alpha},
            {"n_dirs", stochastic.n_dirs},
            {"n_seeds", stochastic.n_seeds},
            {"seed", stochastic.seed}}},
          {"checks", checks_json},
          {"output", output},
          {"slacks", slacks_to_json(slacks)}};
}

PointCloud build_set(const SetSpec& s) {
  PointCloud e = [&]() -> PointCloud {
    if (s.generator == "point")
      return PointCloud(Eigen::MatrixXd::Zero(std::max(1, s.dim), 1), 0x1.0p-20, "point");
    if (s.generator == "fp") return gen_sequence_set(s.p, s.n);
    if (s.generator == "logset") return gen_log_set(s.n);
    if (s.generator == "cantor") return gen_ifs(IfsSpec::middle_third_cantor(s.depth));
    if (s.generator == "grid") return gen_grid(s.points, s.dim);
    if (s.generator == "csv") return read_csv(s.csv);
    if (s.generator == "product") {
      if (s.factors.size() < 2) throw ConfigError("product needs at least two factors");
      PointCloud acc = build_set(s.factors[0]);
      for (std::size_t i = 1; i < s.factors.size(); ++i)
        acc = product(acc, build_set(s.factors[i]));
      return acc;
    }
    throw ConfigError("unknown generator '" + s.generator + "'");
  }();
  if (s.embed > e.dim()) e = embed(e, s.embed);
  return e;
}

ScaleGrid grid_for(const PointCloud& e, const EstimatorParams& params) {
  ScaleGrid grid = ScaleGrid::for_cloud(e);
  if (params.k_min > 0 || params.k_max > 0) {
    const int lo = params.k_min > 0 ? params.k_min : 6;
    const int hi = params.k_max > 0
                       ? params.k_max
                       : static_cast<int>(std::floor(std::log2(1.0 / e.resolution()))) - 2;
    grid = ScaleGrid::dyadic(lo, hi);
  }
  return grid;
}

Json to_json(const DimensionEstimate& est) {
  Json extras = Json::object();
  for (const auto& [k, v] : est.extras) extras[k] = v;
  return {{"value", est.value},
          {"mode", std::string(to_string(est.mode))},
          {"r_min", est.r_min},
          {"r_max", est.r_max},
          {"bracket", {est.bracket_lo, est.bracket_hi}},
          {"residual", est.residual},
          {"trusted", est.trusted},
          {"scales", est.scales},
          {"exponents", est.exponents},
          {"extras", extras},
          {"notes", est.notes}};
}

Json to_json(const CheckVerdict& v) {
  Json params = Json::object();
  for (const auto& [k, x] : v.params) params[k] = x;
  Json stats = Json::object();
  for (const auto& [k, x] : v.stats) stats[k] = x;
  Json samples = Json::array();
  for (const auto& s : v.samples)
    samples.push_back({{"index", s.index}, {"param", s.param}, {"value", s.value}});
  return {{"name", v.name},
          {"relation", to_string(v.relation)},
          {"inputs_digest", v.inputs_digest},
          {"params", params},
          {"seed", v.seed},
          {"lhs", v.lhs},
          {"rhs", v.rhs},
          {"slack", v.slack},
          {"pass", v.pass},
          {"applicable", v.applicable},
          {"stats", stats},
          {"notes", v.notes},
          {"samples", samples}};
}

std::string json_digest(const Json& j) {
  Fnv f;
  f.add(j.dump());
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(f.h));
  return buf;
}

Json report_header(const ExperimentConfig& config) {
  return {{"tool", "dimlab"}, {"version", DIMLAB_VERSION}, {"config", config.to_json()}};
}

bool ExperimentReport::all_pass() const {
  return std::all_of(verdicts.begin(), verdicts.end(),
                     [](const CheckVerdict& v) { return v.pass; });
}

Json ExperimentReport::to_json() const {
  Json j = body;
  j["digest"] = digest;
  j["timings"] = timings;
  return j;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  using clock = std::chrono::steady_clock;
  const auto seconds_since = [](clock::time_point t0) {
    return std::chrono::duration<double>(clock::now() - t0).count();
  };
  ExperimentReport report;
  report.body = report_header(config);
  const auto& est = config.estimator;
  const auto& sto = config.stochastic;
  const Slacks& slack = config.slacks;

  auto t0 = clock::now();
  const PointCloud e = build_set(config.set);
  const ScaleGrid grid = grid_for(e, est);
  report.timings["build_set"] = seconds_since(t0);
  report.body["set"] = {{"label", e.label()},
                        {"points", e.size()},
                        {"dim", e.dim()},
                        {"resolution", e.resolution()},
                        {"digest", cloud_digest(e)},
                        {"grid", grid.r_values}};

  t0 = clock::now();
  Json estimates = Json::object();
  estimates["box"] = to_json(estimate_box_dim(e, grid, est.mode));
  for (double theta : est.thetas)
    estimates["dim_theta@" + std::to_string(theta)] =
        to_json(estimate_intermediate_dim(e, theta, grid, est.mode));
  report.body["estimates"] = estimates;
  report.timings["estimates"] = seconds_since(t0);

  const double theta0 = est.thetas.empty() ? 1.0 : est.thetas.front();
  const double t0_param = est.ts.empty() ? 1.0 : est.ts.front();
  Json checks = Json::array();
  for (std::size_t i = 0; i < config.checks.size(); ++i) {
    const auto& spec = config.checks[i];
    const Json& o = spec.overrides;
    const auto theta = override_or(o, "theta", theta0);
    const auto thetas = override_or(o, "thetas", est.thetas);
    const auto m = override_or(o, "m", sto.m);
    const auto n_dirs = override_or(o, "n_dirs", sto.n_dirs);
    const auto alpha = override_or(o, "alpha", sto.alpha);
    t0 = clock::now();
    std::vector<CheckVerdict> produced;
    if (spec.name == "projection_profile") {
      produced.push_back(check_projection_profile(e, m, theta, n_dirs, grid, sto.seed,
                                                  slack.projection, est.mode));
    } else if (spec.name == "marstrand_quasi") {
      produced.push_back(check_marstrand_quasi(e, m, thetas, n_dirs, grid, sto.seed,
                                               slack.marstrand, est.mode));
    } else if (spec.name == "spectrum_bound") {
      produced.push_back(check_spectrum_bound(e, override_or(o, "t", t0_param), theta,
                                     override_or(o, "alpha", 0.9), grid, slack.spectrum_bound,
                                     est.mode));
    } else if (spec.name == "profile_ratio") {
      const double s = override_or(o, "s", static_cast<double>(e.dim()));
      produced.push_back(check_profile_ratio(e, s, override_or(o, "t", std::min(s, 0.5)), theta,
                                     grid, slack.profile_ratio, est.mode));
    } else if (spec.name == "banaji") {
      if (o.contains("theta")) {
        produced.push_back(check_banaji(e, theta, grid, slack.banaji, est.mode));
      } else {
        for (double th : thetas)
          produced.push_back(check_banaji(e, th, grid, slack.banaji, est.mode));
      }
    } else if (spec.name == "fbm") {
      produced.push_back(check_fbm(e, alpha, m, theta, override_or(o, "n_seeds", sto.n_seeds),
                                   grid, sto.seed, slack.fbm, est.mode));
    } else if (spec.name == "box_collapse") {
      produced.push_back(check_box_collapse(e, thetas, grid, slack.box_collapse,
                                        slack.box_collapse_gate, est.mode));
    } else if (spec.name == "exceptional_frequency") {
      const double lambda = override_or(o, "lambda", 0.5);
      CheckVerdict v;
      v.name = spec.name;
      v.relation = Relation::trend;
      v.inputs_digest = cloud_digest(e);
      v.params = {{"m", m}, {"theta", theta}, {"lambda", lambda}, {"n_dirs", n_dirs}};
      v.seed = sto.seed;
      v.lhs = exceptional_frequency(e, m, theta, lambda, n_dirs, grid, sto.seed, est.mode);
      v.pass = true;
      v.applicable = false;
      v.notes.push_back("reported only: empirical frequency of directions below lambda");
      produced.push_back(std::move(v));
    }
    report.timings["check_" + std::to_string(i) + "_" + spec.name] = seconds_since(t0);
    for (auto& v : produced) {
      checks.push_back(to_json(v));
      report.verdicts.push_back(std::move(v));
    }
  }
  report.body["checks"] = checks;

  int passed = 0, failed = 0, skipped = 0;
  for (const auto& v : report.verdicts) {
    if (!v.applicable) ++skipped;
    else if (v.pass) ++passed;
    else ++failed;
  }
  report.body["summary"] = {{"checks", report.verdicts.size()},
                            {"passed", passed},
                            {"failed", failed},
                            {"skipped", skipped},
                            {"all_pass", report.all_pass()}};
  report.digest = json_digest(report.body);
  return report;
}

void write_report(const ExperimentReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "report.json");
    if (!out) throw ConfigError("cannot write " + (dir / "report.json").string());
    out << report.to_json().dump(2) << '\n';
  }
  std::ofstream csv(dir / "samples.csv");
  if (!csv) throw ConfigError("cannot write " + (dir / "samples.csv").string());
  csv.precision(17);
  csv << "check,index,param,value\n";
  for (const auto& v : report.verdicts)
    for (const auto& s : v.samples)
      csv << v.name << ',' << s.index << ',' << s.param << ',' << s.value << '\n';
}

}  // namespace dimlab
