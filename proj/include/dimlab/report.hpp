#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dimlab/estimate.hpp"
#include "dimlab/pointset.hpp"
#include "dimlab/theorems.hpp"
#include "json.hpp"

namespace dimlab {

using Json = nlohmann::ordered_json;

/// A generated or loaded set. generator: point | fp | logset | cantor |
/// grid | product | csv.
struct SetSpec {
  std::string generator = "cantor";
  double p = 1.0;
  long long n = 10000;
  int depth = 12;
  int points = 4097;
  int dim = 1;
  std::string csv;
  int embed = 0;  // pad to this dimension when larger than the set's own
  std::vector<SetSpec> factors;
};

struct EstimatorParams {
  std::vector<double> thetas{1.0, 0.5};
  std::vector<double> ts{1.0};
  int k_min = 0;  // 0: the default grid for the cloud
  int k_max = 0;
  Aggregate mode = Aggregate::slope;
};

struct StochasticParams {
  int m = 1;
  double alpha = 0.5;
  int n_dirs = 50;
  int n_seeds = 21;
  std::uint64_t seed = 1;
};

/// A check name plus per-check overrides (theta, thetas, t, s, alpha, m,
/// lambda, n_dirs, n_seeds).
struct CheckSpec {
  std::string name;
  Json overrides = Json::object();
};

struct ExperimentConfig {
  SetSpec set;
  EstimatorParams estimator;
  StochasticParams stochastic;
  std::vector<CheckSpec> checks{{"banaji"}, {"box_collapse"}, {"spectrum_bound"}, {"profile_ratio"}};
  std::string output = "dimlab-out";
  Slacks slacks;

  /// Every field has a default; unknown keys throw ConfigError.
  static ExperimentConfig from_json(const Json& j);
  static ExperimentConfig parse(const std::string& text);
  static ExperimentConfig load(const std::filesystem::path& path);
  Json to_json() const;
};

const std::vector<std::string>& check_names();
const std::vector<std::string>& slack_names();
/// Pointer to the slack field for a name from slack_names(), else nullptr.
double* slack_field(Slacks& slacks, const std::string& name);

PointCloud build_set(const SetSpec& spec);
ScaleGrid grid_for(const PointCloud& e, const EstimatorParams& params);

Json to_json(const DimensionEstimate& est);
Json to_json(const CheckVerdict& verdict);

struct ExperimentReport {
  Json body;  // everything except timings; the digest covers exactly this
  Json timings = Json::object();
  std::string digest;
  std::vector<CheckVerdict> verdicts;

  bool all_pass() const;
  Json to_json() const;
};

/// FNV-1a of the compact JSON text, in hex.
std::string json_digest(const Json& j);

/// Header written before any computation: tool, version, config echo.
Json report_header(const ExperimentConfig& config);

ExperimentReport run_experiment(const ExperimentConfig& config);

/// report.json plus samples.csv (check,index,param,value) in `dir`.
void write_report(const ExperimentReport& report, const std::filesystem::path& dir);

}  // namespace dimlab
