#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "dimlab/assouad.hpp"
#include "dimlab/capacity.hpp"
#include "dimlab/covering.hpp"
#include "dimlab/errors.hpp"
#include "dimlab/parallel.hpp"
#include "dimlab/report.hpp"
#include "dimlab/stochastic.hpp"

using namespace dimlab;

namespace {

enum Exit { kPass = 0, kCheckFailed = 1, kUsage = 2, kNumeric = 3 };

struct GridArgs {
  int k_min = 0;
  int k_max = 0;
  std::string mode = "slope";

  ScaleGrid grid(const PointCloud& e) const {
    EstimatorParams p;
    p.k_min = k_min;
    p.k_max = k_max;
    return grid_for(e, p);
  }
  Aggregate aggregate() const { return parse_aggregate(mode); }
};

void add_grid_options(CLI::App* cmd, GridArgs& g) {
  cmd->add_option("--kmin", g.k_min, "grid r = 2^-k: coarsest k (default: 6)");
  cmd->add_option("--kmax", g.k_max, "grid r = 2^-k: finest k (default: from the resolution)");
  cmd->add_option("--mode", g.mode, "slope | lower | upper")
      ->check(CLI::IsMember({"slope", "lower", "upper"}));
}

void emit_header(const std::string& command, const Json& args) {
  Json header = {{"tool", "dimlab"}, {"version", DIMLAB_VERSION},
                 {"command", command}, {"config", args}};
  std::cerr << header.dump() << '\n';
}

void emit(const Json& report, const std::string& out) {
  if (out.empty()) {
    std::cout << report.dump(2) << '\n';
    return;
  }
  std::ofstream f(out);
  if (!f) throw ConfigError("cannot write " + out);
  f << report.dump(2) << '\n';
}

std::ofstream open_dump(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write " + path);
  f.precision(17);
  return f;
}

Json estimate_report(const std::string& command, const Json& args,
                     const PointCloud& e, const ScaleGrid& grid, Json estimate) {
  return {{"tool", "dimlab"},
          {"version", DIMLAB_VERSION},
          {"command", command},
          {"config", args},
          {"set", {{"label", e.label()}, {"points", e.size()}, {"dim", e.dim()},
                   {"resolution", e.resolution()}, {"digest", cloud_digest(e)}}},
          {"grid", grid.r_values},
          {"estimate", std::move(estimate)}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dimlab: box, intermediate and Assouad-type dimensions of point clouds"};
  app.require_subcommand(1);
  unsigned jobs = 0;
  app.add_option("--jobs", jobs, "worker threads (default: available parallelism)");
  app.set_version_flag("--version", DIMLAB_VERSION);

  // gen
  auto* gen = app.add_subcommand("gen", "generate a point cloud as CSV plus metadata");
  std::string gen_kind, gen_out;
  std::vector<std::string> gen_inputs;
  SetSpec gen_spec;
  gen->add_option("kind", gen_kind, "fp | logset | ifs-cantor | grid | point | product")
      ->required();
  gen->add_option("inputs", gen_inputs, "CSV factors for product");
  gen->add_option("--p", gen_spec.p, "exponent for fp");
  gen->add_option("--n", gen_spec.n, "n_max for fp and logset");
  gen->add_option("--depth", gen_spec.depth, "IFS depth");
  gen->add_option("--points", gen_spec.points, "grid points per axis");
  gen->add_option("--dim", gen_spec.dim, "grid dimension");
  gen->add_option("--embed", gen_spec.embed, "pad coordinates to this dimension");
  gen->add_option("--out", gen_out, "output CSV")->required();

  // estimators
  std::string cloud_path, out_path, dump_path;
  GridArgs grid_args;
  double theta = 1.0, t = 1.0;
  std::vector<double> alphas = default_quasi_assouad_alphas();
  auto add_estimator = [&](const char* name, const char* help) {
    auto* cmd = app.add_subcommand(name, help);
    cmd->add_option("cloud", cloud_path, "input CSV")->required();
    cmd->add_option("--out", out_path, "JSON report (default: stdout)");
    cmd->add_option("--dump", dump_path, "per-scale CSV");
    add_grid_options(cmd, grid_args);
    return cmd;
  };
  auto* boxdim = add_estimator("boxdim", "box-counting dimension");
  auto* intdim = add_estimator("intdim", "theta-intermediate dimension");
  intdim->add_option("--theta", theta, "theta in (0,1]");
  auto* profile = add_estimator("profile", "capacity dimension profile");
  profile->add_option("--theta", theta, "theta in (0,1]");
  profile->add_option("--t", t, "profile parameter t in (0,d]");
  auto* assouad = add_estimator("assouad", "Assouad, spectrum and quasi-Assouad");
  assouad->add_option("--alpha", alphas, "spectrum alphas (increasing)");

  // project / fbm
  std::uint64_t seed = 1;
  std::uint64_t stream = 0;
  int m = 1;
  double alpha = 0.5;
  std::string basis_path;
  auto* proj = app.add_subcommand("project", "project onto a Haar-random subspace");
  proj->add_option("cloud", cloud_path, "input CSV")->required();
  proj->add_option("--m", m, "subspace dimension");
  proj->add_option("--seed", seed, "master seed")->envname("DIMLAB_SEED");
  proj->add_option("--stream", stream, "stream index of the direction");
  proj->add_option("--out", out_path, "output CSV")->required();
  proj->add_option("--dump", basis_path, "basis CSV");
  auto* fbm = app.add_subcommand("fbm", "index-alpha fBm image of a cloud");
  fbm->add_option("cloud", cloud_path, "input CSV")->required();
  fbm->add_option("--alpha", alpha, "Hurst index in (0,1)");
  fbm->add_option("--m", m, "image dimension");
  fbm->add_option("--seed", seed, "master seed")->envname("DIMLAB_SEED");
  fbm->add_option("--stream", stream, "stream index");
  fbm->add_option("--out", out_path, "output CSV")->required();

  // check
  std::string config_path;
  std::optional<std::uint64_t> check_seed;
  std::vector<std::optional<double>> slack_overrides(slack_names().size());
  auto* check = app.add_subcommand("check", "run a configured checker battery");
  check->add_option("config", config_path, "JSON config")->required();
  check->add_option("--seed", check_seed, "master seed")->envname("DIMLAB_SEED");
  check->add_option("--out", out_path, "output directory (default: config's)");
  for (std::size_t i = 0; i < slack_names().size(); ++i) {
    std::string flag = "--slack-" + slack_names()[i];
    std::replace(flag.begin(), flag.end(), '_', '-');
    check->add_option(flag, slack_overrides[i], "override slack " + slack_names()[i]);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }
  if (jobs > 0) set_jobs(jobs);

  try {
    if (*gen) {
      emit_header("gen", {{"kind", gen_kind}, {"inputs", gen_inputs}, {"out", gen_out}});
      PointCloud e = [&] {
        if (gen_kind == "product") {
          if (gen_inputs.size() < 2) throw ConfigError("product needs two input CSVs");
          PointCloud acc = read_csv(gen_inputs[0]);
          for (std::size_t i = 1; i < gen_inputs.size(); ++i)
            acc = product(acc, read_csv(gen_inputs[i]));
          return acc;
        }
        SetSpec spec = gen_spec;
        spec.generator = gen_kind == "ifs-cantor" ? "cantor" : gen_kind;
        spec.embed = 0;
        return build_set(spec);
      }();
      if (gen_spec.embed > e.dim()) e = embed(e, gen_spec.embed);
      write_csv(e, gen_out);
      return kPass;
    }

    if (*boxdim || *intdim || *profile || *assouad) {
      const std::string command = *boxdim    ? "boxdim"
                                  : *intdim  ? "intdim"
                                  : *profile ? "profile"
                                             : "assouad";
      Json args = {{"cloud", cloud_path}, {"k_min", grid_args.k_min},
                   {"k_max", grid_args.k_max}, {"mode", grid_args.mode}};
      if (*intdim || *profile) args["theta"] = theta;
      if (*profile) args["t"] = t;
      if (*assouad) args["alphas"] = alphas;
      emit_header(command, args);
      const PointCloud e = read_csv(cloud_path);
      const ScaleGrid grid = grid_args.grid(e);
      const Aggregate mode = grid_args.aggregate();

      if (*boxdim || *intdim) {
        const auto est = *boxdim ? estimate_box_dim(e, grid, mode)
                                 : estimate_intermediate_dim(e, theta, grid, mode);
        if (!dump_path.empty()) {
          auto f = open_dump(dump_path);
          f << "s,r,cover_sum,exponent\n";
          for (const auto& row : est.trace)
            f << row.s << ',' << row.r << ',' << row.value << ',' << row.exponent << '\n';
        }
        emit(estimate_report(command, args, e, grid, to_json(est)), out_path);
      } else if (*profile) {
        const auto est = estimate_profile(e, t, theta, grid, mode);
        if (!dump_path.empty()) {
          auto f = open_dump(dump_path);
          f << "t,theta,s,r,capacity,gap,exponent\n";
          for (const auto& row : est.trace)
            f << t << ',' << theta << ',' << row.s << ',' << row.r << ',' << row.value
              << ',' << row.gap << ',' << row.exponent << '\n';
        }
        emit(estimate_report(command, args, e, grid, to_json(est)), out_path);
      } else {
        const auto a = estimate_assouad(e);
        const auto q = estimate_quasi_assouad(e, alphas);
        Json spectrum = Json::object();
        std::vector<std::pair<double, DimensionEstimate>> curves{{1.0, a}};
        for (double al : alphas) {
          auto s = estimate_assouad_spectrum(e, al);
          spectrum[std::to_string(al)] = s.value;
          curves.emplace_back(al, std::move(s));
        }
        if (!dump_path.empty()) {
          auto f = open_dump(dump_path);
          f << "alpha,R,r,max_count,slope\n";
          for (const auto& [al, est] : curves)
            for (const auto& row : est.trace)
              f << al << ',' << row.s << ',' << row.r << ',' << row.value << ','
                << row.exponent << '\n';
        }
        Json estimate = {{"assouad", to_json(a)},
                         {"quasi_assouad", to_json(q)},
                         {"spectrum", spectrum}};
        emit(estimate_report(command, args, e, grid, std::move(estimate)), out_path);
      }
      return kPass;
    }

    if (*proj) {
      emit_header("project", {{"cloud", cloud_path}, {"m", m}, {"seed", seed},
                              {"stream", stream}, {"out", out_path}});
      const PointCloud e = read_csv(cloud_path);
      const auto basis = sample_grassmannian(e.dim(), m, seed, stream);
      write_csv(project(e, basis), out_path);
      if (!basis_path.empty()) write_basis_csv(basis, basis_path);
      return kPass;
    }

    if (*fbm) {
      emit_header("fbm", {{"cloud", cloud_path}, {"alpha", alpha}, {"m", m},
                          {"seed", seed}, {"stream", stream}, {"out", out_path}});
      const PointCloud e = read_csv(cloud_path);
      const auto sample = sample_fbm(e, alpha, m, seed, stream);
      write_csv(sample.image, out_path);
      return kPass;
    }

    if (*check) {
      ExperimentConfig config = ExperimentConfig::load(config_path);
      if (check_seed) config.stochastic.seed = *check_seed;
      for (std::size_t i = 0; i < slack_names().size(); ++i)
        if (slack_overrides[i]) *slack_field(config.slacks, slack_names()[i]) = *slack_overrides[i];
      if (!out_path.empty()) config.output = out_path;
      std::cerr << report_header(config).dump() << '\n';
      const auto report = run_experiment(config);
      write_report(report, config.output);
      for (const auto& v : report.verdicts)
        std::cout << (v.applicable ? (v.pass ? "PASS " : "FAIL ") : "SKIP ") << v.name
                  << "  lhs=" << v.lhs << " rhs=" << v.rhs << " slack=" << v.slack << '\n';
      std::cout << "digest " << report.digest << '\n';
      return report.all_pass() ? kPass : kCheckFailed;
    }
  } catch (const NumericError& ex) {
    std::cerr << "numeric failure: " << ex.what() << '\n';
    return kNumeric;
  } catch (const Error& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return kUsage;
  } catch (const std::exception& ex) {
    std::cerr << "failure: " << ex.what() << '\n';
    return kNumeric;
  }
  return kUsage;
}
