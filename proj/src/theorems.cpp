#include "dimlab/theorems.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <sstream>

#include "dimlab/assouad.hpp"
#include "dimlab/capacity.hpp"
#include "dimlab/covering.hpp"
#include "dimlab/errors.hpp"
#include "dimlab/parallel.hpp"
#include "dimlab/stochastic.hpp"

namespace dimlab {
namespace {

constexpr double kSpectrumBoundSkipMargin = 0.02;

struct Fnv1a {
  std::uint64_t state = 0xcbf29ce484222325ull;
  void bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      state ^= p[i];
      state *= 0x100000001b3ull;
    }
  }
  void number(double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    bytes(&bits, sizeof bits);
  }
};

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

CheckVerdict make_verdict(std::string name, Relation relation, const PointCloud& e,
                          std::vector<std::pair<std::string, double>> params) {
  CheckVerdict v;
  v.name = std::move(name);
  v.relation = relation;
  v.params = std::move(params);
  Fnv1a h;
  const std::string digest = cloud_digest(e);
  h.bytes(digest.data(), digest.size());
  h.bytes(v.name.data(), v.name.size());
  for (const auto& [key, value] : v.params) {
    h.bytes(key.data(), key.size());
    h.number(value);
  }
  v.inputs_digest = hex(h.state);
  return v;
}

void settle(CheckVerdict& v) {
  if (v.relation == Relation::inequality)
    v.pass = v.lhs >= v.rhs - v.slack;
  else if (v.relation == Relation::equality)
    v.pass = std::abs(v.lhs - v.rhs) <= v.slack;
}

double grid_param(const ScaleGrid& grid, bool finest) {
  return finest ? grid.r_values.back() : grid.r_values.front();
}

// dim_theta estimates of projections onto directions V_i = stream i.
std::vector<double> projected_dims(const PointCloud& e, int m, double theta,
                                   int n_dirs, const ScaleGrid& grid,
                                   std::uint64_t seed, Aggregate mode) {
  if (m < 1 || m >= e.dim())
    throw DomainError("projection checks need 1 <= m < d");
  if (n_dirs < 1) throw DomainError("projection checks need n_dirs >= 1");
  std::vector<double> dims(static_cast<std::size_t>(n_dirs));
  parallel_for(dims.size(), [&](std::size_t i) {
    const auto v = sample_grassmannian(e.dim(), m, seed, i);
    dims[i] = estimate_intermediate_dim(project(e, v), theta, grid, mode).value;
  });
  return dims;
}

// Profiles are the expensive estimate and several checks share them; the
// estimate is a pure function of its inputs, so it is memoized per process.
double profile_value(const PointCloud& e, double t, double theta,
                     const ScaleGrid& grid, Aggregate mode) {
  static std::mutex mutex;
  static std::map<std::string, double> memo;
  std::ostringstream key;
  key.precision(17);
  key << cloud_digest(e) << '|' << t << '|' << theta << '|' << to_string(mode);
  for (double r : grid.r_values) key << '|' << r;
  {
    std::lock_guard lock(mutex);
    if (auto it = memo.find(key.str()); it != memo.end()) return it->second;
  }
  const double value = estimate_profile(e, t, theta, grid, mode).value;
  std::lock_guard lock(mutex);
  memo.emplace(key.str(), value);
  return value;
}

}  // namespace

std::string to_string(Relation relation) {
  switch (relation) {
    case Relation::inequality: return "inequality";
    case Relation::equality: return "equality";
    case Relation::trend: return "trend";
  }
  return "unknown";
}

std::string cloud_digest(const PointCloud& e) {
  Fnv1a h;
  const int d = e.dim();
  h.bytes(&d, sizeof d);
  h.number(e.resolution());
  h.bytes(e.points().data(),
          static_cast<std::size_t>(e.points().size()) * sizeof(double));
  return hex(h.state);
}

double median(std::vector<double> values) { return quantile(std::move(values), 0.5); }

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw DomainError("quantile of an empty list");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

CheckVerdict check_projection_profile(const PointCloud& e, int m, double theta,
                                      int n_dirs, const ScaleGrid& grid,
                                      std::uint64_t seed, double slack,
                                      Aggregate mode) {
  CheckVerdict v = make_verdict(
      "projection_profile", Relation::equality, e,
      {{"m", m}, {"theta", theta}, {"n_dirs", n_dirs},
       {"r_max", grid_param(grid, false)}, {"r_min", grid_param(grid, true)}});
  v.seed = seed;
  v.slack = slack;
  const auto dims = projected_dims(e, m, theta, n_dirs, grid, seed, mode);
  const double profile = profile_value(e, m, theta, grid, mode);
  v.lhs = median(dims);
  v.rhs = profile;
  std::vector<double> deviation;
  int within = 0;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    v.samples.push_back({i, theta, dims[i]});
    deviation.push_back(std::abs(dims[i] - profile));
    if (deviation.back() <= slack) ++within;
  }
  const double largest = *std::max_element(dims.begin(), dims.end());
  v.stats = {{"max", largest},
             {"q90_deviation", quantile(deviation, 0.9)},
             {"fraction_within", static_cast<double>(within) / dims.size()}};
  settle(v);
  if (largest > profile + slack) {
    v.pass = false;
    v.notes.push_back("a projection exceeds profile + slack");
  }
  return v;
}

double theta_floor(const PointCloud& e, const ScaleGrid& grid) {
  const double diam = diameter(e);
  if (!(diam > 0.0) || diam >= 1.0) return 0.0;
  double floor = 0.0;
  for (double r : grid.r_values) floor = std::max(floor, std::log(diam) / std::log(r));
  return floor;
}

CheckVerdict check_marstrand_quasi(const PointCloud& e, int m,
                                   const std::vector<double>& thetas, int n_dirs,
                                   const ScaleGrid& grid, std::uint64_t seed,
                                   double slack, Aggregate mode) {
  if (thetas.empty()) throw DomainError("check_marstrand_quasi: empty theta list");
  for (std::size_t i = 1; i < thetas.size(); ++i)
    if (!(thetas[i] < thetas[i - 1]))
      throw DomainError("check_marstrand_quasi: theta list must decrease");
  const double floor = theta_floor(e, grid);
  if (thetas.back() < floor)
    throw ScaleError("check_marstrand_quasi: theta " + std::to_string(thetas.back()) +
                     " below the floor " + std::to_string(floor));
  std::vector<std::pair<std::string, double>> params{{"m", m}, {"n_dirs", n_dirs}};
  for (std::size_t i = 0; i < thetas.size(); ++i)
    params.emplace_back("theta_" + std::to_string(i), thetas[i]);
  CheckVerdict v = make_verdict("marstrand_quasi", Relation::trend, e, std::move(params));
  v.seed = seed;
  v.slack = slack;
  v.notes.push_back("finite-theta proxy: gap must not increase as theta decreases");

  std::vector<double> gaps;
  for (double theta : thetas) {
    const auto dims = projected_dims(e, m, theta, n_dirs, grid, seed, mode);
    for (std::size_t i = 0; i < dims.size(); ++i) v.samples.push_back({i, theta, dims[i]});
    const double target =
        std::min<double>(m, estimate_intermediate_dim(e, theta, grid, mode).value);
    const double med = median(dims);
    gaps.push_back(std::abs(target - med));
    v.stats.emplace_back("median@" + std::to_string(theta), med);
    v.stats.emplace_back("target@" + std::to_string(theta), target);
    v.stats.emplace_back("gap@" + std::to_string(theta), gaps.back());
  }
  bool monotone = true;
  for (std::size_t i = 1; i < gaps.size(); ++i)
    if (gaps[i] > gaps[i - 1] + kTrendTolerance) monotone = false;
  v.lhs = gaps.back();
  v.rhs = 0.0;
  v.pass = monotone && v.lhs <= slack;
  if (!monotone) v.notes.push_back("gap increased along the theta list");
  return v;
}

CheckVerdict check_spectrum_bound(const PointCloud& e, double t, double theta,
                                  double alpha, const ScaleGrid& grid, double slack,
                                  Aggregate mode) {
  CheckVerdict v = make_verdict("spectrum_bound", Relation::inequality, e,
                                {{"t", t}, {"theta", theta}, {"alpha", alpha}});
  v.slack = slack;
  const double profile = profile_value(e, t, theta, grid, mode);
  const double dim = estimate_intermediate_dim(e, theta, grid, mode).value;
  const double spectrum = estimate_assouad_spectrum(e, alpha).value;
  const double assouad = estimate_assouad(e).value;
  v.lhs = profile;
  v.rhs = dim - std::max({0.0, spectrum - t, (assouad - t) * (1.0 - alpha)});
  v.stats = {{"profile", profile}, {"dim_theta", dim},
             {"spectrum", spectrum}, {"assouad", assouad}};
  settle(v);
  if (profile >= t - kSpectrumBoundSkipMargin) {
    v.applicable = false;
    v.pass = true;
    v.notes.push_back("skipped: profile^t >= t - 0.02, outside the hypothesis");
  }
  return v;
}

CheckVerdict check_profile_ratio(const PointCloud& e, double s, double t, double theta,
                                 const ScaleGrid& grid, double slack, Aggregate mode) {
  if (!(t > 0.0 && t <= s && s <= e.dim()))
    throw DomainError("check_profile_ratio: need 0 < t <= s <= d");
  CheckVerdict v = make_verdict("profile_ratio", Relation::inequality, e,
                                {{"s", s}, {"t", t}, {"theta", theta}});
  v.slack = slack;
  const double profile_s = profile_value(e, s, theta, grid, mode);
  const double profile_t =
      t == s ? profile_s : profile_value(e, t, theta, grid, mode);
  v.lhs = profile_t;
  v.rhs = profile_s / (1.0 + (1.0 / t - 1.0 / s) * profile_s);
  v.stats = {{"profile_s", profile_s}, {"profile_t", profile_t}};
  settle(v);
  return v;
}

CheckVerdict check_banaji(const PointCloud& e, double theta,
                          const ScaleGrid& grid, double slack, Aggregate mode) {
  CheckVerdict v = make_verdict("banaji", Relation::inequality, e, {{"theta", theta}});
  v.slack = slack;
  const double box = estimate_box_dim(e, grid, mode).value;
  v.lhs = estimate_intermediate_dim(e, theta, grid, mode).value;
  v.rhs = banaji_bound(box, e.dim(), theta);
  v.stats = {{"box", box}};
  settle(v);
  return v;
}

ScaleGrid fbm_image_grid(const PointCloud& e, double alpha) {
  const double res = std::pow(e.resolution(), alpha);
  return ScaleGrid::dyadic(2, static_cast<int>(std::floor(std::log2(1.0 / res))));
}

CheckVerdict check_fbm(const PointCloud& e, double alpha, int m, double theta,
                       int n_seeds, const ScaleGrid& grid, std::uint64_t seed,
                       double slack, Aggregate mode) {
  if (m < 1 || n_seeds < 1) throw DomainError("check_fbm: need m >= 1 and n_seeds >= 1");
  if (m * alpha > e.dim())
    throw DomainError("check_fbm: m * alpha exceeds the ambient dimension");
  CheckVerdict v = make_verdict(
      "fbm", Relation::equality, e,
      {{"alpha", alpha}, {"m", m}, {"theta", theta}, {"n_seeds", n_seeds}});
  v.seed = seed;
  v.slack = slack;
  const double profile = profile_value(e, m * alpha, theta, grid, mode);
  const FbmFactor factor(e, alpha);
  const ScaleGrid image_grid = fbm_image_grid(e, alpha);
  std::vector<double> dims(static_cast<std::size_t>(n_seeds));
  parallel_for(dims.size(), [&](std::size_t i) {
    const auto sample = factor.sample(m, seed, i);
    dims[i] = estimate_intermediate_dim(sample.image, theta, image_grid, mode).value;
  });
  for (std::size_t i = 0; i < dims.size(); ++i) v.samples.push_back({i, theta, dims[i]});
  v.lhs = median(dims);
  v.rhs = profile / alpha;
  v.stats = {{"profile", profile},
             {"jitter", factor.jitter()},
             {"image_r_max", image_grid.r_values.front()},
             {"image_r_min", image_grid.r_values.back()}};
  v.notes.push_back("image resolution (source resolution)^alpha is heuristic");
  settle(v);
  return v;
}

CheckVerdict check_box_collapse(const PointCloud& e, const std::vector<double>& thetas,
                                const ScaleGrid& grid, double slack, double gate,
                                Aggregate mode) {
  std::vector<std::pair<std::string, double>> params;
  for (std::size_t i = 0; i < thetas.size(); ++i)
    params.emplace_back("theta_" + std::to_string(i), thetas[i]);
  CheckVerdict v = make_verdict("box_collapse", Relation::equality, e, std::move(params));
  v.slack = slack;
  const double box = estimate_box_dim(e, grid, mode).value;
  const double qa = estimate_quasi_assouad(e, default_quasi_assouad_alphas()).value;
  v.stats = {{"box", box}, {"quasi_assouad", qa}};
  double worst = 0.0;
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    const double dim = estimate_intermediate_dim(e, thetas[i], grid, mode).value;
    v.samples.push_back({i, thetas[i], dim});
    worst = std::max(worst, std::abs(dim - box));
  }
  v.lhs = worst;
  v.rhs = 0.0;
  settle(v);
  if (std::abs(box - qa) > gate) {
    v.applicable = false;
    v.pass = true;
    v.notes.push_back("not applicable: |box - quasi-Assouad| exceeds the gate");
  }
  return v;
}

double exceptional_frequency(const PointCloud& e, int m, double theta,
                             double lambda, int n_dirs, const ScaleGrid& grid,
                             std::uint64_t seed, Aggregate mode) {
  const auto dims = projected_dims(e, m, theta, n_dirs, grid, seed, mode);
  const auto below = std::count_if(dims.begin(), dims.end(),
                                   [&](double d) { return d < lambda; });
  return static_cast<double>(below) / static_cast<double>(dims.size());
}

}  // namespace dimlab
