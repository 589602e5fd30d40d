#include "dimlab/assouad.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "dimlab/covering.hpp"
#include "dimlab/errors.hpp"
#include "dimlab/parallel.hpp"

namespace dimlab {
namespace {

// Points sorted by first coordinate, for ball queries.
struct SortedCloud {
  const PointCloud& cloud;
  std::vector<Eigen::Index> order;
  std::vector<double> first;

  explicit SortedCloud(const PointCloud& e) : cloud(e) {
    order.resize(static_cast<std::size_t>(e.size()));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
      return e.points()(0, a) < e.points()(0, b);
    });
    first.reserve(order.size());
    for (auto i : order) first.push_back(e.points()(0, i));
  }

  // Range [lo, hi) of sorted positions with first coordinate in (c-R, c+R).
  std::pair<std::size_t, std::size_t> slab(double c, double big) const {
    const auto lo = std::upper_bound(first.begin(), first.end(), c - big);
    const auto hi = std::lower_bound(lo, first.end(), c + big);
    return {static_cast<std::size_t>(lo - first.begin()),
            static_cast<std::size_t>(hi - first.begin())};
  }
};

// Cell ids of the global mesh (side r/sqrt(d), anchored at the cloud's lower
// corner) for every point, plus what one-dimensional range counts need.
struct GlobalMesh {
  std::vector<std::uint32_t> cell;    // by point index
  std::vector<std::uint32_t> starts;  // by sorted position: cells begun so far
};

GlobalMesh build_mesh(const SortedCloud& sorted, double r) {
  const auto& e = sorted.cloud;
  const double side = r / std::sqrt(static_cast<double>(e.dim()));
  const Eigen::VectorXd lo = e.lower_corner();
  const CellCoords coords =
      mesh_cells(e.points(), lo, e.upper_corner() - lo, side);
  GlobalMesh mesh;
  group_columns(coords, mesh.cell);
  if (e.dim() == 1) {
    mesh.starts.resize(sorted.order.size());
    std::uint32_t running = 0;
    for (std::size_t pos = 0; pos < sorted.order.size(); ++pos) {
      if (pos > 0 && mesh.cell[sorted.order[pos]] != mesh.cell[sorted.order[pos - 1]])
        ++running;
      mesh.starts[pos] = running;
    }
  }
  return mesh;
}

std::size_t local_count(const SortedCloud& sorted, const GlobalMesh& mesh,
                        Eigen::Index center, double big) {
  const auto& e = sorted.cloud;
  const auto c = e.point(center);
  const auto [lo, hi] = sorted.slab(c(0), big);
  if (lo >= hi) return 0;
  if (e.dim() == 1) return 1 + mesh.starts[hi - 1] - mesh.starts[lo];
  std::vector<std::uint32_t> ids;
  const double big2 = big * big;
  for (std::size_t pos = lo; pos < hi; ++pos) {
    const auto i = sorted.order[pos];
    if ((e.point(i) - c).squaredNorm() < big2) ids.push_back(mesh.cell[i]);
  }
  std::sort(ids.begin(), ids.end());
  return static_cast<std::size_t>(std::unique(ids.begin(), ids.end()) -
                                  ids.begin());
}

std::vector<Eigen::Index> choose_centers(const PointCloud& e) {
  std::vector<Eigen::Index> centers;
  if (e.size() <= kExactCenterLimit) {
    centers.resize(static_cast<std::size_t>(e.size()));
    std::iota(centers.begin(), centers.end(), Eigen::Index{0});
    return centers;
  }
  std::vector<double> dist(static_cast<std::size_t>(e.size()),
                           std::numeric_limits<double>::infinity());
  Eigen::Index current = 0;
  for (Eigen::Index k = 0; k < kSampledCenters; ++k) {
    centers.push_back(current);
    double far = -1.0;
    for (Eigen::Index i = 0; i < e.size(); ++i) {
      auto& d = dist[static_cast<std::size_t>(i)];
      d = std::min(d, (e.point(i) - e.point(current)).norm());
      if (d > far) {
        far = d;
        current = i;
      }
    }
  }
  std::sort(centers.begin(), centers.end());
  return centers;
}

// Points whose nearest neighbour is within twice the resolution: where the
// cloud is resolved at its finest (e.g. the accumulation point of F_p).
std::vector<Eigen::Index> finest_points(const PointCloud& e,
                                        const SortedCloud& sorted) {
  std::vector<Eigen::Index> out;
  const double limit = 2.0 * e.resolution();
  if (e.dim() == 1) {
    const auto& v = sorted.first;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const bool near_prev = i > 0 && v[i] - v[i - 1] <= limit;
      const bool near_next = i + 1 < v.size() && v[i + 1] - v[i] <= limit;
      if (near_prev || near_next) out.push_back(sorted.order[i]);
    }
    return out;
  }
  if (e.size() > (Eigen::Index{1} << 14)) return out;
  for (Eigen::Index i = 0; i < e.size(); ++i) {
    for (Eigen::Index j = 0; j < e.size(); ++j) {
      if (i != j && (e.point(i) - e.point(j)).norm() <= limit) {
        out.push_back(i);
        break;
      }
    }
  }
  return out;
}

void validate_pair(const PointCloud& e, const ScalePair& pair, double diam) {
  if (!(pair.small > 0.0 && pair.small < pair.big))
    throw ScaleError("scale pair needs 0 < r < R");
  if (pair.small < e.resolution() * (1.0 - 1e-12))
    throw ScaleError("scale pair r=" + std::to_string(pair.small) +
                     " below the cloud resolution");
  if (diam > 0.0 && pair.big > diam * (1.0 + 1e-12))
    throw ScaleError("scale pair R=" + std::to_string(pair.big) +
                     " exceeds the cloud diameter");
}

// Sup of the local counts over every pair sharing a ratio R/r, then the
// least-squares slope of log(sup) against log(R/r).
DimensionEstimate regress_counts(const PointCloud& e,
                                 const std::vector<LocalCountSample>& samples) {
  std::map<long long, const LocalCountSample*> by_ratio;
  for (const auto& s : samples) {
    const auto key = std::llround(std::log2(s.big / s.small) * 1e6);
    auto& slot = by_ratio[key];
    if (!slot || s.count > slot->count) slot = &s;
  }
  if (by_ratio.size() < 2)
    throw DiagnosticsError("need at least two distinct ratios R/r");

  DimensionEstimate est;
  est.r_min = std::numeric_limits<double>::infinity();
  for (const auto& s : samples) {
    est.r_min = std::min(est.r_min, s.small);
    est.r_max = std::max(est.r_max, s.big);
  }
  std::vector<double> x, y;
  double envelope = 0.0;
  for (const auto& [key, s] : by_ratio) {
    const double lx = std::log(s->big / s->small);
    const double ly = std::log(static_cast<double>(s->count));
    x.push_back(lx);
    y.push_back(ly);
    envelope = std::max(envelope, ly / lx);
    est.scales.push_back(s->small);
    est.exponents.push_back(ly / lx);
    est.trace.push_back({s->big, s->small, static_cast<double>(s->count), ly / lx});
    if (s->flagged)
      est.notes.push_back("pair (R=" + std::to_string(s->big) + ", r=" +
                          std::to_string(s->small) +
                          ") maximised near the finest-resolved points");
  }
  const LineFit fit = fit_line(x, y);
  est.value = std::clamp(fit.slope, 0.0, static_cast<double>(e.dim()));
  est.bracket_lo = est.bracket_hi = est.value;
  est.residual = fit.rms_residual;
  est.extras.emplace_back("upper_envelope",
                          std::min(envelope, static_cast<double>(e.dim())));
  est.extras.emplace_back("raw_slope", fit.slope);
  return est;
}

// Dyadic pairs (R, R 2^-k), k = kMinRatio..kMaxRatio, for the given R values.
constexpr int kMinRatio = 2;
constexpr int kMaxRatio = 12;

std::vector<ScalePair> ratio_pairs(const PointCloud& e,
                                   const std::vector<double>& bigs) {
  const double diam = diameter(e);
  std::vector<ScalePair> pairs;
  for (double big : bigs) {
    if (diam > 0.0 && big > diam * (1.0 + 1e-12)) continue;
    for (int k = kMinRatio; k <= kMaxRatio; ++k) {
      const double small = std::ldexp(big, -k);
      if (small >= e.resolution() * (1.0 - 1e-12)) pairs.push_back({big, small});
    }
  }
  return pairs;
}

}  // namespace

std::vector<LocalCountSample> max_local_counts(
    const PointCloud& e, const std::vector<ScalePair>& pairs) {
  const double diam = diameter(e);
  for (const auto& pair : pairs) validate_pair(e, pair, diam);

  const SortedCloud sorted(e);
  const auto centers = choose_centers(e);
  const auto finest = finest_points(e, sorted);

  std::map<double, std::vector<std::size_t>> by_small;
  for (std::size_t p = 0; p < pairs.size(); ++p)
    by_small[pairs[p].small].push_back(p);

  std::vector<LocalCountSample> out(pairs.size());
  for (const auto& [small, members] : by_small) {
    const GlobalMesh mesh = build_mesh(sorted, small);
    for (const std::size_t p : members) {
      std::vector<std::size_t> counts(centers.size());
      parallel_for(centers.size(), [&](std::size_t c) {
        counts[c] = local_count(sorted, mesh, centers[c], pairs[p].big);
      });
      const auto best = static_cast<std::size_t>(
          std::max_element(counts.begin(), counts.end()) - counts.begin());
      LocalCountSample sample{centers[best], pairs[p].big, small, counts[best],
                              false};
      const auto at = e.point(sample.center);
      for (auto f : finest) {
        if ((e.point(f) - at).norm() <= 2.0 * small) {
          sample.flagged = true;
          break;
        }
      }
      out[p] = sample;
    }
  }
  return out;
}

namespace {

constexpr double kSpectrumFloorAlpha = 0.3;
constexpr double kSpectrumAlphaStep = 0.05;

std::vector<LocalCountSample> admissible(const std::vector<LocalCountSample>& samples,
                                         double alpha) {
  std::vector<LocalCountSample> kept;
  for (const auto& s : samples)
    if (s.small <= std::pow(s.big, 1.0 / alpha) * (1.0 + 1e-12)) kept.push_back(s);
  return kept;
}

// Raw spectrum regression at alpha, lifted to the running maximum over the
// alphas of the fixed floor grid below it, so the curve is non-decreasing.
DimensionEstimate monotone_spectrum(const PointCloud& e,
                                    const std::vector<LocalCountSample>& samples,
                                    double alpha) {
  const auto kept = admissible(samples, alpha);
  if (kept.empty())
    throw ScaleError("no pair with r <= R^(1/alpha) above the cloud resolution");
  DimensionEstimate est = regress_counts(e, kept);
  const double raw = est.value;
  for (int k = 0;; ++k) {
    const double a = kSpectrumFloorAlpha + k * kSpectrumAlphaStep;
    if (a >= alpha - 1e-12) break;
    const auto lower = admissible(samples, a);
    std::map<long long, int> ratios;
    for (const auto& s : lower) ratios[std::llround(std::log2(s.big / s.small) * 1e6)];
    if (ratios.size() < 3) continue;
    est.value = std::max(est.value, regress_counts(e, lower).value);
  }
  est.extras.emplace_back("alpha", alpha);
  est.extras.emplace_back("raw_value", raw);
  if (est.value > raw)
    est.notes.push_back("raised to the running maximum over smaller alpha");
  est.bracket_lo = est.bracket_hi = est.value;
  return est;
}

DimensionEstimate quasi_from_samples(const PointCloud& e,
                                     const std::vector<LocalCountSample>& samples,
                                     const std::vector<double>& alphas) {
  DimensionEstimate est;
  std::vector<double> values;
  for (double alpha : alphas) {
    const auto spectrum = monotone_spectrum(e, samples, alpha);
    values.push_back(spectrum.value);
    for (const auto& note : spectrum.notes)
      if (std::find(est.notes.begin(), est.notes.end(), note) == est.notes.end())
        est.notes.push_back(note);
  }
  // Linear in (1 - alpha) through the last three values, extrapolated to
  // alpha = 1 and kept at or above the curve (the spectrum is non-decreasing).
  const std::size_t n = alphas.size();
  double limit = values.back();
  if (n >= 3) {
    const std::vector<double> x{1.0 - alphas[n - 3], 1.0 - alphas[n - 2],
                                1.0 - alphas[n - 1]};
    const std::vector<double> y(values.end() - 3, values.end());
    const LineFit fit = fit_line(x, y);
    limit = fit.intercept;
    est.residual = fit.rms_residual;
  }
  est.value = std::clamp(limit, values.back(), static_cast<double>(e.dim()));
  est.bracket_lo = values.front();
  est.bracket_hi = est.value;
  est.scales = alphas;  // the raw curve: spectrum value per alpha
  est.exponents = values;
  for (std::size_t i = 0; i < alphas.size(); ++i)
    est.extras.emplace_back("spectrum@" + std::to_string(alphas[i]), values[i]);
  return est;
}

}  // namespace

std::vector<ScalePair> default_assouad_pairs(const PointCloud& e) {
  std::vector<double> bigs;
  for (int j = 1; std::ldexp(1.0, -j - kMinRatio) >= e.resolution(); ++j)
    bigs.push_back(std::ldexp(1.0, -j));
  return ratio_pairs(e, bigs);
}

std::vector<ScalePair> spectrum_pairs(const std::vector<ScalePair>& pairs,
                                      double alpha) {
  std::vector<ScalePair> kept;
  for (const auto& pair : pairs)
    if (pair.small <= std::pow(pair.big, 1.0 / alpha) * (1.0 + 1e-12))
      kept.push_back(pair);
  return kept;
}

DimensionEstimate estimate_assouad(const PointCloud& e,
                                   const std::vector<ScalePair>& pairs) {
  if (pairs.empty()) throw DiagnosticsError("estimate_assouad: no scale pairs");
  if (e.size() == 1) {
    DimensionEstimate est;
    est.notes.push_back("single point");
    return est;
  }
  return regress_counts(e, max_local_counts(e, pairs));
}

DimensionEstimate estimate_assouad(const PointCloud& e) {
  if (e.size() == 1) return DimensionEstimate{};
  const auto samples = max_local_counts(e, default_assouad_pairs(e));
  DimensionEstimate est = regress_counts(e, samples);
  const double spectrum =
      quasi_from_samples(e, samples, default_quasi_assouad_alphas()).value;
  est.extras.emplace_back("quasi_assouad", spectrum);
  if (spectrum > est.value) {
    est.value = spectrum;
    est.bracket_lo = est.bracket_hi = spectrum;
    est.notes.push_back("raised to the spectrum estimate");
  }
  return est;
}

DimensionEstimate estimate_assouad_spectrum(const PointCloud& e, double alpha,
                                            const ScaleGrid* grid) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw DomainError("estimate_assouad_spectrum: alpha must lie in (0,1)");
  if (e.size() == 1) return DimensionEstimate{};
  const auto candidates =
      grid ? ratio_pairs(e, grid->r_values) : default_assouad_pairs(e);
  if (spectrum_pairs(candidates, alpha).empty())
    throw ScaleError("no pair with r <= R^(1/alpha) above the cloud resolution");
  return monotone_spectrum(e, max_local_counts(e, candidates), alpha);
}

std::vector<double> default_quasi_assouad_alphas() {
  return {0.5, 0.6, 0.7, 0.8, 0.9};
}

DimensionEstimate estimate_quasi_assouad(const PointCloud& e,
                                         const std::vector<double>& alphas) {
  if (alphas.size() < 3)
    throw DiagnosticsError("estimate_quasi_assouad: need at least 3 alphas");
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    if (!(alphas[i] > 0.0 && alphas[i] < 1.0))
      throw DomainError("estimate_quasi_assouad: alphas must lie in (0,1)");
    if (i > 0 && !(alphas[i] > alphas[i - 1]))
      throw DomainError("estimate_quasi_assouad: alphas must increase");
  }
  if (e.size() == 1) return DimensionEstimate{};
  // One table of local counts serves every alpha.
  return quasi_from_samples(e, max_local_counts(e, default_assouad_pairs(e)),
                            alphas);
}

}  // namespace dimlab
