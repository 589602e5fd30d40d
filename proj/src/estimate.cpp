#include "dimlab/estimate.hpp"

#include <algorithm>
#include <cmath>

#include "dimlab/errors.hpp"
#include "dimlab/pointset.hpp"

namespace dimlab {

std::string_view to_string(Aggregate mode) {
  switch (mode) {
    case Aggregate::lower:
      return "lower";
    case Aggregate::upper:
      return "upper";
    case Aggregate::slope:
      return "slope";
  }
  return "slope";
}

Aggregate parse_aggregate(std::string_view name) {
  if (name == "lower") return Aggregate::lower;
  if (name == "upper") return Aggregate::upper;
  if (name == "slope") return Aggregate::slope;
  throw ConfigError("unknown mode '" + std::string(name) + "'");
}

ScaleGrid ScaleGrid::dyadic(int k_min, int k_max) {
  ScaleGrid grid;
  for (int k = k_min; k <= k_max; ++k) grid.r_values.push_back(std::ldexp(1.0, -k));
  return grid;
}

ScaleGrid ScaleGrid::for_cloud(const PointCloud& e) {
  const int k_max =
      static_cast<int>(std::floor(std::log2(1.0 / e.resolution()))) - 2;
  return dyadic(6, k_max);
}

void ScaleGrid::validate(const PointCloud& e, std::size_t min_scales) const {
  if (r_values.size() < min_scales)
    throw DiagnosticsError("scale grid has " + std::to_string(r_values.size()) +
                           " scales; at least " + std::to_string(min_scales) +
                           " are needed");
  for (std::size_t k = 0; k < r_values.size(); ++k) {
    const double r = r_values[k];
    if (!(r > 0.0 && r < 1.0))
      throw ScaleError("scale " + std::to_string(r) + " outside (0,1)");
    if (k > 0 && !(r < r_values[k - 1]))
      throw ScaleError("scale grid must be strictly decreasing");
    if (r < e.resolution() * (1.0 - 1e-12))
      throw ScaleError("scale " + std::to_string(r) +
                       " is below the cloud resolution " +
                       std::to_string(e.resolution()));
  }
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  const double slope = sxx > 0.0 ? sxy / sxx : 0.0;
  const double intercept = my - slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double res = y[i] - (intercept + slope * x[i]);
    ss += res * res;
  }
  return {slope, intercept, std::sqrt(ss / n)};
}

namespace {

LineFit exponent_fit(const std::vector<double>& scales,
                     const std::vector<double>& exponents) {
  std::vector<double> x(scales.size()), y(scales.size());
  for (std::size_t k = 0; k < scales.size(); ++k) {
    x[k] = -std::log(scales[k]);
    y[k] = exponents[k] * x[k];
  }
  return fit_line(x, y);
}

}  // namespace

double aggregate(const std::vector<double>& scales,
                 const std::vector<double>& exponents, Aggregate mode) {
  if (mode == Aggregate::slope) return exponent_fit(scales, exponents).slope;
  const std::size_t window = std::min<std::size_t>(kWindow, exponents.size());
  const auto first = exponents.end() - static_cast<std::ptrdiff_t>(window);
  return mode == Aggregate::lower ? *std::min_element(first, exponents.end())
                                  : *std::max_element(first, exponents.end());
}

DimensionEstimate bisect_dimension(
    const ScaleGrid& grid, double s_max, Aggregate mode,
    const std::function<std::vector<double>(double)>& exponents_at) {
  const auto& scales = grid.r_values;
  auto crossing = [&](double s) {
    return aggregate(scales, exponents_at(s), mode);
  };

  DimensionEstimate est;
  est.mode = mode;
  est.scales = scales;
  est.r_max = scales.front();
  est.r_min = scales.back();

  double lo = 0.0, hi = s_max;
  if (crossing(lo) <= 0.0) {
    hi = lo;
  } else if (crossing(hi) >= 0.0) {
    lo = hi;
  } else {
    while (hi - lo > kBisectionTolerance) {
      const double mid = 0.5 * (lo + hi);
      (crossing(mid) > 0.0 ? lo : hi) = mid;
    }
  }
  est.bracket_lo = lo;
  est.bracket_hi = hi;
  est.value = 0.5 * (lo + hi);
  est.exponents = exponents_at(est.value);
  est.residual = exponent_fit(scales, est.exponents).rms_residual;
  return est;
}

}  // namespace dimlab
