#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dimlab/estimate.hpp"
#include "dimlab/pointset.hpp"

namespace dimlab {

/// inequality: pass iff lhs >= rhs - slack. equality: |lhs - rhs| <= slack.
/// trend: pass decided by the check's own rule, recorded in `notes`.
enum class Relation { inequality, equality, trend };

std::string to_string(Relation relation);

/// One row of a per-direction or per-seed table.
struct VerdictSample {
  std::uint64_t index = 0;  // random stream of the direction or seed
  double param = 0.0;       // theta, or 0 when the table has one column
  double value = 0.0;
};

struct CheckVerdict {
  std::string name;
  Relation relation = Relation::inequality;
  std::string inputs_digest;
  std::vector<std::pair<std::string, double>> params;
  std::uint64_t seed = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  bool pass = false;
  bool applicable = true;  // false: reported, not failed
  std::vector<std::pair<std::string, double>> stats;
  std::vector<VerdictSample> samples;
  std::vector<std::string> notes;
};

/// Default tolerances.
struct Slacks {
  double projection = 0.1;
  double marstrand = 0.15;
  double spectrum_bound = 0.1;
  double profile_ratio = 0.07;
  double banaji = 0.07;
  double fbm = 0.12;
  double box_collapse = 0.08;
  double box_collapse_gate = 0.05;
};

/// FNV-1a over the cloud's coordinates, resolution and dimension, in hex.
std::string cloud_digest(const PointCloud& e);

/// Haar directions V_i (stream i), dim_theta of each projection; pass iff
/// every estimate <= profile^m + slack and the median is within slack of it.
CheckVerdict check_projection_profile(const PointCloud& e, int m, double theta,
                                      int n_dirs, const ScaleGrid& grid,
                                      std::uint64_t seed, double slack = 0.1,
                                      Aggregate mode = Aggregate::slope);

/// Allowed rise between consecutive gaps of a trend check (estimator noise).
inline constexpr double kTrendTolerance = 0.02;

/// Finite-theta proxy for the quasi-Hausdorff projection theorem: gap
/// |median projected dim_theta - min(m, dim_theta(e))| along a decreasing
/// theta list must not increase (up to kTrendTolerance), and the last gap
/// must be <= slack.
CheckVerdict check_marstrand_quasi(const PointCloud& e, int m,
                                   const std::vector<double>& thetas, int n_dirs,
                                   const ScaleGrid& grid, std::uint64_t seed,
                                   double slack = 0.15,
                                   Aggregate mode = Aggregate::slope);

/// Smallest theta for which r^theta <= diameter over the whole grid.
double theta_floor(const PointCloud& e, const ScaleGrid& grid);

/// lhs = profile^t; rhs = dim_theta - max{0, spectrum(alpha) - t,
/// (Assouad - t)(1 - alpha)}. Skipped when profile^t >= t - 0.02.
CheckVerdict check_spectrum_bound(const PointCloud& e, double t, double theta,
                                  double alpha, const ScaleGrid& grid, double slack = 0.1,
                                  Aggregate mode = Aggregate::slope);

/// lhs = profile^t; rhs = profile^s / (1 + (1/t - 1/s) profile^s), t <= s.
CheckVerdict check_profile_ratio(const PointCloud& e, double s, double t, double theta,
                                 const ScaleGrid& grid, double slack = 0.07,
                                 Aggregate mode = Aggregate::slope);

/// lhs = dim_theta; rhs = theta d b / (d - (1 - theta) b), b the box estimate.
CheckVerdict check_banaji(const PointCloud& e, double theta,
                          const ScaleGrid& grid, double slack = 0.07,
                          Aggregate mode = Aggregate::slope);

/// Dyadic grid for fBm images: 2^-2 down to (source resolution)^alpha.
ScaleGrid fbm_image_grid(const PointCloud& e, double alpha);

/// lhs = median over seeds (stream i) of dim_theta of the image B(e);
/// rhs = profile^{m alpha}(e) / alpha.
CheckVerdict check_fbm(const PointCloud& e, double alpha, int m, double theta,
                       int n_seeds, const ScaleGrid& grid, std::uint64_t seed,
                       double slack = 0.12, Aggregate mode = Aggregate::slope);

/// Applicable when |box - quasi-Assouad| <= gate; then lhs is the largest
/// |dim_theta - box| over the list, checked against 0 with slack.
CheckVerdict check_box_collapse(const PointCloud& e, const std::vector<double>& thetas,
                                const ScaleGrid& grid, double slack = 0.08,
                                double gate = 0.05, Aggregate mode = Aggregate::slope);

/// Fraction of sampled directions whose projected dim_theta is below lambda.
double exceptional_frequency(const PointCloud& e, int m, double theta,
                             double lambda, int n_dirs, const ScaleGrid& grid,
                             std::uint64_t seed, Aggregate mode = Aggregate::slope);

/// Median of a non-empty list.
double median(std::vector<double> values);

/// Linear-interpolated quantile, q in [0,1].
double quantile(std::vector<double> values, double q);

}  // namespace dimlab
