#pragma once

#include <Eigen/Dense>

#include <vector>

#include "dimlab/estimate.hpp"
#include "dimlab/pointset.hpp"

namespace dimlab {

/// Centers are exhaustive up to this many points, farthest-point sampled
/// beyond it.
inline constexpr Eigen::Index kExactCenterLimit = Eigen::Index{1} << 16;
inline constexpr Eigen::Index kSampledCenters = 4096;

struct ScalePair {
  double big;    // R
  double small;  // r < R
};

/// N_r(B(x,R) ∩ E) maximised over centers x in E.
struct LocalCountSample {
  Eigen::Index center = 0;
  double big = 0.0;
  double small = 0.0;
  std::size_t count = 1;
  bool flagged = false;  // maximiser sits near the finest-resolved part
};

/// Local box counts for every pair, maximised over centers. Cells belong to
/// one mesh per r (side r/sqrt(d), anchored at the cloud's lower corner).
std::vector<LocalCountSample> max_local_counts(const PointCloud& e,
                                               const std::vector<ScalePair>& pairs);

/// R = 2^-j (j >= 1) with ratios R/r = 2^2..2^12, restricted to
/// resolution <= r < R <= diameter.
std::vector<ScalePair> default_assouad_pairs(const PointCloud& e);

/// The pairs admissible for the spectrum at alpha: r <= R^{1/alpha}.
std::vector<ScalePair> spectrum_pairs(const std::vector<ScalePair>& pairs,
                                      double alpha);

/// Slope of log sup N_r(B(x,R) ∩ E) against log(R/r), the sup taken over
/// centers and over all pairs sharing a ratio.
DimensionEstimate estimate_assouad(const PointCloud& e,
                                   const std::vector<ScalePair>& pairs);
/// Default pairs; the value is raised to at least the spectrum estimate at
/// the largest default alpha, since the Assouad dimension dominates it.
DimensionEstimate estimate_assouad(const PointCloud& e);

/// Upper Assouad spectrum at alpha: as estimate_assouad, restricted to pairs
/// with r <= R^{1/alpha}, then lifted to the running maximum over
/// alpha' = 0.3, 0.35, ... below alpha. R values come from `grid` when given.
DimensionEstimate estimate_assouad_spectrum(const PointCloud& e, double alpha,
                                            const ScaleGrid* grid = nullptr);

/// Spectrum at the largest alpha; the curve over `alphas` is kept in
/// scales/exponents.
DimensionEstimate estimate_quasi_assouad(const PointCloud& e,
                                         const std::vector<double>& alphas);

std::vector<double> default_quasi_assouad_alphas();

}  // namespace dimlab
