#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>

#include "dimlab/estimate.hpp"
#include "dimlab/kernels.hpp"
#include "dimlab/pointset.hpp"

namespace dimlab {

/// Clouds up to this size get a materialized kernel matrix; larger ones
/// evaluate kernel columns on demand.
inline constexpr Eigen::Index kDenseKernelLimit = 4096;
/// Profile estimation subsamples each scale to at most this many points.
inline constexpr Eigen::Index kProfilePointCap = Eigen::Index{1} << 14;

/// Probability weights over the points of a cloud.
class SimplexMeasure {
 public:
  explicit SimplexMeasure(Eigen::VectorXd weights);
  static SimplexMeasure uniform(Eigen::Index n);

  const Eigen::VectorXd& weights() const { return weights_; }
  Eigen::Index size() const { return weights_.size(); }

 private:
  Eigen::VectorXd weights_;
};

struct EnergySolution {
  SimplexMeasure measure;
  double energy = 1.0;
  double gap = 0.0;  // Frank-Wolfe duality gap at `measure`
  int iterations = 0;
  double min_ritz = 0.0;  // smallest Ritz value of the kernel matrix probe
  bool restarted = false;  // kernel looked indefinite; multi-start used
};

struct EnergyOptions {
  double tol = 1e-10;
  int max_iter = 200000;
  /// Interpret tol relative to the current energy.
  bool relative_tol = false;
  /// Random vertex restarts when the kernel matrix is materially indefinite.
  int restarts = 8;
  std::uint64_t seed = 0;
  int lanczos_steps = 16;
  std::optional<Eigen::VectorXd> warm_start;
};

Eigen::MatrixXd kernel_matrix(const PointCloud& e, const KernelParams& params);
Eigen::MatrixXd trunc_kernel_matrix(const PointCloud& e, double s, double r,
                                    double theta);

/// w^T K w.
double energy(const Eigen::MatrixXd& kernel, const SimplexMeasure& w);

/// Smallest Ritz value of a symmetric matrix after `steps` Lanczos steps.
double smallest_ritz_value(const Eigen::MatrixXd& matrix, int steps);

/// Minimises w^T K w over the probability simplex (Frank-Wolfe with
/// pairwise/away steps and fully-corrective refinements on the support).
EnergySolution min_energy(const Eigen::MatrixXd& kernel,
                          const EnergyOptions& options = {});

EnergySolution min_energy(const PointCloud& e, const KernelParams& params,
                          double tol, int max_iter);
EnergySolution min_energy(const PointCloud& e, const KernelParams& params,
                          const EnergyOptions& options);

/// 1 / min energy; lies in [1, N].
double capacity(const PointCloud& e, const KernelParams& params);

/// Merges points sharing a mesh cell of diameter `cell_diameter` (keeping one
/// representative per cell), then farthest-point subsamples to `cap`.
PointCloud reduce_cloud(const PointCloud& e, double cell_diameter,
                        Eigen::Index cap = kProfilePointCap);

struct ProfileOptions {
  /// Points closer than this fraction of r are merged before solving.
  double merge_fraction = 0.25;
  double relative_tol = 1e-3;
  int max_iter = 20000;
  std::uint64_t seed = 0;
};

/// Capacity-based dimension profile dim^t_theta.
DimensionEstimate estimate_profile(const PointCloud& e, double t, double theta,
                                   const ScaleGrid& grid,
                                   Aggregate mode = Aggregate::slope,
                                   const ProfileOptions& options = {});

}  // namespace dimlab
