#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <vector>

#include "dimlab/pointset.hpp"

namespace dimlab {

/// Dense Cholesky bound for fBm synthesis.
inline constexpr Eigen::Index kFbmPointCap = Eigen::Index{1} << 13;

/// Orthonormal basis (columns) of an m-dimensional subspace of R^d.
struct SubspaceBasis {
  Eigen::MatrixXd matrix;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  int ambient_dim() const { return static_cast<int>(matrix.rows()); }
  int subspace_dim() const { return static_cast<int>(matrix.cols()); }
  /// max |V^T V - I|.
  double gram_deviation() const;
};

/// Haar-distributed element of G(d, m): QR of a d x m Gaussian matrix with
/// the signs fixed so that R has a positive diagonal.
SubspaceBasis sample_grassmannian(int d, int m, std::uint64_t seed,
                                  std::uint64_t stream = 0);

/// Coordinates of each point in the basis; resolution carried over (clipped
/// to the image diameter).
PointCloud project(const PointCloud& e, const SubspaceBasis& v);

/// Basis matrix as CSV: header v1..vm, one row per ambient coordinate.
void write_basis_csv(const SubspaceBasis& v, const std::filesystem::path& path);

struct FbmSample {
  double alpha = 0.5;
  int m = 1;
  PointCloud image;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  double jitter = 0.0;
  /// The image resolution is (source resolution)^alpha, a heuristic.
  bool heuristic_resolution = true;
};

/// Cholesky factor of the index-alpha fBm covariance
/// C(x,y) = (|x|^{2a} + |y|^{2a} - |x-y|^{2a}) / 2 over a cloud, reusable
/// across seeds. Points at the origin are left out and map to 0.
class FbmFactor {
 public:
  FbmFactor(const PointCloud& e, double alpha);

  FbmSample sample(int m, std::uint64_t seed, std::uint64_t stream = 0) const;

  double alpha() const { return alpha_; }
  double jitter() const { return jitter_; }
  const PointCloud& source() const { return source_; }

 private:
  PointCloud source_;
  double alpha_;
  std::vector<Eigen::Index> active_;  // points away from the origin
  Eigen::MatrixXd lower_;
  double jitter_ = 0.0;
};

FbmSample sample_fbm(const PointCloud& e, double alpha, int m,
                     std::uint64_t seed, std::uint64_t stream = 0);

}  // namespace dimlab
