#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace dimlab {

inline constexpr std::size_t kDefaultPointCap = std::size_t{1} << 22;

/// Finite approximation of a compact set in R^d. Points are stored one per
/// column of a d x N matrix. `resolution` is the smallest scale the cloud
/// represents faithfully; estimators refuse to work below it.
class PointCloud {
 public:
  using Matrix = Eigen::MatrixXd;

  PointCloud(Matrix points, double resolution, std::string label = {});

  /// Convenience for one-dimensional clouds.
  static PointCloud from_values(std::span<const double> values,
                                double resolution, std::string label = {});

  const Matrix& points() const { return points_; }
  auto point(Eigen::Index i) const { return points_.col(i); }
  Eigen::Index size() const { return points_.cols(); }
  int dim() const { return static_cast<int>(points_.rows()); }
  double resolution() const { return resolution_; }
  const std::string& label() const { return label_; }

  Eigen::VectorXd lower_corner() const { return points_.rowwise().minCoeff(); }
  Eigen::VectorXd upper_corner() const { return points_.rowwise().maxCoeff(); }

  PointCloud subset(std::span<const Eigen::Index> indices) const;
  PointCloud relabeled(std::string label) const;

 private:
  Matrix points_;
  double resolution_;
  std::string label_;
};

/// One similarity map x -> ratio * x + translation.
struct SimilarityMap {
  double ratio;
  Eigen::VectorXd translation;
};

struct IfsSpec {
  std::vector<SimilarityMap> maps;
  int depth = 1;

  /// The middle-third Cantor set {x/3, x/3 + 2/3}.
  static IfsSpec middle_third_cantor(int depth);
};

/// {1/n^p : 1 <= n <= n_max} together with 0.
PointCloud gen_sequence_set(double p, long long n_max,
                            std::size_t cap = kDefaultPointCap);

/// {0} together with {1/log n : 2 <= n <= n_max}.
PointCloud gen_log_set(long long n_max, std::size_t cap = kDefaultPointCap);

/// Images of the origin under every composition of `depth` maps.
PointCloud gen_ifs(const IfsSpec& spec, std::size_t cap = kDefaultPointCap);

/// Cartesian product, dimension dim(a) + dim(b).
PointCloud product(const PointCloud& a, const PointCloud& b,
                   std::size_t cap = kDefaultPointCap);

/// n equally spaced points on [0,1]^dim (per axis), spacing 1/(n-1).
PointCloud gen_grid(int points_per_axis, int dim = 1,
                    std::size_t cap = kDefaultPointCap);

/// Embeds a cloud into R^target_dim, padding with zero coordinates.
PointCloud embed(const PointCloud& e, int target_dim);

/// Largest pairwise distance.
double diameter(const PointCloud& e);

/// Smallest positive pairwise distance, or 0 when all points coincide.
double min_separation(const PointCloud& e);

// Serialization: CSV (header x1..xd, one point per row) plus a JSON side
// record {dim, resolution, label, points}.
void write_csv(const PointCloud& e, const std::filesystem::path& csv_path);
PointCloud read_csv(const std::filesystem::path& csv_path);
std::filesystem::path metadata_path(const std::filesystem::path& csv_path);

}  // namespace dimlab
