#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <vector>

#include "dimlab/estimate.hpp"
#include "dimlab/pointset.hpp"

namespace dimlab {

using CellCoords = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

/// Integer coordinates of the half-open mesh cells of side `side`, anchored
/// at `origin`. Cells along each axis are clamped so the far face of the
/// bounding box falls in the last cell.
CellCoords mesh_cells(const Eigen::Ref<const Eigen::MatrixXd>& points,
                      const Eigen::VectorXd& origin,
                      const Eigen::VectorXd& extent, double side);

/// Sorts columns lexicographically and assigns each input column the index
/// of its distinct value. Returns the number of distinct columns.
std::size_t group_columns(const CellCoords& coords,
                          std::vector<std::uint32_t>& assignment,
                          CellCoords* unique = nullptr);

/// Number of occupied cells of the mesh with side r/sqrt(d) (cell diameter r)
/// anchored at the lower corner of `points`.
std::size_t count_cells(const Eigen::Ref<const Eigen::MatrixXd>& points,
                        double r);

/// Mesh box count of the cloud at scale r. Requires r >= resolution.
std::size_t box_count(const PointCloud& e, double r);

/// Dyadic cell tree of a cloud between scale r (leaves: the box-count mesh,
/// cell diameter r) and the single cell containing the whole cloud. Parent
/// cells have twice the side of their children.
///
/// cover_sum(s) minimises sum |cell|^s over covers by tree cells whose
/// diameter lies in [r, r^theta]; cells wider than r^theta are always split.
class DyadicCover {
 public:
  DyadicCover(const PointCloud& e, double r, double theta);

  double cover_sum(double s) const;
  std::size_t leaf_count() const { return leaf_count_; }
  std::size_t levels() const { return parents_.size() + 1; }
  double r() const { return r_; }

 private:
  double r_;
  double theta_;
  std::size_t leaf_count_ = 0;
  // parents_[j][i]: index of the parent (at level j+1) of cell i at level j.
  std::vector<std::vector<std::uint32_t>> parents_;
  std::vector<std::size_t> level_sizes_;
};

/// Upper bound on S^s_{r,theta}(E): optimal over dyadic covers.
double cover_sum(const PointCloud& e, double s, double r, double theta);

DimensionEstimate estimate_intermediate_dim(const PointCloud& e, double theta,
                                            const ScaleGrid& grid,
                                            Aggregate mode = Aggregate::slope);

DimensionEstimate estimate_box_dim(const PointCloud& e, const ScaleGrid& grid,
                                   Aggregate mode = Aggregate::slope);

/// theta * d * b / (d - (1 - theta) * b): lower bound for dim_theta in terms
/// of the box dimension b of a set in R^d.
double banaji_bound(double box_dim, int d, double theta);

}  // namespace dimlab
