#include "dimlab/covering.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dimlab/errors.hpp"
#include "dimlab/parallel.hpp"

namespace dimlab {
namespace {

void check_scale(const PointCloud& e, double r) {
  if (!(r > 0.0 && r < 1.0))
    throw ScaleError("scale " + std::to_string(r) + " outside (0,1)");
  if (r < e.resolution() * (1.0 - 1e-12))
    throw ScaleError("scale " + std::to_string(r) +
                     " is below the cloud resolution " +
                     std::to_string(e.resolution()));
}

void check_theta(double theta) {
  if (!(theta > 0.0 && theta <= 1.0))
    throw DomainError("theta must lie in (0,1]");
}

}  // namespace

CellCoords mesh_cells(const Eigen::Ref<const Eigen::MatrixXd>& points,
                      const Eigen::VectorXd& origin,
                      const Eigen::VectorXd& extent, double side) {
  const Eigen::Index d = points.rows();
  CellCoords coords(d, points.cols());
  for (Eigen::Index k = 0; k < d; ++k) {
    const auto cells = std::max<std::int64_t>(
        1, static_cast<std::int64_t>(std::ceil(extent(k) / side)));
    for (Eigen::Index i = 0; i < points.cols(); ++i) {
      const auto c = static_cast<std::int64_t>(
          std::floor((points(k, i) - origin(k)) / side));
      coords(k, i) = std::clamp<std::int64_t>(c, 0, cells - 1);
    }
  }
  return coords;
}

std::size_t group_columns(const CellCoords& coords,
                          std::vector<std::uint32_t>& assignment,
                          CellCoords* unique) {
  const Eigen::Index n = coords.cols();
  const Eigen::Index d = coords.rows();
  std::vector<std::uint32_t> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0u);
  auto less = [&](std::uint32_t a, std::uint32_t b) {
    for (Eigen::Index k = 0; k < d; ++k) {
      if (coords(k, a) != coords(k, b)) return coords(k, a) < coords(k, b);
    }
    return false;
  };
  std::sort(order.begin(), order.end(), less);

  assignment.assign(static_cast<std::size_t>(n), 0);
  std::size_t distinct = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i > 0 && less(order[i - 1], order[i])) ++distinct;
    assignment[order[i]] = static_cast<std::uint32_t>(distinct);
  }
  const std::size_t count = n > 0 ? distinct + 1 : 0;
  if (unique) {
    unique->resize(d, static_cast<Eigen::Index>(count));
    for (std::size_t i = 0; i < order.size(); ++i)
      unique->col(assignment[order[i]]) = coords.col(order[i]);
  }
  return count;
}

std::size_t count_cells(const Eigen::Ref<const Eigen::MatrixXd>& points,
                        double r) {
  if (points.cols() == 0) return 0;
  const double side = r / std::sqrt(static_cast<double>(points.rows()));
  const Eigen::VectorXd lo = points.rowwise().minCoeff();
  const Eigen::VectorXd extent = points.rowwise().maxCoeff() - lo;
  const CellCoords coords = mesh_cells(points, lo, extent, side);
  if (points.rows() == 1) {
    std::vector<std::int64_t> v(coords.data(), coords.data() + coords.size());
    std::sort(v.begin(), v.end());
    return static_cast<std::size_t>(
        std::unique(v.begin(), v.end()) - v.begin());
  }
  std::vector<std::uint32_t> assignment;
  return group_columns(coords, assignment);
}

std::size_t box_count(const PointCloud& e, double r) {
  check_scale(e, r);
  return count_cells(e.points(), r);
}

DyadicCover::DyadicCover(const PointCloud& e, double r, double theta)
    : r_(r), theta_(theta) {
  check_scale(e, r);
  check_theta(theta);
  const double side = r / std::sqrt(static_cast<double>(e.dim()));
  const Eigen::VectorXd lo = e.lower_corner();
  CellCoords coords = mesh_cells(e.points(), lo, e.upper_corner() - lo, side);

  std::vector<std::uint32_t> assignment;
  CellCoords cells;
  leaf_count_ = group_columns(coords, assignment, &cells);
  level_sizes_.push_back(leaf_count_);
  while (level_sizes_.back() > 1) {
    CellCoords parent_coords = cells.unaryExpr(
        [](std::int64_t c) { return c >> 1; });
    CellCoords next;
    const std::size_t count = group_columns(parent_coords, assignment, &next);
    parents_.push_back(assignment);
    level_sizes_.push_back(count);
    cells = std::move(next);
  }
}

double DyadicCover::cover_sum(double s) const {
  const double upper = std::pow(r_, theta_) * (1.0 + 1e-12);
  std::vector<double> cost(leaf_count_, std::pow(r_, s));
  double diam = r_;
  for (std::size_t j = 0; j < parents_.size(); ++j) {
    std::vector<double> next(level_sizes_[j + 1], 0.0);
    for (std::size_t i = 0; i < cost.size(); ++i) next[parents_[j][i]] += cost[i];
    diam *= 2.0;
    if (diam <= upper) {
      const double whole = std::pow(diam, s);
      for (double& c : next) c = std::min(c, whole);
    }
    cost = std::move(next);
  }
  return cost.front();
}

double cover_sum(const PointCloud& e, double s, double r, double theta) {
  if (!(s >= 0.0 && s <= e.dim()))
    throw DomainError("cover_sum: s must lie in [0, d]");
  return DyadicCover(e, r, theta).cover_sum(s);
}

DimensionEstimate estimate_intermediate_dim(const PointCloud& e, double theta,
                                            const ScaleGrid& grid,
                                            Aggregate mode) {
  check_theta(theta);
  grid.validate(e);
  const auto& scales = grid.r_values;
  std::vector<std::optional<DyadicCover>> covers(scales.size());
  parallel_for(scales.size(),
               [&](std::size_t k) { covers[k].emplace(e, scales[k], theta); });

  std::vector<TraceRow> trace;
  auto exponents_at = [&](double s) {
    std::vector<double> out(scales.size());
    for (std::size_t k = 0; k < scales.size(); ++k) {
      const double sum = covers[k]->cover_sum(s);
      out[k] = std::log(sum) / -std::log(scales[k]);
      trace.push_back({s, scales[k], sum, out[k]});
    }
    return out;
  };
  DimensionEstimate est = bisect_dimension(grid, e.dim(), mode, exponents_at);
  est.trace = std::move(trace);
  if (theta < 1.0 && std::pow(scales.front(), theta) > diameter(e))
    est.notes.push_back("coarsest r^theta exceeds the cloud diameter");
  return est;
}

DimensionEstimate estimate_box_dim(const PointCloud& e, const ScaleGrid& grid,
                                   Aggregate mode) {
  grid.validate(e);
  const auto& scales = grid.r_values;
  std::vector<double> counts(scales.size());
  parallel_for(scales.size(), [&](std::size_t k) {
    counts[k] = static_cast<double>(box_count(e, scales[k]));
  });

  std::vector<TraceRow> trace;
  auto exponents_at = [&](double s) {
    std::vector<double> out(scales.size());
    for (std::size_t k = 0; k < scales.size(); ++k) {
      const double sum = counts[k] * std::pow(scales[k], s);
      out[k] = std::log(sum) / -std::log(scales[k]);
      trace.push_back({s, scales[k], sum, out[k]});
    }
    return out;
  };
  DimensionEstimate est = bisect_dimension(grid, e.dim(), mode, exponents_at);
  est.trace = std::move(trace);
  return est;
}

double banaji_bound(double box_dim, int d, double theta) {
  const double denom = d - (1.0 - theta) * box_dim;
  return denom > 0.0 ? theta * d * box_dim / denom : 0.0;
}

}  // namespace dimlab
