#include "dimlab/pointset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "dimlab/errors.hpp"
#include "json.hpp"

namespace dimlab {
namespace {

// Exact O(N^2) diameter is used up to this size; above it the bounding-box
// diagonal stands in when validating the resolution invariant.
constexpr Eigen::Index kExactDiameterLimit = 1 << 13;

void check_cap(long double count, std::size_t cap, const char* what) {
  if (count > static_cast<long double>(cap)) {
    std::ostringstream msg;
    msg << what << ": " << count << " points exceeds the cap of " << cap;
    throw SizeError(msg.str());
  }
}

std::string format_double(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

}  // namespace

PointCloud::PointCloud(Matrix points, double resolution, std::string label)
    : points_(std::move(points)),
      resolution_(resolution),
      label_(std::move(label)) {
  if (points_.cols() == 0 || points_.rows() == 0)
    throw DomainError("PointCloud: empty cloud");
  if (!points_.allFinite())
    throw DomainError("PointCloud: non-finite coordinate");
  if (!(resolution_ > 0.0) || !std::isfinite(resolution_))
    throw DomainError("PointCloud: resolution must be positive");
  if (points_.cols() > 1) {
    const double bound =
        points_.cols() <= kExactDiameterLimit
            ? diameter(*this)
            : (upper_corner() - lower_corner()).norm();
    if (bound > 0.0 && resolution_ > bound * (1.0 + 1e-12))
      throw DomainError("PointCloud: resolution exceeds the diameter");
  }
}

PointCloud PointCloud::from_values(std::span<const double> values,
                                   double resolution, std::string label) {
  Matrix m(1, static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i)
    m(0, static_cast<Eigen::Index>(i)) = values[i];
  return PointCloud(std::move(m), resolution, std::move(label));
}

PointCloud PointCloud::subset(std::span<const Eigen::Index> indices) const {
  Matrix m(points_.rows(), static_cast<Eigen::Index>(indices.size()));
  for (std::size_t i = 0; i < indices.size(); ++i)
    m.col(static_cast<Eigen::Index>(i)) = points_.col(indices[i]);
  return PointCloud(std::move(m), resolution_, label_);
}

PointCloud PointCloud::relabeled(std::string label) const {
  PointCloud copy = *this;
  copy.label_ = std::move(label);
  return copy;
}

IfsSpec IfsSpec::middle_third_cantor(int depth) {
  IfsSpec spec;
  spec.maps.push_back({1.0 / 3.0, Eigen::VectorXd::Zero(1)});
  spec.maps.push_back({1.0 / 3.0, Eigen::VectorXd::Constant(1, 2.0 / 3.0)});
  spec.depth = depth;
  return spec;
}

PointCloud gen_sequence_set(double p, long long n_max, std::size_t cap) {
  if (!(p > 0.0)) throw DomainError("gen_sequence_set: p must be positive");
  if (n_max < 1) throw DomainError("gen_sequence_set: n_max must be >= 1");
  check_cap(static_cast<long double>(n_max) + 1, cap, "gen_sequence_set");

  // Largest element first; each 1/n^p is evaluated directly, smallest
  // values come from the largest n.
  std::vector<double> values(static_cast<std::size_t>(n_max) + 1);
  for (long long n = n_max; n >= 1; --n)
    values[static_cast<std::size_t>(n - 1)] =
        std::pow(static_cast<double>(n), -p);
  values.back() = 0.0;

  double gap = 1.0;
  if (n_max >= 2) {
    const auto n = static_cast<double>(n_max);
    gap = std::pow(n, -p) * std::expm1(p * std::log1p(1.0 / (n - 1.0)));
  }
  std::ostringstream label;
  label << "F_p(p=" << p << ",n=" << n_max << ")";
  return PointCloud::from_values(values, gap, label.str());
}

PointCloud gen_log_set(long long n_max, std::size_t cap) {
  if (n_max < 2) throw DomainError("gen_log_set: n_max must be >= 2");
  check_cap(static_cast<long double>(n_max), cap, "gen_log_set");

  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(n_max));
  values.push_back(0.0);
  for (long long n = 2; n <= n_max; ++n)
    values.push_back(1.0 / std::log(static_cast<double>(n)));

  double gap = values.back();
  if (n_max >= 3) {
    const auto n = static_cast<double>(n_max);
    gap = 1.0 / std::log(n - 1.0) - 1.0 / std::log(n);
  }
  return PointCloud::from_values(values, gap,
                                 "logset(n=" + std::to_string(n_max) + ")");
}

PointCloud gen_ifs(const IfsSpec& spec, std::size_t cap) {
  if (spec.maps.empty()) throw DomainError("gen_ifs: no maps");
  if (spec.depth < 1) throw DomainError("gen_ifs: depth must be >= 1");
  const Eigen::Index dim = spec.maps.front().translation.size();
  if (dim == 0) throw DomainError("gen_ifs: zero-dimensional translation");
  double min_ratio = 1.0;
  for (const auto& map : spec.maps) {
    if (!(map.ratio > 0.0 && map.ratio < 1.0))
      throw DomainError("gen_ifs: ratios must lie in (0,1)");
    if (map.translation.size() != dim)
      throw DomainError("gen_ifs: translations of differing dimension");
    min_ratio = std::min(min_ratio, map.ratio);
  }
  check_cap(std::pow(static_cast<long double>(spec.maps.size()), spec.depth),
            cap, "gen_ifs");

  // Fixed points t / (1 - ratio) span the attractor's hull.
  Eigen::MatrixXd fixed(dim, static_cast<Eigen::Index>(spec.maps.size()));
  for (std::size_t i = 0; i < spec.maps.size(); ++i)
    fixed.col(static_cast<Eigen::Index>(i)) =
        spec.maps[i].translation / (1.0 - spec.maps[i].ratio);
  double initial_diameter = 0.0;
  for (Eigen::Index i = 0; i < fixed.cols(); ++i)
    for (Eigen::Index j = i + 1; j < fixed.cols(); ++j)
      initial_diameter =
          std::max(initial_diameter, (fixed.col(i) - fixed.col(j)).norm());
  if (initial_diameter == 0.0) initial_diameter = 1.0;

  Eigen::MatrixXd current = Eigen::MatrixXd::Zero(dim, 1);
  for (int level = 0; level < spec.depth; ++level) {
    Eigen::MatrixXd next(dim, current.cols() *
                                  static_cast<Eigen::Index>(spec.maps.size()));
    Eigen::Index out = 0;
    for (const auto& map : spec.maps) {
      for (Eigen::Index j = 0; j < current.cols(); ++j)
        next.col(out++) = map.ratio * current.col(j) + map.translation;
    }
    current = std::move(next);
  }
  const double resolution =
      std::pow(min_ratio, spec.depth) * initial_diameter;
  return PointCloud(std::move(current), resolution,
                    "ifs(depth=" + std::to_string(spec.depth) + ")");
}

PointCloud product(const PointCloud& a, const PointCloud& b, std::size_t cap) {
  check_cap(static_cast<long double>(a.size()) * b.size(), cap, "product");
  Eigen::MatrixXd m(a.dim() + b.dim(), a.size() * b.size());
  Eigen::Index out = 0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    for (Eigen::Index j = 0; j < b.size(); ++j, ++out) {
      m.col(out).head(a.dim()) = a.point(i);
      m.col(out).tail(b.dim()) = b.point(j);
    }
  }
  return PointCloud(std::move(m), std::min(a.resolution(), b.resolution()),
                    a.label() + "x" + b.label());
}

PointCloud gen_grid(int points_per_axis, int dim, std::size_t cap) {
  if (points_per_axis < 1 || dim < 1)
    throw DomainError("gen_grid: need at least one point and one axis");
  check_cap(std::pow(static_cast<long double>(points_per_axis), dim), cap,
            "gen_grid");
  const double step =
      points_per_axis > 1 ? 1.0 / (points_per_axis - 1) : 1.0;
  std::vector<double> axis(static_cast<std::size_t>(points_per_axis));
  for (int i = 0; i < points_per_axis; ++i) axis[i] = i * step;
  PointCloud grid = PointCloud::from_values(axis, step, "grid");
  for (int k = 1; k < dim; ++k)
    grid = product(grid, PointCloud::from_values(axis, step, "grid"), cap);
  return grid.relabeled("grid(n=" + std::to_string(points_per_axis) +
                        ",d=" + std::to_string(dim) + ")");
}

PointCloud embed(const PointCloud& e, int target_dim) {
  if (target_dim < e.dim()) throw DomainError("embed: target dim too small");
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(target_dim, e.size());
  m.topRows(e.dim()) = e.points();
  return PointCloud(std::move(m), e.resolution(), e.label());
}

double diameter(const PointCloud& e) {
  const auto& pts = e.points();
  if (e.dim() == 1) return pts.maxCoeff() - pts.minCoeff();
  double best = 0.0;
  for (Eigen::Index i = 0; i < e.size(); ++i)
    for (Eigen::Index j = i + 1; j < e.size(); ++j)
      best = std::max(best, (pts.col(i) - pts.col(j)).squaredNorm());
  return std::sqrt(best);
}

double min_separation(const PointCloud& e) {
  const auto& pts = e.points();
  double best = std::numeric_limits<double>::infinity();
  if (e.dim() == 1) {
    std::vector<double> v(pts.data(), pts.data() + pts.size());
    std::sort(v.begin(), v.end());
    for (std::size_t i = 1; i < v.size(); ++i)
      if (v[i] > v[i - 1]) best = std::min(best, v[i] - v[i - 1]);
  } else {
    for (Eigen::Index i = 0; i < e.size(); ++i)
      for (Eigen::Index j = i + 1; j < e.size(); ++j) {
        const double d2 = (pts.col(i) - pts.col(j)).squaredNorm();
        if (d2 > 0.0) best = std::min(best, d2);
      }
    best = std::sqrt(best);
  }
  return std::isfinite(best) ? best : 0.0;
}

std::filesystem::path metadata_path(const std::filesystem::path& csv_path) {
  auto meta = csv_path;
  meta.replace_extension(".meta.json");
  return meta;
}

void write_csv(const PointCloud& e, const std::filesystem::path& csv_path) {
  std::ofstream out(csv_path);
  if (!out) throw ConfigError("cannot write " + csv_path.string());
  for (int k = 0; k < e.dim(); ++k) out << (k ? "," : "") << "x" << k + 1;
  out << '\n';
  for (Eigen::Index i = 0; i < e.size(); ++i) {
    for (int k = 0; k < e.dim(); ++k)
      out << (k ? "," : "") << format_double(e.points()(k, i));
    out << '\n';
  }
  nlohmann::ordered_json meta{{"dim", e.dim()},
                              {"resolution", e.resolution()},
                              {"label", e.label()},
                              {"points", e.size()}};
  std::ofstream(metadata_path(csv_path)) << meta.dump(2) << '\n';
}

PointCloud read_csv(const std::filesystem::path& csv_path) {
  std::ifstream in(csv_path);
  if (!in) throw ConfigError("cannot read " + csv_path.string());
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("empty CSV " + csv_path.string());
  const auto dim = 1 + std::count(line.begin(), line.end(), ',');
  std::vector<double> values;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::stringstream fields(line);
    std::string field;
    long count = 0;
    while (std::getline(fields, field, ',')) {
      try {
        values.push_back(std::stod(field));
      } catch (const std::exception&) {
        throw ConfigError(csv_path.string() + ":" + std::to_string(row) +
                          ": bad number '" + field + "'");
      }
      ++count;
    }
    if (count != dim)
      throw ConfigError(csv_path.string() + ":" + std::to_string(row) +
                        ": expected " + std::to_string(dim) + " columns");
  }
  if (values.empty()) throw ConfigError("no points in " + csv_path.string());
  Eigen::MatrixXd m = Eigen::Map<Eigen::MatrixXd>(
      values.data(), dim, static_cast<Eigen::Index>(values.size()) / dim);

  double resolution = 0.0;
  std::string label = csv_path.stem().string();
  const auto meta_file = metadata_path(csv_path);
  if (std::filesystem::exists(meta_file)) {
    try {
      const auto meta = nlohmann::json::parse(std::ifstream(meta_file));
      resolution = meta.at("resolution").get<double>();
      label = meta.value("label", label);
      if (meta.at("dim").get<long>() != dim)
        throw ConfigError("metadata dim disagrees with " + csv_path.string());
    } catch (const nlohmann::json::exception& ex) {
      throw ConfigError("bad metadata " + meta_file.string() + ": " + ex.what());
    }
  }
  if (resolution <= 0.0) {
    // Without metadata the finest faithful scale is the closest pair.
    PointCloud probe(m, std::numeric_limits<double>::min(), label);
    resolution = min_separation(probe);
    if (resolution == 0.0) resolution = 0x1.0p-20;
  }
  return PointCloud(std::move(m), resolution, label);
}

}  // namespace dimlab
