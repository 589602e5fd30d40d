#include "dimlab/stochastic.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "dimlab/errors.hpp"
#include "dimlab/rng.hpp"

namespace dimlab {
namespace {

constexpr double kBaseJitter = 1e-12;
constexpr int kJitterSteps = 4;

PointCloud with_clipped_resolution(Eigen::MatrixXd points, double resolution,
                                   std::string label) {
  if (points.cols() > 1) {
    const Eigen::Index n = points.cols();
    double diam = 0.0;
    if (points.rows() == 1) {
      diam = points.maxCoeff() - points.minCoeff();
    } else {
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j)
          diam = std::max(diam, (points.col(i) - points.col(j)).norm());
    }
    if (diam > 0.0) resolution = std::min(resolution, diam);
  }
  return PointCloud(std::move(points), resolution, std::move(label));
}

}  // namespace

double SubspaceBasis::gram_deviation() const {
  const Eigen::MatrixXd gram = matrix.transpose() * matrix;
  return (gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols()))
      .cwiseAbs()
      .maxCoeff();
}

SubspaceBasis sample_grassmannian(int d, int m, std::uint64_t seed,
                                  std::uint64_t stream) {
  if (m < 1 || d < 1) throw DomainError("sample_grassmannian: need 1 <= m <= d");
  if (m > d) throw DomainError("sample_grassmannian: m exceeds d");
  RandomStream rng(seed, stream);
  Eigen::MatrixXd g(d, m);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < d; ++i) g(i, j) = rng.normal();
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(d, m);
  const Eigen::MatrixXd& r = qr.matrixQR();
  for (int j = 0; j < m; ++j)
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  return {std::move(q), seed, stream};
}

PointCloud project(const PointCloud& e, const SubspaceBasis& v) {
  if (e.dim() != v.ambient_dim())
    throw DomainError("project: cloud dimension does not match the basis");
  return with_clipped_resolution(v.matrix.transpose() * e.points(),
                                 e.resolution(), "P_V(" + e.label() + ")");
}

void write_basis_csv(const SubspaceBasis& v, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out.precision(17);
  for (int j = 0; j < v.subspace_dim(); ++j) out << (j ? "," : "") << 'v' << j + 1;
  out << '\n';
  for (int i = 0; i < v.ambient_dim(); ++i) {
    for (int j = 0; j < v.subspace_dim(); ++j)
      out << (j ? "," : "") << v.matrix(i, j);
    out << '\n';
  }
}

FbmFactor::FbmFactor(const PointCloud& e, double alpha)
    : source_(e), alpha_(alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw DomainError("fbm: alpha must lie in (0,1)");
  if (e.size() > kFbmPointCap) {
    std::ostringstream msg;
    msg << "fbm: " << e.size() << " points exceeds the cap of " << kFbmPointCap;
    throw SizeError(msg.str());
  }
  for (Eigen::Index i = 0; i < e.size(); ++i)
    if (e.point(i).squaredNorm() > 0.0) active_.push_back(i);
  const auto n = static_cast<Eigen::Index>(active_.size());
  if (n == 0) return;

  const double two_alpha = 2.0 * alpha;
  Eigen::VectorXd norm_pow(n);
  for (Eigen::Index i = 0; i < n; ++i)
    norm_pow(i) = std::pow(e.point(active_[i]).norm(), two_alpha);
  Eigen::MatrixXd cov(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    cov(j, j) = norm_pow(j);
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double inc =
          std::pow((e.point(active_[i]) - e.point(active_[j])).norm(), two_alpha);
      cov(i, j) = cov(j, i) = 0.5 * (norm_pow(i) + norm_pow(j) - inc);
    }
  }
  const double scale = norm_pow.mean();
  for (int k = 0; k < kJitterSteps; ++k) {
    const double jitter = kBaseJitter * std::pow(10.0, k) * scale;
    Eigen::MatrixXd shifted = cov;
    shifted.diagonal().array() += jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(std::move(shifted));
    if (llt.info() == Eigen::Success) {
      lower_ = llt.matrixL();
      jitter_ = jitter;
      return;
    }
  }
  throw NumericError("fbm: Cholesky failed after the largest jitter");
}

FbmSample FbmFactor::sample(int m, std::uint64_t seed, std::uint64_t stream) const {
  if (m < 1) throw DomainError("fbm: m must be positive");
  const auto n = static_cast<Eigen::Index>(active_.size());
  RandomStream rng(seed, stream);
  Eigen::MatrixXd z(n, m);
  for (int j = 0; j < m; ++j)
    for (Eigen::Index i = 0; i < n; ++i) z(i, j) = rng.normal();
  Eigen::MatrixXd image = Eigen::MatrixXd::Zero(m, source_.size());
  if (n > 0) {
    const Eigen::MatrixXd values = lower_.triangularView<Eigen::Lower>() * z;
    for (Eigen::Index i = 0; i < n; ++i) image.col(active_[i]) = values.row(i).transpose();
  }
  std::ostringstream label;
  label << "B_" << alpha_ << '(' << source_.label() << ')';
  return {alpha_,
          m,
          with_clipped_resolution(std::move(image),
                                  std::pow(source_.resolution(), alpha_), label.str()),
          seed,
          stream,
          jitter_,
          true};
}

FbmSample sample_fbm(const PointCloud& e, double alpha, int m,
                     std::uint64_t seed, std::uint64_t stream) {
  return FbmFactor(e, alpha).sample(m, seed, stream);
}

}  // namespace dimlab
