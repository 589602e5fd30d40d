#include "dimlab/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "dimlab/covering.hpp"
#include "dimlab/errors.hpp"
#include "dimlab/parallel.hpp"
#include "dimlab/rng.hpp"

namespace dimlab {
namespace {

void check_params(const KernelParams& p) {
  if (!p.valid()) {
    std::ostringstream msg;
    msg << "invalid kernel parameters (s=" << p.s << ", t=" << p.t
        << ", r=" << p.r << ", theta=" << p.theta << ")";
    throw DomainError(msg.str());
  }
}

// Materialized kernel matrix.
class DenseKernel {
 public:
  explicit DenseKernel(const Eigen::MatrixXd& k) : k_(k) {}
  Eigen::Index size() const { return k_.rows(); }
  double at(Eigen::Index i, Eigen::Index j) const { return k_(i, j); }
  auto column(Eigen::Index j) const { return k_.col(j); }
  Eigen::VectorXd multiply(const Eigen::VectorXd& w) const { return k_ * w; }
  double min_ritz(int steps) const { return smallest_ritz_value(k_, steps); }

 private:
  const Eigen::MatrixXd& k_;
};

// Kernel entries computed on demand from the points.
class ImplicitKernel {
 public:
  ImplicitKernel(const Eigen::MatrixXd& points, const KernelParams& p)
      : points_(points), params_(p) {}
  Eigen::Index size() const { return points_.cols(); }
  double at(Eigen::Index i, Eigen::Index j) const {
    return kernel_phi(params_, (points_.col(i) - points_.col(j)).norm());
  }
  Eigen::VectorXd column(Eigen::Index j) const {
    Eigen::VectorXd out(size());
    for (Eigen::Index i = 0; i < size(); ++i) out(i) = at(i, j);
    return out;
  }
  Eigen::VectorXd multiply(const Eigen::VectorXd& w) const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(size());
    for (Eigen::Index j = 0; j < size(); ++j)
      if (w(j) != 0.0) out.noalias() += w(j) * column(j);
    return out;
  }
  double min_ritz(int) const { return std::numeric_limits<double>::quiet_NaN(); }

 private:
  const Eigen::MatrixXd& points_;
  KernelParams params_;
};

// Replaces the weights on the support by the minimiser of the quadratic over
// the face of the simplex spanned by the support (Wolfe's minor cycle).
// Requires the restricted kernel to be positive definite; otherwise leaves w
// untouched.
template <class Kernel>
void fully_corrective(const Kernel& kernel, Eigen::VectorXd& w,
                      Eigen::Index support_cap) {
  std::vector<Eigen::Index> support;
  for (Eigen::Index i = 0; i < w.size(); ++i)
    if (w(i) > 0.0) support.push_back(i);
  if (support.size() < 2 ||
      static_cast<Eigen::Index>(support.size()) > support_cap)
    return;

  while (support.size() >= 2) {
    const auto m = static_cast<Eigen::Index>(support.size());
    Eigen::MatrixXd block(m, m);
    for (Eigen::Index a = 0; a < m; ++a)
      for (Eigen::Index b = 0; b <= a; ++b)
        block(a, b) = block(b, a) = kernel.at(support[a], support[b]);
    Eigen::LDLT<Eigen::MatrixXd> ldlt(block);
    if (ldlt.info() != Eigen::Success || ldlt.vectorD().minCoeff() <= 1e-14)
      return;
    const Eigen::VectorXd x = ldlt.solve(Eigen::VectorXd::Ones(m));
    const double total = x.sum();
    if (!(total > 0.0) || !x.allFinite()) return;
    const Eigen::VectorXd target = x / total;

    Eigen::VectorXd current(m);
    for (Eigen::Index a = 0; a < m; ++a) current(a) = w(support[a]);
    if (target.minCoeff() > 0.0) {
      for (Eigen::Index a = 0; a < m; ++a) w(support[a]) = target(a);
      return;
    }
    // Move toward the face minimiser until the first weight hits zero.
    double step = 1.0;
    Eigen::Index blocking = -1;
    for (Eigen::Index a = 0; a < m; ++a) {
      if (target(a) <= 0.0) {
        const double limit = current(a) / (current(a) - target(a));
        if (limit < step) {
          step = limit;
          blocking = a;
        }
      }
    }
    current += step * (target - current);
    if (blocking >= 0) current(blocking) = 0.0;
    std::vector<Eigen::Index> kept;
    for (Eigen::Index a = 0; a < m; ++a) {
      if (current(a) > 0.0) {
        w(support[a]) = current(a);
        kept.push_back(support[a]);
      } else {
        w(support[a]) = 0.0;
      }
    }
    if (kept.size() == support.size()) return;
    support = std::move(kept);
  }
}

template <class Kernel>
EnergySolution solve_from(const Kernel& kernel, Eigen::VectorXd w,
                          const EnergyOptions& options) {
  const Eigen::Index n = kernel.size();
  constexpr Eigen::Index kSupportCap = 1200;
  Eigen::VectorXd g = kernel.multiply(w);
  double f = w.dot(g);
  double gap = 0.0;
  int iterations = 0;
  int next_corrective = 16;
  int since_refresh = 0;

  while (true) {
    Eigen::Index toward = 0;
    const double g_min = g.minCoeff(&toward);
    f = w.dot(g);
    gap = std::max(0.0, 2.0 * (f - g_min));
    const double tol = options.relative_tol ? options.tol * f : options.tol;
    if (gap <= tol || iterations >= options.max_iter) break;

    Eigen::Index away = -1;
    double g_max = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < n; ++i) {
      if (w(i) > 0.0 && g(i) > g_max) {
        g_max = g(i);
        away = i;
      }
    }
    if (away < 0 || away == toward) break;

    // Pairwise step: move mass from the away vertex to the Frank-Wolfe vertex.
    const Eigen::VectorXd col_to = kernel.column(toward);
    const Eigen::VectorXd col_away = kernel.column(away);
    const double slope = g(toward) - g(away);
    const double curvature =
        col_to(toward) + col_away(away) - 2.0 * col_to(away);
    double step = w(away);
    if (curvature > 0.0) step = std::min(step, -slope / curvature);
    if (step == w(away)) {
      w(toward) += w(away);
      w(away) = 0.0;
    } else {
      w(toward) += step;
      w(away) -= step;
    }
    g.noalias() += step * (col_to - col_away);
    ++iterations;

    if (++since_refresh >= 2000) {
      g = kernel.multiply(w);
      since_refresh = 0;
    }
    if (iterations == next_corrective) {
      const Eigen::VectorXd before = w;
      const double f_before = w.dot(g);
      fully_corrective(kernel, w, kSupportCap);
      Eigen::VectorXd g_new = kernel.multiply(w);
      if (w.dot(g_new) <= f_before) {
        g = std::move(g_new);
      } else {
        w = before;
      }
      since_refresh = 0;
      next_corrective = iterations + std::max(16, iterations / 4);
    }
  }
  w = w.cwiseMax(0.0);
  w /= w.sum();
  g = kernel.multiply(w);
  f = w.dot(g);
  gap = std::max(0.0, 2.0 * (f - g.minCoeff()));

  EnergySolution sol{SimplexMeasure(std::move(w)), f, gap, iterations};
  return sol;
}

template <class Kernel>
EnergySolution solve(const Kernel& kernel, const EnergyOptions& options) {
  const Eigen::Index n = kernel.size();
  Eigen::VectorXd start = Eigen::VectorXd::Constant(n, 1.0 / n);
  if (options.warm_start && options.warm_start->size() == n &&
      options.warm_start->sum() > 0.0)
    start = *options.warm_start / options.warm_start->sum();

  EnergySolution best = solve_from(kernel, start, options);
  best.min_ritz = kernel.min_ritz(options.lanczos_steps);
  if (best.min_ritz < -1e-8 * static_cast<double>(n) && options.restarts > 0) {
    // Indefinite kernel: the quadratic may have several local minima.
    RandomStream stream(options.seed, 0x5e1ec7);
    for (int k = 0; k < options.restarts; ++k) {
      Eigen::VectorXd vertex = Eigen::VectorXd::Zero(n);
      vertex(static_cast<Eigen::Index>(stream() % static_cast<std::uint32_t>(n))) = 1.0;
      EnergySolution candidate = solve_from(kernel, vertex, options);
      if (candidate.energy < best.energy) {
        candidate.min_ritz = best.min_ritz;
        candidate.iterations += best.iterations;
        best = std::move(candidate);
      }
    }
    best.restarted = true;
  }
  return best;
}

Eigen::MatrixXd log_distances(const Eigen::MatrixXd& points) {
  const Eigen::Index n = points.cols();
  Eigen::MatrixXd out(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    out(j, j) = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = j + 1; i < n; ++i)
      out(i, j) = out(j, i) = std::log((points.col(i) - points.col(j)).norm());
  }
  return out;
}

}  // namespace

SimplexMeasure::SimplexMeasure(Eigen::VectorXd weights)
    : weights_(std::move(weights)) {
  if (weights_.size() == 0) throw DomainError("SimplexMeasure: empty");
  if ((weights_.array() < 0.0).any() || !weights_.allFinite())
    throw DomainError("SimplexMeasure: negative or non-finite weight");
  if (std::abs(weights_.sum() - 1.0) > 1e-12)
    throw DomainError("SimplexMeasure: weights must sum to 1");
}

SimplexMeasure SimplexMeasure::uniform(Eigen::Index n) {
  Eigen::VectorXd w = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  w /= w.sum();
  return SimplexMeasure(std::move(w));
}

Eigen::MatrixXd kernel_matrix(const PointCloud& e, const KernelParams& params) {
  check_params(params);
  const Eigen::Index n = e.size();
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    k(j, j) = 1.0;
    for (Eigen::Index i = j + 1; i < n; ++i)
      k(i, j) = k(j, i) =
          kernel_phi(params, (e.point(i) - e.point(j)).norm());
  }
  return k;
}

Eigen::MatrixXd trunc_kernel_matrix(const PointCloud& e, double s, double r,
                                    double theta) {
  const Eigen::Index n = e.size();
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    k(j, j) = 1.0;
    for (Eigen::Index i = j + 1; i < n; ++i)
      k(i, j) = k(j, i) =
          kernel_phi_trunc(s, r, theta, (e.point(i) - e.point(j)).norm());
  }
  return k;
}

double energy(const Eigen::MatrixXd& kernel, const SimplexMeasure& w) {
  return w.weights().dot(kernel * w.weights());
}

double smallest_ritz_value(const Eigen::MatrixXd& matrix, int steps) {
  const Eigen::Index n = matrix.rows();
  if (n <= steps) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
        matrix, Eigen::EigenvaluesOnly);
    return solver.eigenvalues()(0);
  }
  RandomStream stream(0x1a2c05, 0);
  Eigen::MatrixXd basis(n, steps);
  Eigen::VectorXd alpha(steps), beta(steps);
  Eigen::VectorXd q(n);
  for (Eigen::Index i = 0; i < n; ++i) q(i) = stream.normal();
  q.normalize();
  int m = 0;
  for (; m < steps; ++m) {
    basis.col(m) = q;
    Eigen::VectorXd v = matrix * q;
    alpha(m) = q.dot(v);
    // Full reorthogonalization; the basis is short.
    v -= basis.leftCols(m + 1) * (basis.leftCols(m + 1).transpose() * v);
    v -= basis.leftCols(m + 1) * (basis.leftCols(m + 1).transpose() * v);
    beta(m) = v.norm();
    if (beta(m) < 1e-12) {
      ++m;
      break;
    }
    q = v / beta(m);
  }
  Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    tri(i, i) = alpha(i);
    if (i + 1 < m) tri(i, i + 1) = tri(i + 1, i) = beta(i);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(tri,
                                                        Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

EnergySolution min_energy(const Eigen::MatrixXd& kernel,
                          const EnergyOptions& options) {
  if (kernel.rows() == 0 || kernel.rows() != kernel.cols())
    throw DomainError("min_energy: kernel matrix must be square and non-empty");
  if (!(options.tol > 0.0)) throw DomainError("min_energy: tol must be positive");
  return solve(DenseKernel(kernel), options);
}

EnergySolution min_energy(const PointCloud& e, const KernelParams& params,
                          const EnergyOptions& options) {
  check_params(params);
  if (!(options.tol > 0.0)) throw DomainError("min_energy: tol must be positive");
  if (e.size() <= kDenseKernelLimit) {
    Eigen::MatrixXd k;
    try {
      k = kernel_matrix(e, params);
    } catch (const std::bad_alloc&) {
      throw SizeError("min_energy: cannot allocate the kernel matrix");
    }
    return solve(DenseKernel(k), options);
  }
  return solve(ImplicitKernel(e.points(), params), options);
}

EnergySolution min_energy(const PointCloud& e, const KernelParams& params,
                          double tol, int max_iter) {
  EnergyOptions options;
  options.tol = tol;
  options.max_iter = max_iter;
  return min_energy(e, params, options);
}

double capacity(const PointCloud& e, const KernelParams& params) {
  return 1.0 / min_energy(e, params, EnergyOptions{}).energy;
}

PointCloud reduce_cloud(const PointCloud& e, double cell_diameter,
                        Eigen::Index cap) {
  const double side = cell_diameter / std::sqrt(static_cast<double>(e.dim()));
  const Eigen::VectorXd lo = e.lower_corner();
  const CellCoords coords =
      mesh_cells(e.points(), lo, e.upper_corner() - lo, side);
  std::vector<std::uint32_t> assignment;
  const std::size_t cells = group_columns(coords, assignment);

  // First point (in cloud order) of every occupied cell.
  std::vector<Eigen::Index> representative(cells, -1);
  for (Eigen::Index i = 0; i < e.size(); ++i) {
    auto& slot = representative[assignment[static_cast<std::size_t>(i)]];
    if (slot < 0) slot = i;
  }
  std::sort(representative.begin(), representative.end());

  if (static_cast<Eigen::Index>(representative.size()) > cap) {
    // Farthest-point selection seeded at the first representative.
    const auto n = representative.size();
    std::vector<double> dist(n, std::numeric_limits<double>::infinity());
    std::vector<Eigen::Index> chosen;
    chosen.reserve(static_cast<std::size_t>(cap));
    std::size_t current = 0;
    for (Eigen::Index c = 0; c < cap; ++c) {
      chosen.push_back(representative[current]);
      const auto p = e.point(representative[current]);
      std::size_t next = 0;
      double far = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        dist[i] = std::min(dist[i], (e.point(representative[i]) - p).norm());
        if (dist[i] > far) {
          far = dist[i];
          next = i;
        }
      }
      current = next;
    }
    std::sort(chosen.begin(), chosen.end());
    representative = std::move(chosen);
  }

  Eigen::MatrixXd pts(e.dim(), static_cast<Eigen::Index>(representative.size()));
  for (std::size_t i = 0; i < representative.size(); ++i)
    pts.col(static_cast<Eigen::Index>(i)) = e.point(representative[i]);
  double resolution = e.resolution();
  if (pts.cols() > 1) {
    const double diam = diameter(PointCloud(pts, std::numeric_limits<double>::min()));
    if (diam > 0.0) resolution = std::min(resolution, diam);
  }
  return PointCloud(std::move(pts), resolution, e.label());
}

namespace {

// One scale of a profile estimate: the reduced cloud and what is reused
// across bisection steps.
struct ProfileScale {
  double r = 0.0;
  PointCloud cloud;
  Eigen::MatrixXd log_dist;  // empty when the kernel is evaluated on demand
  Eigen::VectorXd last_weights;
  std::optional<EnergySolution> fixed;  // reused when the kernel ignores s
  bool flagged_indefinite = false;
  bool restarted = false;
};

}  // namespace

DimensionEstimate estimate_profile(const PointCloud& e, double t, double theta,
                                   const ScaleGrid& grid, Aggregate mode,
                                   const ProfileOptions& options) {
  if (!(t > 0.0 && t <= e.dim()))
    throw DomainError("estimate_profile: t must lie in (0, d]");
  if (!(theta > 0.0 && theta <= 1.0))
    throw DomainError("estimate_profile: theta must lie in (0,1]");
  grid.validate(e);
  const auto& scales = grid.r_values;

  std::vector<std::optional<ProfileScale>> levels(scales.size());
  parallel_for(scales.size(), [&](std::size_t k) {
    const double r = scales[k];
    PointCloud reduced = reduce_cloud(e, options.merge_fraction * r);
    Eigen::MatrixXd log_dist;
    if (reduced.size() <= kDenseKernelLimit) log_dist = log_distances(reduced.points());
    levels[k].emplace(ProfileScale{r, std::move(reduced), std::move(log_dist), {}, {}, false, false});
  });

  std::vector<std::string> notes;
  std::vector<TraceRow> trace;
  bool trusted = true;
  for (const auto& level : levels)
    if (level->cloud.size() >= kProfilePointCap)
      notes.push_back("scale " + std::to_string(level->r) +
                      " subsampled to " + std::to_string(kProfilePointCap) +
                      " points");

  auto exponents_at = [&](double s) {
    std::vector<double> out(scales.size());
    std::vector<EnergySolution> solutions(scales.size(),
                                          EnergySolution{SimplexMeasure::uniform(1)});
    parallel_for(scales.size(), [&](std::size_t k) {
      ProfileScale& level = *levels[k];
      if (level.fixed) {
        solutions[k] = *level.fixed;
        return;
      }
      const KernelParams params{s, t, level.r, theta};
      EnergyOptions opts;
      opts.tol = options.relative_tol;
      opts.relative_tol = true;
      opts.max_iter = options.max_iter;
      opts.seed = options.seed + k;
      if (level.last_weights.size() > 0) opts.warm_start = level.last_weights;
      // Vertex restarts run once per scale; later solves start from the best.
      if (level.restarted) opts.restarts = 0;
      if (level.log_dist.size() > 0) {
        const double log_r = std::log(level.r);
        const Eigen::MatrixXd kernel = level.log_dist.unaryExpr(
            [&](double ld) { return kernel_phi_from_log(params, log_r, ld); });
        solutions[k] = min_energy(kernel, opts);
      } else {
        solutions[k] = min_energy(level.cloud, params, opts);
      }
      level.last_weights = solutions[k].measure.weights();
      if (solutions[k].restarted) level.restarted = true;
      // At theta = 1 the middle branch is empty and the kernel ignores s.
      if (theta == 1.0) level.fixed = solutions[k];
    });
    for (std::size_t k = 0; k < scales.size(); ++k) {
      const auto& sol = solutions[k];
      const double cap = 1.0 / sol.energy;
      out[k] = std::log(cap) / -std::log(scales[k]) - s;
      trace.push_back({s, scales[k], cap, out[k], sol.gap});
      if (sol.gap > 2.0 * options.relative_tol * sol.energy) {
        notes.push_back("solver gap above tolerance at s=" + std::to_string(s) +
                        ", r=" + std::to_string(scales[k]));
      }
      if ((sol.restarted || levels[k]->restarted) && !levels[k]->flagged_indefinite) {
        trusted = false;
        levels[k]->flagged_indefinite = true;
        notes.push_back("indefinite kernel (min Ritz " +
                        std::to_string(sol.min_ritz) + ") at s=" +
                        std::to_string(s) + ", r=" + std::to_string(scales[k]));
      }
    }
    return out;
  };

  DimensionEstimate est = bisect_dimension(grid, t, mode, exponents_at);
  est.trace = std::move(trace);
  est.notes = std::move(notes);
  est.trusted = trusted;
  return est;
}

}  // namespace dimlab
