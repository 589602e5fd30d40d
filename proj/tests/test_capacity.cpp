#include "doctest.h"

#include <cmath>
#include <vector>

#include "dimlab/capacity.hpp"
#include "dimlab/covering.hpp"
#include "dimlab/errors.hpp"
#include "dimlab/kernels.hpp"
#include "dimlab/pointset.hpp"
#include "oracles.hpp"

using namespace dimlab;

TEST_CASE("kernel worked values") {
  const KernelParams p{1.0, 2.0, 0.01, 0.5};
  CHECK(p.valid());
  CHECK(kernel_phi(p, 0.0) == 1.0);
  CHECK(kernel_phi(p, 0.05) == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(kernel_phi(p, 0.5) == doctest::Approx(0.004).epsilon(1e-12));
  CHECK(kernel_phi_trunc(1.0, 0.01, 0.5, 0.02) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(kernel_phi_trunc(1.0, 0.01, 0.5, 0.1) == 0.0);
  CHECK(kernel_phi_trunc(1.0, 0.01, 0.5, 0.0) == 1.0);
  CHECK_FALSE((KernelParams{2.0, 1.0, 0.1, 0.5}.valid()));
  CHECK_FALSE((KernelParams{0.5, 1.0, 1.0, 0.5}.valid()));
  CHECK_FALSE((KernelParams{0.5, 1.0, 0.1, 0.0}.valid()));
}

TEST_CASE("kernel ordering and log form") {
  RandomStream rng(3, 0);
  for (int trial = 0; trial < 500; ++trial) {
    const double t = 0.05 + 2.0 * rng.uniform();
    const KernelParams p{t * rng.uniform(), t, 0.001 + 0.5 * rng.uniform(),
                         0.05 + 0.95 * rng.uniform()};
    double prev = 1.0;
    for (int i = 0; i < 50; ++i) {
      const double x = std::pow(10.0, -4.0 + 4.0 * i / 49.0);
      const double phi = kernel_phi(p, x);
      CHECK(phi <= prev * (1 + 1e-12));
      CHECK(kernel_phi_trunc(p.s, p.r, p.theta, x) <= phi * (1 + 1e-12));
      CHECK(phi <= 1.0);
      CHECK(kernel_phi_from_log(p, std::log(p.r), std::log(x)) ==
            doctest::Approx(phi).epsilon(1e-10));
      prev = phi;
    }
  }
}

TEST_CASE("two points, single points, coincident points") {
  const std::vector<double> two{0.0, 0.05};
  const KernelParams p{1.0, 2.0, 0.01, 0.5};
  const auto sol = min_energy(PointCloud::from_values(two, 0.01), p, {});
  CHECK(sol.energy == doctest::Approx(0.6).epsilon(1e-9));
  CHECK(sol.measure.weights()(0) == doctest::Approx(0.5).epsilon(1e-6));

  const std::vector<double> one{0.4};
  const auto single = PointCloud::from_values(one, 0.01);
  CHECK(min_energy(single, p, {}).energy == doctest::Approx(1.0));
  CHECK(capacity(single, p) == doctest::Approx(1.0));

  const std::vector<double> same(6, 0.2);
  const auto coincident = PointCloud::from_values(same, 0.01);
  CHECK(min_energy(coincident, p, {}).energy == doctest::Approx(1.0));
  CHECK(capacity(coincident, p) == doctest::Approx(1.0));

  const std::vector<double> far{0.0, 1.0};
  CHECK(capacity(PointCloud::from_values(far, 0.5), KernelParams{1.0, 4.0, 1e-3, 0.5}) ==
        doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("energy bounds and exhaustive oracle") {
  RandomStream rng(17, 0);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 11);
    const PointCloud e(oracle::random_points(rng, 1 + trial % 2, n), 1e-9);
    const double t = 0.2 + 1.8 * rng.uniform();
    const KernelParams p{t * rng.uniform(), t, 0.01 + 0.2 * rng.uniform(),
                         0.2 + 0.8 * rng.uniform()};
    const Eigen::MatrixXd k = kernel_matrix(e, p);
    EnergyOptions opts;
    opts.tol = 1e-12;
    const auto sol = min_energy(k, opts);
    CHECK(std::abs(sol.measure.weights().sum() - 1.0) <= 1e-12);
    CHECK(sol.gap >= 0.0);
    CHECK(sol.energy <= energy(k, SimplexMeasure::uniform(n)) + 1e-12);
    CHECK(sol.energy >= 1.0 / n - 1e-12);
    CHECK(sol.energy <= 1.0 + 1e-12);
    CHECK(sol.energy == doctest::Approx(oracle::active_set_energy(k)).epsilon(1e-8));
  }
}

TEST_CASE("capacity lies in [1, N]") {
  const auto cantor = gen_ifs(IfsSpec::middle_third_cantor(7));
  for (double r : {0.3, 0.05, 0.002}) {
    const double c = capacity(cantor, KernelParams{0.4, 0.6, r, 0.5});
    CHECK(c >= 1.0 - 1e-9);
    CHECK(c <= cantor.size() + 1e-9);
  }
}

TEST_CASE("profiles") {
  const std::vector<double> one{0.4};
  const auto single = PointCloud::from_values(one, 1e-9);
  CHECK(estimate_profile(single, 1.0, 0.5, ScaleGrid::dyadic(3, 8)).value == 0.0);

  const auto interval = gen_grid(4097);
  const auto grid = ScaleGrid::dyadic(4, 10);
  const double half = estimate_profile(interval, 0.5, 1.0, grid).value;
  CHECK(half == doctest::Approx(0.5).epsilon(0.05 / 0.5));
  const double full = estimate_profile(interval, 1.0, 1.0, grid).value;
  CHECK(full <= 1.0 + 0.05);
  CHECK(half <= full + 0.02);
  CHECK(std::abs(full - half) <= 0.5 + 0.02);
}

TEST_CASE("reduce_cloud merges shared cells") {
  const auto g = gen_grid(1001);
  const auto reduced = reduce_cloud(g, 0.01);
  CHECK(reduced.size() <= 102);
  CHECK(reduced.size() >= 90);
  CHECK(reduce_cloud(g, 0.01, 20).size() == 20);
}
