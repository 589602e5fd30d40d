#include "doctest.h"

#include <cmath>
#include <vector>

#include "dimlab/capacity.hpp"
#include "dimlab/covering.hpp"
#include "dimlab/errors.hpp"
#include "dimlab/pointset.hpp"
#include "oracles.hpp"

using namespace dimlab;

namespace {

PointCloud single_point() {
  const std::vector<double> v{0.3};
  return PointCloud::from_values(v, 1e-9);
}

}  // namespace

TEST_CASE("box counts") {
  CHECK(box_count(single_point(), 0.1) == 1);
  CHECK(box_count(gen_grid(1025), std::ldexp(1.0, -4)) == 16);
  const std::vector<double> ends{0.0, 1.0};
  const auto unit = PointCloud::from_values(ends, 0.01);
  CHECK(box_count(product(unit, unit), 0.1) == 4);
  CHECK_THROWS_AS(box_count(gen_grid(1025), 1e-5), ScaleError);
}

TEST_CASE("cover sums of a single point") {
  const auto p = single_point();
  CHECK(cover_sum(p, 1.0, 0.01, 0.5) == doctest::Approx(0.01).epsilon(1e-12));
  CHECK(cover_sum(p, 0.0, 0.01, 0.5) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(cover_sum(p, 0.0, 0.2, 0.9) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("cover_sum matches exhaustive dyadic enumeration") {
  RandomStream rng(11, 0);
  for (int trial = 0; trial < 40; ++trial) {
    const int d = 1 + trial % 2;
    const int n = 2 + static_cast<int>(rng() % 19);
    const double r = 0.05;
    const double side = r / std::sqrt(static_cast<double>(d));
    const PointCloud e(oracle::random_points(rng, d, n, 4.0 * side), 1e-9);
    const double theta = 0.2 + 0.8 * rng.uniform();
    const double s = d * rng.uniform();
    CHECK(cover_sum(e, s, r, theta) ==
          doctest::Approx(oracle::brute_cover_sum(e.points(), s, r, theta))
              .epsilon(1e-12));
  }
}

TEST_CASE("exponent envelope in s") {
  const auto cantor = gen_ifs(IfsSpec::middle_third_cantor(10));
  RandomStream rng(5, 0);
  for (int k : {5, 7, 9}) {
    const double r = std::ldexp(1.0, -k);
    for (double theta : {0.3, 0.6, 1.0}) {
      const DyadicCover cover(cantor, r, theta);
      for (int trial = 0; trial < 10; ++trial) {
        double t = rng.uniform(), s = rng.uniform();
        if (t > s) std::swap(t, s);
        const double es = std::log(cover.cover_sum(s)) / -std::log(r);
        const double et = std::log(cover.cover_sum(t)) / -std::log(r);
        CHECK(es - et >= -(s - t) - 1e-9);
        CHECK(es - et <= -theta * (s - t) + 1e-9);
        CHECK(cover.cover_sum(s) <= cover.cover_sum(t) * (1 + 1e-12));
      }
    }
  }
}

TEST_CASE("cover sums dominate the truncated-energy bound") {
  RandomStream rng(9, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const PointCloud e(oracle::random_points(rng, 1 + trial % 2, 30), 1e-9);
    const double r = 0.02, theta = 0.5, s = 0.7;
    const Eigen::MatrixXd k = trunc_kernel_matrix(e, s, r, theta);
    const double bound =
        std::pow(r, s) / energy(k, SimplexMeasure::uniform(e.size()));
    CHECK(cover_sum(e, s, r, theta) >= bound * (1 - 1e-12));
  }
}

TEST_CASE("dimension estimates") {
  const auto interval = gen_grid(65537);
  const auto grid = ScaleGrid::for_cloud(interval);
  CHECK(estimate_intermediate_dim(interval, 0.5, grid).value ==
        doctest::Approx(1.0).epsilon(0.05));
  CHECK(estimate_box_dim(interval, grid).value == doctest::Approx(1.0).epsilon(0.05));

  const auto cantor = gen_ifs(IfsSpec::middle_third_cantor(12));
  const auto cgrid = ScaleGrid::for_cloud(cantor);
  const double box = estimate_box_dim(cantor, cgrid).value;
  CHECK(std::abs(box - std::log(2.0) / std::log(3.0)) <= 0.05);
  CHECK(std::abs(estimate_intermediate_dim(cantor, 1.0, cgrid).value - box) <=
        2 * kBisectionTolerance);

  const auto square = gen_grid(257, 2);
  CHECK(estimate_box_dim(square, ScaleGrid::dyadic(2, 6)).value ==
        doctest::Approx(2.0).epsilon(0.05));

  const auto p = single_point();
  CHECK(estimate_intermediate_dim(p, 0.5, ScaleGrid::dyadic(3, 8)).value == 0.0);
  CHECK(estimate_box_dim(p, ScaleGrid::dyadic(3, 8)).value == 0.0);

  CHECK_THROWS_AS(estimate_box_dim(cantor, ScaleGrid::dyadic(4, 6)),
                  DiagnosticsError);
}

TEST_CASE("banaji bound algebra") {
  CHECK(banaji_bound(1.0, 1, 0.3) == doctest::Approx(1.0));
  CHECK(banaji_bound(0.5, 1, 0.5) == doctest::Approx(1.0 / 3));
  CHECK(banaji_bound(0.7, 2, 1.0) == doctest::Approx(0.7));
  CHECK(banaji_bound(0.0, 2, 0.4) == 0.0);
}
