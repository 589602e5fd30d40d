#include "doctest.h"

#include <cmath>
#include <vector>

#include "dimlab/errors.hpp"
#include "dimlab/pointset.hpp"
#include "dimlab/rng.hpp"
#include "dimlab/stochastic.hpp"
#include "oracles.hpp"

using namespace dimlab;

TEST_CASE("grassmannian samples") {
  for (int d = 1; d <= 5; ++d)
    for (int m = 1; m <= d; ++m)
      for (std::uint64_t s = 0; s < 5; ++s) {
        const auto v = sample_grassmannian(d, m, 123, s);
        CHECK(v.ambient_dim() == d);
        CHECK(v.subspace_dim() == m);
        CHECK(v.gram_deviation() <= 1e-10);
      }
  const auto a = sample_grassmannian(2, 1, 9, 4);
  const auto b = sample_grassmannian(2, 1, 9, 4);
  CHECK(a.matrix == b.matrix);
  CHECK(a.matrix != sample_grassmannian(2, 1, 9, 5).matrix);
  CHECK_THROWS_AS(sample_grassmannian(2, 3, 1), DomainError);
  CHECK_THROWS_AS(sample_grassmannian(2, 0, 1), DomainError);
}

TEST_CASE("projections") {
  SubspaceBasis axis{Eigen::MatrixXd::Identity(2, 1)};
  Eigen::MatrixXd pts(2, 2);
  pts << 3, 0, 4, 1;
  const PointCloud e(pts, 0.5);
  const auto image = project(e, axis);
  CHECK(image.dim() == 1);
  CHECK(image.points()(0, 0) == 3.0);
  const auto again = project(e, axis);
  CHECK(again.points() == image.points());

  RandomStream rng(4, 0);
  const PointCloud cloud(oracle::random_points(rng, 3, 200), 1e-6);
  const auto full = sample_grassmannian(3, 3, 2);
  const auto rotated = project(cloud, full);
  CHECK(diameter(rotated) == doctest::Approx(diameter(cloud)).epsilon(1e-12));
  for (int m : {1, 2}) {
    const auto v = sample_grassmannian(3, m, 77, static_cast<std::uint64_t>(m));
    const auto p = project(cloud, v);
    CHECK(p.size() == cloud.size());
    CHECK(diameter(p) <= diameter(cloud) + 1e-12);
    for (int k = 0; k < 50; ++k) {
      const auto i = static_cast<Eigen::Index>(rng() % 200);
      const auto j = static_cast<Eigen::Index>(rng() % 200);
      CHECK((p.point(i) - p.point(j)).norm() <=
            (cloud.point(i) - cloud.point(j)).norm() + 1e-12);
    }
  }
}

TEST_CASE("fbm samples") {
  const auto g = gen_grid(65);
  const FbmFactor factor(g, 0.5);
  const auto a = factor.sample(2, 5, 1);
  const auto b = factor.sample(2, 5, 1);
  CHECK(a.image.points() == b.image.points());
  CHECK(a.image.size() == g.size());
  CHECK(a.image.dim() == 2);
  CHECK(a.image.point(0).isZero());

  // Var B(1) = 1 for the unit-distance point.
  double sum2 = 0.0;
  const int n = 4000;
  for (int s = 0; s < n; ++s) {
    const auto img = factor.sample(1, 99, static_cast<std::uint64_t>(s)).image;
    sum2 += img.points()(0, 64) * img.points()(0, 64);
  }
  CHECK(sum2 / n == doctest::Approx(1.0).epsilon(0.08));

  CHECK_THROWS_AS(FbmFactor(gen_grid(static_cast<int>(kFbmPointCap) + 1), 0.5),
                  SizeError);
  CHECK_THROWS_AS(FbmFactor(g, 1.5), DomainError);
}
