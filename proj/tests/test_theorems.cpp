#include "doctest.h"

#include <cmath>
#include <vector>

#include "dimlab/covering.hpp"
#include "dimlab/errors.hpp"
#include "dimlab/pointset.hpp"
#include "dimlab/theorems.hpp"

using namespace dimlab;

namespace {

PointCloud single_point(int d = 1) {
  return PointCloud(Eigen::MatrixXd::Constant(d, 1, 0.5), 1e-9);
}

}  // namespace

TEST_CASE("median and quantile") {
  CHECK(median({3.0, 1.0, 2.0}) == 2.0);
  CHECK(median({4.0, 1.0, 2.0, 3.0}) == 2.5);
  CHECK(quantile({0.0, 1.0, 2.0, 3.0, 4.0}, 0.9) == doctest::Approx(3.6));
  CHECK(quantile({5.0}, 0.3) == 5.0);
  CHECK_THROWS_AS(quantile({}, 0.5), DomainError);
}

TEST_CASE("digests") {
  const auto a = gen_ifs(IfsSpec::middle_third_cantor(5));
  CHECK(cloud_digest(a) == cloud_digest(gen_ifs(IfsSpec::middle_third_cantor(5))));
  CHECK(cloud_digest(a) != cloud_digest(gen_ifs(IfsSpec::middle_third_cantor(6))));
}

TEST_CASE("single point verdicts") {
  const auto p = single_point();
  const auto grid = ScaleGrid::dyadic(3, 8);
  const auto t1 = check_spectrum_bound(p, 0.5, 0.5, 0.8, grid);
  CHECK(t1.pass);
  CHECK(t1.lhs == 0.0);
  const auto t2 = check_profile_ratio(p, 1.0, 0.5, 0.5, grid);
  CHECK(t2.pass);
  CHECK(t2.lhs == 0.0);
  CHECK(t2.rhs == 0.0);
  const auto b = check_banaji(p, 0.5, grid);
  CHECK(b.pass);
  CHECK(b.lhs == 0.0);
  CHECK(b.rhs == 0.0);

  const auto p2 = single_point(2);
  const auto proj = check_projection_profile(p2, 1, 0.5, 5, grid, 1);
  CHECK(proj.pass);
  for (const auto& s : proj.samples) CHECK(s.value == 0.0);
  const auto mq = check_marstrand_quasi(p2, 1, {1.0, 0.6}, 5, grid, 1);
  CHECK(mq.pass);
  CHECK(mq.lhs == 0.0);
}

TEST_CASE("profile_ratio identity at t = s") {
  const auto f1 = gen_sequence_set(1.0, 2000);
  const auto grid = ScaleGrid::dyadic(5, 12);
  const auto v = check_profile_ratio(f1, 0.6, 0.6, 0.5, grid, 0.0);
  CHECK(v.pass);
  CHECK(v.lhs == v.rhs);
  CHECK(v.relation == Relation::inequality);
  CHECK_THROWS_AS(check_profile_ratio(f1, 0.5, 0.6, 0.5, grid), DomainError);
}

TEST_CASE("banaji and verdict invariants") {
  const auto interval = gen_grid(4097);
  const auto grid = ScaleGrid::dyadic(4, 10);
  const auto v = check_banaji(interval, 0.5, grid);
  CHECK(v.rhs == doctest::Approx(banaji_bound(estimate_box_dim(interval, grid).value, 1, 0.5)));
  CHECK(v.pass == (v.lhs >= v.rhs - v.slack));
  const auto strict = check_banaji(interval, 0.5, grid, -1.0);
  CHECK_FALSE(strict.pass);
  CHECK(strict.inputs_digest == v.inputs_digest);
  CHECK(check_banaji(interval, 0.6, grid).inputs_digest != v.inputs_digest);
}

TEST_CASE("box_collapse gate") {
  const auto f1 = gen_sequence_set(1.0, 10000);
  const auto v = check_box_collapse(f1, {1.0, 0.5}, ScaleGrid::dyadic(6, 16));
  CHECK_FALSE(v.applicable);
  CHECK(v.pass);
}

TEST_CASE("projection checks") {
  const auto interval = embed(gen_grid(2049), 2);
  const auto grid = ScaleGrid::dyadic(3, 9);
  const auto v = check_marstrand_quasi(interval, 1, {1.0, 0.6}, 8, grid, 3);
  CHECK(v.pass);
  for (const auto& s : v.samples) CHECK(s.value == doctest::Approx(1.0).epsilon(0.08));
  CHECK_THROWS_AS(check_marstrand_quasi(interval, 1, {0.6, 1.0}, 8, grid, 3), DomainError);
  CHECK_THROWS_AS(check_projection_profile(interval, 2, 1.0, 4, grid, 3), DomainError);

  // Projections cannot raise the estimate beyond noise.
  const auto proj = check_projection_profile(interval, 1, 1.0, 8, grid, 3);
  const double own = estimate_intermediate_dim(interval, 1.0, grid).value;
  for (const auto& s : proj.samples) CHECK(s.value <= own + 0.05);
  const auto again = check_projection_profile(interval, 1, 1.0, 8, grid, 3);
  REQUIRE(again.samples.size() == proj.samples.size());
  for (std::size_t i = 0; i < proj.samples.size(); ++i)
    CHECK(again.samples[i].value == proj.samples[i].value);
}
