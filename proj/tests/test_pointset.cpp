#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <vector>

#include "dimlab/errors.hpp"
#include "dimlab/pointset.hpp"

using namespace dimlab;

namespace {

std::vector<double> sorted_values(const PointCloud& e) {
  std::vector<double> v(e.points().data(), e.points().data() + e.size());
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

TEST_CASE("sequence sets") {
  auto v = sorted_values(gen_sequence_set(1.0, 3));
  REQUIRE(v.size() == 4);
  CHECK(v[0] == 0.0);
  CHECK(v[1] == doctest::Approx(1.0 / 3));
  CHECK(v[2] == doctest::Approx(0.5));
  CHECK(v[3] == doctest::Approx(1.0));

  v = sorted_values(gen_sequence_set(2.0, 2));
  REQUIRE(v.size() == 3);
  CHECK(v[1] == doctest::Approx(0.25));

  const auto f1 = gen_sequence_set(1.0, 10000);
  CHECK(f1.size() == 10001);
  CHECK(f1.dim() == 1);
  CHECK(f1.resolution() == doctest::Approx(1.0 / (9999.0 * 10000.0)).epsilon(1e-6));

  CHECK_THROWS_AS(gen_sequence_set(1.0, 100, 10), SizeError);
}

TEST_CASE("log set") {
  auto v = sorted_values(gen_log_set(3));
  REQUIRE(v.size() == 3);
  CHECK(v[0] == 0.0);
  CHECK(v[1] == doctest::Approx(1.0 / std::log(3.0)));
  CHECK(v[2] == doctest::Approx(1.0 / std::log(2.0)));

  v = sorted_values(gen_log_set(2));
  REQUIRE(v.size() == 2);
  CHECK(v[1] == doctest::Approx(1.4427).epsilon(1e-4));

  const auto big = gen_log_set(100000);
  CHECK(big.size() == 100000);
  CHECK(big.points().maxCoeff() == doctest::Approx(1.0 / std::log(2.0)));
}

TEST_CASE("ifs") {
  auto v = sorted_values(gen_ifs(IfsSpec::middle_third_cantor(2)));
  REQUIRE(v.size() == 4);
  CHECK(v[0] == doctest::Approx(0.0));
  CHECK(v[1] == doctest::Approx(2.0 / 9));
  CHECK(v[2] == doctest::Approx(2.0 / 3));
  CHECK(v[3] == doctest::Approx(8.0 / 9));

  IfsSpec half;
  half.maps.push_back({0.5, Eigen::VectorXd::Zero(1)});
  half.depth = 3;
  const auto fixed = gen_ifs(half);
  CHECK(fixed.size() == 1);
  CHECK(fixed.points()(0, 0) == 0.0);

  const auto cantor = gen_ifs(IfsSpec::middle_third_cantor(12));
  CHECK(cantor.size() == 4096);
  CHECK(cantor.points().minCoeff() >= 0.0);
  CHECK(cantor.points().maxCoeff() <= 1.0);
  CHECK(cantor.resolution() == doctest::Approx(std::pow(3.0, -12)));

  CHECK_THROWS_AS(gen_ifs(IfsSpec::middle_third_cantor(12), 100), SizeError);
}

TEST_CASE("products and diameter") {
  const std::vector<double> ends{0.0, 1.0};
  const auto unit = PointCloud::from_values(ends, 1.0);
  const auto square = product(unit, unit);
  CHECK(square.dim() == 2);
  CHECK(square.size() == 4);
  CHECK(diameter(square) == doctest::Approx(std::sqrt(2.0)));
  CHECK(diameter(unit) == doctest::Approx(1.0));

  const std::vector<double> zero{0.25};
  const auto point = PointCloud::from_values(zero, 1.0);
  CHECK(diameter(point) == 0.0);
  CHECK(min_separation(point) == 0.0);

  const auto b = gen_sequence_set(1.0, 5);
  const auto lifted = product(point, b);
  CHECK(lifted.size() == b.size());
  CHECK((lifted.points().row(0).array() == 0.25).all());
  CHECK(lifted.points().row(1) == b.points().row(0));
  CHECK(lifted.resolution() == std::min(point.resolution(), b.resolution()));

  const auto c6 = gen_ifs(IfsSpec::middle_third_cantor(6));
  const auto cc = product(c6, c6);
  CHECK(cc.size() == 4096);
  CHECK(cc.dim() == 2);

  const auto e = embed(b, 3);
  CHECK(e.dim() == 3);
  CHECK(e.points().bottomRows(2).isZero());
}

TEST_CASE("csv roundtrip") {
  const auto dir = std::filesystem::temp_directory_path() / "dimlab_test_csv";
  std::filesystem::create_directories(dir);
  const auto path = dir / "cloud.csv";
  const auto c = product(gen_ifs(IfsSpec::middle_third_cantor(3)),
                         gen_sequence_set(2.0, 4));
  write_csv(c, path);
  const auto back = read_csv(path);
  CHECK(back.dim() == c.dim());
  CHECK(back.size() == c.size());
  CHECK((back.points() - c.points()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(back.resolution() == c.resolution());
  CHECK(std::filesystem::exists(metadata_path(path)));
  CHECK_THROWS_AS(read_csv(dir / "missing.csv"), ConfigError);
  std::filesystem::remove_all(dir);
}
