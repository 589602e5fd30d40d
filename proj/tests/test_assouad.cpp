#include "doctest.h"

#include <cmath>
#include <vector>

#include "dimlab/assouad.hpp"
#include "dimlab/covering.hpp"
#include "dimlab/errors.hpp"
#include "dimlab/pointset.hpp"

using namespace dimlab;

namespace {

const double kCantorDim = std::log(2.0) / std::log(3.0);

void check_chain(const PointCloud& e, const ScaleGrid& grid) {
  const double box = estimate_box_dim(e, grid).value;
  const auto alphas = default_quasi_assouad_alphas();
  const double qa = estimate_quasi_assouad(e, alphas).value;
  const double a = estimate_assouad(e).value;
  double prev = 0.0;
  for (double alpha : alphas) {
    const double spec = estimate_assouad_spectrum(e, alpha).value;
    CHECK(box <= spec + 0.05);
    CHECK(spec <= qa + 0.05);
    CHECK(spec >= prev - 0.02);
    prev = spec;
  }
  CHECK(qa <= a + 0.05);
}

}  // namespace

TEST_CASE("local counts") {
  const auto g = gen_grid(1025);
  const std::vector<ScalePair> pairs{{0.25, 1.0 / 64}, {0.125, 1.0 / 512}};
  const auto counts = max_local_counts(g, pairs);
  REQUIRE(counts.size() == 2);
  for (const auto& c : counts) {
    const double ratio = c.big / c.small;
    CHECK(c.count >= 1);
    CHECK(static_cast<double>(c.count) >= ratio);
    CHECK(static_cast<double>(c.count) <= 2.0 * ratio + 2.0);
  }
}

TEST_CASE("known Assouad values") {
  const auto interval = gen_grid(4097);
  CHECK(estimate_assouad(interval).value == doctest::Approx(1.0).epsilon(0.05));
  CHECK(estimate_assouad_spectrum(interval, 0.5).value ==
        doctest::Approx(1.0).epsilon(0.05));
  CHECK(estimate_quasi_assouad(interval, default_quasi_assouad_alphas()).value ==
        doctest::Approx(1.0).epsilon(0.05));

  const auto cantor = gen_ifs(IfsSpec::middle_third_cantor(12));
  CHECK(std::abs(estimate_assouad(cantor).value - kCantorDim) <= 0.07);
  CHECK(std::abs(estimate_quasi_assouad(cantor, default_quasi_assouad_alphas()).value -
                 kCantorDim) <= 0.08);

  const std::vector<double> one{0.5};
  const auto single = PointCloud::from_values(one, 1e-6);
  CHECK(estimate_assouad(single).value == 0.0);
  CHECK(estimate_assouad_spectrum(single, 0.5).value == 0.0);
}

TEST_CASE("ordering chain and monotone spectrum") {
  const auto cantor = gen_ifs(IfsSpec::middle_third_cantor(12));
  check_chain(cantor, ScaleGrid::for_cloud(cantor));
  const auto f1 = gen_sequence_set(1.0, 10000);
  const auto grid = ScaleGrid::dyadic(6, 16);
  check_chain(f1, grid);

  const double box = estimate_box_dim(f1, grid).value;
  const double spec = estimate_assouad_spectrum(f1, 0.5).value;
  const double a = estimate_assouad(f1).value;
  CHECK(spec >= box - 0.05);
  CHECK(spec <= a + 0.05);
}

TEST_CASE("argument errors") {
  const auto g = gen_grid(257);
  CHECK_THROWS_AS(estimate_quasi_assouad(g, {0.5, 0.6}), DiagnosticsError);
  CHECK_THROWS_AS(estimate_quasi_assouad(g, {0.5, 0.7, 0.6}), DomainError);
  CHECK_THROWS_AS(estimate_assouad(g, {{0.5, 1e-6}, {0.25, 1e-6}}), ScaleError);
  const auto pairs = spectrum_pairs({{0.25, 0.07}, {0.25, 0.01}}, 0.5);
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0].small == 0.01);
}
