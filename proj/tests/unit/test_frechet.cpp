#include "doctest.h"
#include "ganchain/eval/frechet.hpp"
#include "ganchain/rng.hpp"

using namespace ganchain;

namespace {

Eigen::MatrixXd gaussian_features(int64_t n, int64_t dim, double mean, double std, uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd m(n, dim);
  for (int64_t i = 0; i < n; i++)
    for (int64_t j = 0; j < dim; j++) m(i, j) = mean + std * rng.normal();
  return m;
}

}  // namespace

TEST_CASE("frechet distance of a set with itself is zero") {
  auto a = gaussian_features(500, 8, 0.0, 1.0, 1);
  auto res = eval::frechet_from_features(a, a);
  CHECK(res.value == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(std::abs(res.value) < 1e-6);
}

TEST_CASE("frechet distance is symmetric") {
  auto a = gaussian_features(400, 6, 0.0, 1.0, 2);
  auto b = gaussian_features(400, 6, 0.5, 1.3, 3);
  const double ab = eval::frechet_from_features(a, b).value;
  const double ba = eval::frechet_from_features(b, a).value;
  CHECK(ab == doctest::Approx(ba).epsilon(1e-8));
  CHECK(ab > 0.0);
}

TEST_CASE("one-dimensional gaussian shift has closed-form distance 1") {
  auto a = gaussian_features(10000, 1, 0.0, 1.0, 4);
  auto b = gaussian_features(10000, 1, 1.0, 1.0, 5);
  const double d = eval::frechet_from_features(a, b).value;
  CHECK(std::abs(d - 1.0) < 0.05);
}

TEST_CASE("degenerate covariance triggers regularization and a flag") {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(64, 4);  // zero variance
  auto b = gaussian_features(64, 4, 0.0, 1.0, 6);
  auto res = eval::frechet_from_features(a, b);
  CHECK(res.regularized);
  CHECK(res.value >= 0.0);
}

TEST_CASE("insufficient samples for covariance estimation are rejected") {
  auto a = gaussian_features(4, 4, 0.0, 1.0, 7);
  auto b = gaussian_features(64, 4, 0.0, 1.0, 8);
  CHECK_THROWS_AS(eval::frechet_from_features(a, b), ArgumentError);
}
