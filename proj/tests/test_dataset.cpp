#include "mullkit/dataset.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace mullkit;

namespace {

Dataset from_matrix(const MatrixXd& w) {
  Dataset d;
  d.features = w;
  d.response = VectorXd::Zero(w.rows());
  d.task = Task::Quantile;
  return d;
}

}  // namespace

TEST_CASE("constant column standardizes to ones") {
  MatrixXd w(3, 1);
  w << 2, 2, 2;
  Dataset s = standardize(from_matrix(w));
  CHECK(s.standardized);
  for (Index i = 0; i < 3; ++i) CHECK(s.features(i, 0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(s.scale[0] == doctest::Approx(2.0));
}

TEST_CASE("standardize is idempotent") {
  Dataset d = oracle::random_dataset(7, 4, Task::Quantile, 11);
  Dataset once = standardize(d);
  Dataset twice = standardize(once);
  CHECK((once.features - twice.features).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("standardized columns have unit mean square") {
  Dataset d = oracle::random_dataset(5, 3, Task::Quantile, 3);
  d.features.col(1) *= 40.0;
  Dataset s = standardize(d);
  for (Index j = 0; j < 3; ++j) {
    double ms = 0.0;
    for (Index i = 0; i < 5; ++i) ms += s.features(i, j) * s.features(i, j);
    CHECK(std::abs(ms / 5.0 - 1.0) <= 1e-10);
  }
}

TEST_CASE("zero-variance column is reported by index and name") {
  MatrixXd w(3, 3);
  w << 1, 0, 2, 3, 0, 1, 2, 0, 5;
  Dataset d = from_matrix(w);
  d.names = {"a", "b", "c"};
  try {
    standardize(d);
    FAIL("expected an error");
  } catch (const ZeroVarianceColumn& e) {
    CHECK(e.column() == 1);
    CHECK(std::string(e.what()).find("(b)") != std::string::npos);
  }
}

TEST_CASE("unstandardize recovers the raw-scale predictor") {
  Dataset d = oracle::random_dataset(6, 3, Task::Quantile, 5);
  d.features.col(2) *= 7.0;
  Dataset s = standardize(d);
  Coefficients c(VectorXd::Constant(3, 0.3), 1.0);
  Coefficients raw = unstandardize(c, s);
  VectorXd a = linear_predictor(s.features, c), b = linear_predictor(d.features, raw);
  CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(raw.intercept == c.intercept);
}

TEST_CASE("l1 norm") {
  CHECK(l1_norm(VectorXd::Zero(3)) == 0.0);
  VectorXd v(3);
  v << 1, -2, 3;
  CHECK(l1_norm(v) == 6.0);

  std::mt19937_64 gen(9);
  std::normal_distribution<double> z;
  VectorXd r(100);
  for (auto& x : r) x = z(gen);
  double backward = 0.0;
  for (Index j = r.size() - 1; j >= 0; --j) backward += std::abs(r[j]);
  CHECK(l1_norm(r) == doctest::Approx(backward).epsilon(1e-14));

  for (double c : {-3.5, 0.0, 0.25, 17.0})
    CHECK(std::abs(l1_norm(c * r) - std::abs(c) * l1_norm(r)) <= 1e-12 * (1.0 + std::abs(c) * l1_norm(r)));
}

TEST_CASE("l1 norm excludes the intercept") {
  Coefficients c(VectorXd::Constant(2, -1.0), 10.0);
  CHECK(l1_norm(c) == 2.0);
}

TEST_CASE("nonzero count is exact") {
  Coefficients c(VectorXd::Zero(4), std::nullopt);
  c.beta << 0.0, 1e-300, -0.0, 2.0;
  CHECK(c.nonzeros() == 2);
}

TEST_CASE("validation rejects malformed datasets") {
  Dataset d = oracle::random_dataset(4, 2, Task::Binary, 1);
  d.features(1, 1) = std::nan("");
  CHECK_THROWS_AS(d.validate(), Error);
  Dataset e = oracle::random_dataset(4, 2, Task::Binary, 1);
  e.response.resize(3);
  CHECK_THROWS_AS(e.validate(), Error);
  Dataset f;
  CHECK_THROWS_AS(f.validate(), Error);
}

TEST_CASE("linear predictor checks dimensions") {
  MatrixXd w = MatrixXd::Ones(2, 3);
  CHECK_THROWS_AS(linear_predictor(w, Coefficients(2)), Error);
}

TEST_CASE("row and column subsets") {
  Dataset d = oracle::random_dataset(5, 4, Task::Binary, 2);
  d.names = {"a", "b", "c", "d"};
  Dataset r = subset_rows(d, {4, 0});
  CHECK(r.n() == 2);
  CHECK(r.features.row(0) == d.features.row(4));
  CHECK(r.response[1] == d.response[0]);
  Dataset c = subset_columns(d, {3, 1});
  CHECK(c.p() == 2);
  CHECK(c.features.col(0) == d.features.col(3));
  CHECK(c.names == std::vector<std::string>{"d", "b"});
}
