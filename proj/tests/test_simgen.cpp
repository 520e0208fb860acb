#include "mullkit/simgen.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <cmath>

using namespace mullkit;

namespace {

SchemeSpec spec(Scheme s, Index n, Index p, double sigma_u, std::uint64_t seed) {
  SchemeSpec out;
  out.scheme = s;
  out.n = n;
  out.p = p;
  out.sigma_u = sigma_u;
  out.seed = seed;
  return out;
}

double quantile_of(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const double frac = pos - static_cast<double>(lo);
  return lo + 1 < v.size() ? v[lo] * (1 - frac) + v[lo + 1] * frac : v[lo];
}

}  // namespace

TEST_CASE("cholesky factor") {
  CHECK(cholesky(MatrixXd::Identity(4, 4)) == MatrixXd::Identity(4, 4));
  MatrixXd d(2, 2);
  d << 4, 0, 0, 9;
  MatrixXd l = cholesky(d);
  CHECK(l(0, 0) == 2.0);
  CHECK(l(1, 1) == 3.0);
  CHECK(l(0, 1) == 0.0);
  MatrixXd ar = ar_covariance(5, 0.4);
  MatrixXd la = cholesky(ar);
  CHECK((la * la.transpose() - ar).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(la.triangularView<Eigen::StrictlyUpper>().toDenseMatrix().cwiseAbs().maxCoeff() == 0.0);
  MatrixXd bad(2, 2);
  bad << 1, 2, 2, 1;
  CHECK_THROWS_AS(cholesky(bad), Error);
  MatrixXd asym(2, 2);
  asym << 1, 0.5, 0, 1;
  CHECK_THROWS_AS(cholesky(asym), Error);
}

TEST_CASE("t2 distribution") {
  boost::math::students_t_distribution<double> t2(2.0);
  for (double x : {-5.0, -1.0, 0.0, 0.3, 2.0, 10.0}) CHECK(t2_cdf(x) == doctest::Approx(cdf(t2, x)).epsilon(1e-12));
  for (double p : {0.01, 0.1, 0.5, 0.9}) {
    CHECK(t2_quantile(p) == doctest::Approx(quantile(t2, p)).epsilon(1e-10));
    CHECK(t2_cdf(t2_quantile(p)) == doctest::Approx(p).epsilon(1e-12));
  }
  CHECK(noise_quantile(NoiseDist::Normal, 2.0, 0.5) == doctest::Approx(0.0));
  CHECK(noise_quantile(NoiseDist::Normal, 2.0, 0.1) == doctest::Approx(-2.5631031310892007).epsilon(1e-10));
}

TEST_CASE("true coefficients") {
  VectorXd b1 = true_beta(Scheme::S1, 8);
  CHECK(b1.head(5) == (VectorXd(5) << 1.39, 1.47, 1.56, 1.65, 1.74).finished());
  CHECK(b1.tail(3).isZero());
  CHECK(true_beta(Scheme::S2, 6).head(5) == VectorXd::Constant(5, 1.1));
  CHECK(true_beta(Scheme::QuantileHet, 6).head(5) == VectorXd::Constant(5, 1.5));
}

TEST_CASE("spec validation") {
  CHECK_THROWS_AS(gen_scheme(spec(Scheme::S3, 1, 10, 0.3, 1)), Error);
  CHECK_THROWS_AS(gen_scheme(spec(Scheme::S3, 10, 4, 0.3, 1)), Error);
  CHECK_THROWS_AS(gen_scheme(spec(Scheme::S3, 10, 10, -0.1, 1)), Error);
  CHECK_THROWS_AS(parse_scheme("s4"), Error);
  CHECK(parse_scheme("qhet") == Scheme::QuantileHet);
  CHECK(parse_noise("t2") == NoiseDist::StudentT2);
}

TEST_CASE("generation is reproducible") {
  SimReplicate a = gen_scheme(spec(Scheme::S2, 30, 12, 0.5, 77));
  SimReplicate b = gen_scheme(spec(Scheme::S2, 30, 12, 0.5, 77));
  SimReplicate c = gen_scheme(spec(Scheme::S2, 30, 12, 0.5, 78));
  CHECK(a.w == b.w);
  CHECK(a.y == b.y);
  CHECK(a.w != c.w);
  CHECK(a.task == Task::Binary);
  CHECK(a.intercept == 0.0);
}

TEST_CASE("scheme 1 Bayes error and balance") {
  SimReplicate r = gen_scheme(spec(Scheme::S1, 100000, 5, 0.0, 5));
  Index wrong = 0, pos = 0;
  for (Index i = 0; i < r.x.rows(); ++i) {
    const double t = r.x.row(i).dot(r.beta.beta);
    if ((t > 0.0) != (r.y[i] == 1.0)) ++wrong;
    pos += r.y[i] == 1.0;
  }
  CHECK(std::abs(static_cast<double>(wrong) / 1e5 - 0.063) <= 0.005);
  CHECK(std::abs(static_cast<double>(pos) / 1e5 - 0.5) <= 0.01);
}

TEST_CASE("scheme 2 covariance") {
  SimReplicate r = gen_scheme(spec(Scheme::S2, 100000, 10, 0.0, 9));
  MatrixXd cov = r.x.transpose() * r.x / 1e5;
  CHECK((cov - ar_covariance(10, 0.4)).cwiseAbs().maxCoeff() <= 0.02);
}

TEST_CASE("scheme 3 logistic link at zero") {
  SimReplicate r = gen_scheme(spec(Scheme::S3, 400000, 5, 0.0, 4));
  double ones = 0.0, count = 0.0;
  for (Index i = 0; i < r.x.rows(); ++i) {
    if (std::abs(r.x.row(i).dot(r.beta.beta)) < 0.1) {
      ones += r.y[i];
      count += 1.0;
    }
  }
  REQUIRE(count > 5000);
  CHECK(std::abs(ones / count - 0.5) <= 0.01);
}

TEST_CASE("heterogeneous quantile scheme has the stated conditional quantile") {
  for (double tau : {0.5, 0.1}) {
    SchemeSpec s = spec(Scheme::QuantileHet, 1000000, 5, 0.0, 6);
    s.tau = tau;
    SimReplicate r = gen_scheme(s);
    CHECK(r.task == Task::Quantile);
    CHECK(r.intercept == 1.5);
    std::vector<double> slice;
    for (Index i = 0; i < r.x.rows(); ++i)
      if (std::abs(r.x(i, 0)) < 0.05) slice.push_back(r.y[i] - 1.5 - r.x.row(i).dot(r.beta.beta));
    REQUIRE(slice.size() > 20000);
    CHECK(std::abs(quantile_of(slice, tau)) <= 0.03);
  }
}

TEST_CASE("heavy-tailed response noise") {
  SchemeSpec s = spec(Scheme::QuantileHet, 400000, 5, 0.0, 3);
  s.noise = NoiseDist::StudentT2;
  s.tau = 0.9;
  SimReplicate r = gen_scheme(s);
  std::vector<double> slice;
  for (Index i = 0; i < r.x.rows(); ++i)
    if (std::abs(r.x(i, 0)) < 0.05) slice.push_back(r.y[i] - 1.5 - r.x.row(i).dot(r.beta.beta));
  CHECK(std::abs(quantile_of(slice, 0.9)) <= 0.05);
}

TEST_CASE("measurement noise") {
  MatrixXd x = MatrixXd::Random(200, 500);
  CHECK(add_noise(x, 0.0, 1) == x);
  MatrixXd w = add_noise(x, 0.5, 2);
  CHECK(w == add_noise(x, 0.5, 2));
  MatrixXd u = w - x;
  const double mean = u.mean();
  const double var = (u.array() - mean).square().sum() / static_cast<double>(u.size() - 1);
  CHECK(std::abs(var - 0.25) <= 0.01);
  CHECK_THROWS_AS(add_noise(x, -1.0, 2), Error);
  (void)mean;
}

TEST_CASE("replicate noise variance per column") {
  const double su = 0.3;
  SimReplicate r = gen_scheme(spec(Scheme::S3, 400, 20, su, 10));
  MatrixXd u = r.w - r.x;
  const double n = static_cast<double>(u.rows());
  // Standard error of a sample variance of normals: sigma^2 sqrt(2 / (n - 1)).
  const double se = su * su * std::sqrt(2.0 / (n - 1.0));
  int outside = 0;
  for (Index j = 0; j < u.cols(); ++j) {
    const double m = u.col(j).mean();
    const double v = (u.col(j).array() - m).square().sum() / (n - 1.0);
    if (std::abs(v - su * su) > 3.0 * se) ++outside;
  }
  CHECK(outside <= 1);
}

TEST_CASE("child streams") {
  Rng a(5), b(5);
  CHECK(a.child(3).seed() == b.child(3).seed());
  CHECK(a.child(3).seed() != a.child(4).seed());
  std::vector<int> v(20);
  std::iota(v.begin(), v.end(), 0);
  std::vector<int> w = v;
  Rng r1(9), r2(9);
  r1.shuffle(v);
  r2.shuffle(w);
  CHECK(v == w);
  CHECK(std::is_permutation(v.begin(), v.end(), w.begin()));
  for (int k = 0; k < 1000; ++k) CHECK(r1.below(7) < 7);
}
