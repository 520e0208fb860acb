#include "mullkit/losses.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>

using namespace mullkit;

namespace {

std::vector<LossSpec> all_losses() {
  return {LossSpec::logistic(), LossSpec::smooth_hinge(4.0), LossSpec::smooth_hinge(0.5),
          LossSpec::conquer(0.3, 0.5), LossSpec::conquer(0.9, 0.25), LossSpec::conquer(0.5, 0.5, Kernel::Uniform)};
}

double draw_label(const LossSpec& s, std::mt19937_64& gen) {
  std::uniform_int_distribution<int> coin(0, 1);
  std::normal_distribution<double> z(0.0, 2.0);
  switch (s.kind()) {
    case LossKind::Logistic: return coin(gen);
    case LossKind::SmoothHinge: return coin(gen) ? 1.0 : -1.0;
    case LossKind::Conquer: return z(gen);
  }
  return 0.0;
}

}  // namespace

TEST_CASE("loss values at reference points") {
  CHECK(loss_value(LossSpec::logistic(), 0.0, 0.0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(loss_value(LossSpec::smooth_hinge(4.0), 1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
  // Quadrature of the Gaussian-kernel convolution at u = 0, tau = 0.5, h = 0.5.
  CHECK(loss_value(LossSpec::conquer(0.5, 0.5), 0.0, 0.0) == doctest::Approx(0.19947114020071635).epsilon(1e-12));
}

TEST_CASE("first derivatives at reference points") {
  CHECK(loss_d1(LossSpec::logistic(), 0.0, 1.0) == doctest::Approx(-0.5));
  CHECK(loss_d1(LossSpec::smooth_hinge(4.0), 1.0, 1.0) == doctest::Approx(-0.5));
  LossSpec cq = LossSpec::conquer(0.3, 0.5);
  // u = y - t = 0.7
  auto f = [&](double t) { return loss_value(cq, t, 0.7); };
  double fd = oracle::central_difference(f, 0.0, 1e-5);
  CHECK(std::abs(loss_d1(cq, 0.0, 0.7) - fd) <= 1e-6 * std::abs(fd));
}

TEST_CASE("second derivatives at reference points") {
  CHECK(loss_d2(LossSpec::logistic(), 0.0, 0.0) == doctest::Approx(0.25));
  CHECK(loss_d2(LossSpec::logistic(), 0.0, 1.0) == doctest::Approx(0.25));
  CHECK(loss_d2(LossSpec::smooth_hinge(4.0), 1.0, 1.0) == doctest::Approx(0.25));
  CHECK(loss_d2(LossSpec::conquer(0.5, 0.5), 0.0, 0.0) == doctest::Approx(0.7978845608028654).epsilon(1e-12));
}

TEST_CASE("bound constants") {
  CHECK(lipschitz_const(LossSpec::logistic()) == 1.0);
  CHECK(lipschitz_const(LossSpec::smooth_hinge(0.3)) == 1.0);
  CHECK(lipschitz_const(LossSpec::conquer(0.9, 0.5)) == doctest::Approx(0.9));
  CHECK(lipschitz_const(LossSpec::conquer(0.2, 0.5)) == doctest::Approx(0.8));
  CHECK(d2_max(LossSpec::logistic()) == 0.25);
  CHECK(d2_max(LossSpec::smooth_hinge(4.0)) == 0.25);

  // Maximise d2 over a fine grid of u for the Gaussian kernel, h = 0.5.
  LossSpec cq = LossSpec::conquer(0.4, 0.5);
  double best = 0.0;
  for (int k = -5000; k <= 5000; ++k) best = std::max(best, loss_d2(cq, 0.0, k * 1e-3));
  CHECK(d2_max(cq) == doctest::Approx(best).epsilon(1e-9));
  CHECK(d2_max(cq) == doctest::Approx(0.7978845608028654).epsilon(1e-12));
}

TEST_CASE("label encodings are enforced") {
  CHECK_THROWS_AS(loss_value(LossSpec::logistic(), 0.0, -1.0), Error);
  CHECK_THROWS_AS(loss_d1(LossSpec::logistic(), 0.0, 0.5), Error);
  CHECK_THROWS_AS(loss_value(LossSpec::smooth_hinge(), 0.0, 0.0), Error);
  CHECK_THROWS_AS(loss_d2(LossSpec::smooth_hinge(), 0.0, 2.0), Error);
  CHECK_NOTHROW(loss_value(LossSpec::conquer(0.5, 1.0), 0.0, -3.7));
}

TEST_CASE("invalid loss parameters") {
  CHECK_THROWS_AS(LossSpec::smooth_hinge(0.0), Error);
  CHECK_THROWS_AS(LossSpec::conquer(0.0, 1.0), Error);
  CHECK_THROWS_AS(LossSpec::conquer(1.0, 1.0), Error);
  CHECK_THROWS_AS(LossSpec::conquer(0.5, -1.0), Error);
}

TEST_CASE("logistic loss is finite for large predictors") {
  LossSpec lg = LossSpec::logistic();
  for (double t : {-700.0, -50.0, 50.0, 700.0, 1e6, -1e6}) {
    for (double y : {0.0, 1.0}) {
      double v = loss_value(lg, t, y);
      CHECK(std::isfinite(v));
      CHECK(v >= 0.0);
    }
  }
  CHECK(loss_value(lg, 700.0, 1.0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(loss_value(lg, 700.0, 0.0) == doctest::Approx(700.0));
}

TEST_CASE("convexity, Lipschitz and gradient inequalities on random pairs") {
  std::mt19937_64 gen(42);
  std::normal_distribution<double> z(0.0, 3.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const LossSpec& s : all_losses()) {
    const double lip = lipschitz_const(s), cap = d2_max(s);
    for (int k = 0; k < 300; ++k) {
      const double y = draw_label(s, gen), t1 = z(gen), t2 = z(gen), a = u(gen);
      const double f1 = loss_value(s, t1, y), f2 = loss_value(s, t2, y);
      CHECK(f1 >= 0.0);
      CHECK(loss_value(s, a * t1 + (1 - a) * t2, y) <= a * f1 + (1 - a) * f2 + 1e-10);
      CHECK(std::abs(f1 - f2) <= lip * std::abs(t1 - t2) + 1e-10);
      CHECK(f2 - f1 >= loss_d1(s, t1, y) * (t2 - t1) - 1e-10);
      CHECK(std::abs(loss_d1(s, t1, y)) <= lip + 1e-12);
      const double d2 = loss_d2(s, t1, y);
      CHECK(d2 >= 0.0);
      CHECK(d2 <= cap + 1e-12);
    }
  }
}

TEST_CASE("derivatives match finite differences") {
  std::mt19937_64 gen(7);
  std::normal_distribution<double> z(0.0, 1.5);
  for (const LossSpec& s : {LossSpec::logistic(), LossSpec::smooth_hinge(4.0), LossSpec::conquer(0.3, 0.5)}) {
    for (int k = 0; k < 100; ++k) {
      const double y = draw_label(s, gen), t = z(gen);
      auto f = [&](double x) { return loss_value(s, x, y); };
      auto g = [&](double x) { return loss_d1(s, x, y); };
      const double d1 = loss_d1(s, t, y), d2 = loss_d2(s, t, y);
      CHECK(std::abs(d1 - oracle::central_difference(f, t, 1e-5)) <= 1e-6 * std::max(1.0, std::abs(d1)));
      CHECK(std::abs(d2 - oracle::central_difference(g, t, 1e-5)) <= 1e-4 * std::max(1.0, std::abs(d2)));
    }
  }
}

TEST_CASE("conquer closed forms agree with convolution quadrature") {
  for (double tau : {0.1, 0.5, 0.9}) {
    for (double h : {0.25, 1.0}) {
      LossSpec s = LossSpec::conquer(tau, h);
      for (double u = -5.0; u <= 5.0; u += 0.5) {
        auto q = oracle::conquer_quadrature(tau, h, Kernel::Gaussian, u);
        CHECK(std::abs(loss_value(s, 0.0, u) - q.value) <= 1e-8);
        CHECK(std::abs(-loss_d1(s, 0.0, u) - q.d1) <= 1e-8);
        CHECK(std::abs(loss_d2(s, 0.0, u) - q.d2) <= 1e-8);
      }
    }
  }
}

TEST_CASE("uniform-kernel conquer agrees with quadrature") {
  for (double tau : {0.2, 0.7}) {
    LossSpec s = LossSpec::conquer(tau, 0.5, Kernel::Uniform);
    for (double u = -2.0; u <= 2.0; u += 0.1) {
      auto q = oracle::conquer_quadrature(tau, 0.5, Kernel::Uniform, u);
      CHECK(std::abs(loss_value(s, 0.0, u) - q.value) <= 1e-9);
      CHECK(std::abs(-loss_d1(s, 0.0, u) - q.d1) <= 1e-9);
      if (std::abs(std::abs(u) - 0.5) > 1e-9) CHECK(std::abs(loss_d2(s, 0.0, u) - q.d2) <= 1e-9);
    }
  }
}

TEST_CASE("default bandwidth rule") {
  CHECK(default_bandwidth(0.5, 100, 1000) ==
        doctest::Approx(0.5 * std::pow(std::log(1000.0) / 100.0, 0.25)));
  CHECK(default_bandwidth(0.001, 100000, 2) == 0.05);
}

TEST_CASE("empirical loss") {
  Dataset d = oracle::random_dataset(20, 5, Task::Binary, 1);
  LossSpec lg = LossSpec::logistic();
  CHECK(empirical_loss(d, lg, Coefficients(5)) == std::log(2.0));

  Coefficients b(VectorXd::LinSpaced(5, -0.5, 0.7), 0.2);
  double naive = 0.0;
  for (Index i = 0; i < d.n(); ++i) naive += loss_value(lg, d.features.row(i).dot(b.beta) + 0.2, d.response[i]);
  CHECK(empirical_loss(d, lg, b) == doctest::Approx(naive / 20.0).epsilon(1e-12));

  Dataset one = subset_rows(d, {3});
  CHECK(empirical_loss(one, lg, b) ==
        doctest::Approx(loss_value(lg, one.features.row(0).dot(b.beta) + 0.2, one.response[0])));
  CHECK_THROWS_AS(empirical_loss(d, lg, Coefficients(4)), Error);
}

TEST_CASE("gradient") {
  Dataset one;
  one.features = MatrixXd(1, 2);
  one.features << 1, 0;
  one.response = VectorXd::Ones(1);
  Gradient g = gradient(one, LossSpec::logistic(), Coefficients(2));
  CHECK(g.beta[0] == doctest::Approx(-0.5));
  CHECK(g.beta[1] == 0.0);

  for (const LossSpec& s : {LossSpec::logistic(), LossSpec::conquer(0.3, 0.4)}) {
    Dataset d = oracle::random_dataset(30, 4, s.task(), 5);
    Coefficients b(VectorXd::LinSpaced(4, -0.3, 0.4), 0.1);
    Gradient an = gradient(d, s, b);
    for (Index j = 0; j < 4; ++j) {
      auto f = [&](double x) {
        Coefficients c = b;
        c.beta[j] = x;
        return empirical_loss(d, s, c);
      };
      double fd = oracle::central_difference(f, b.beta[j], 1e-5);
      CHECK(std::abs(an.beta[j] - fd) <= 1e-6 * std::max(1.0, std::abs(fd)));
    }
    auto f0 = [&](double x) {
      Coefficients c = b;
      c.intercept = x;
      return empirical_loss(d, s, c);
    };
    CHECK(std::abs(an.intercept - oracle::central_difference(f0, 0.1, 1e-5)) <= 1e-6);
  }
  Dataset d = oracle::random_dataset(30, 2, Task::Binary, 8);
  CHECK_THROWS_AS(gradient(d, LossSpec::logistic(), Coefficients(3)), Error);
}

TEST_CASE("gradient vanishes at the unpenalised minimiser") {
  Dataset d = oracle::random_dataset(60, 2, Task::Binary, 21);
  VectorXd beta = oracle::newton_minimizer(d, LossSpec::logistic());
  Gradient g = gradient(d, LossSpec::logistic(), Coefficients(beta, std::nullopt));
  CHECK(g.beta.cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("curvature matrix") {
  Dataset one;
  one.features = MatrixXd(1, 2);
  one.features << 1, 0;
  one.response = VectorXd::Zero(1);
  MatrixXd c = curvature_matrix(one, LossSpec::logistic(), Coefficients(2));
  CHECK(c(0, 0) == 0.25);
  CHECK(c(0, 1) == 0.0);
  CHECK(c(1, 1) == 0.0);

  for (const LossSpec& s : {LossSpec::logistic(), LossSpec::smooth_hinge(4.0), LossSpec::conquer(0.6, 0.5)}) {
    Dataset d = to_loss_encoding(oracle::random_dataset(40, 4, s.task(), 13), s);
    Coefficients b(VectorXd::LinSpaced(4, -0.6, 0.5), std::nullopt);
    MatrixXd h = curvature_matrix(d, s, b);
    CHECK(h == h.transpose());
    CHECK(Eigen::SelfAdjointEigenSolver<MatrixXd>(h).eigenvalues().minCoeff() >= -1e-14);
    for (Index k = 0; k < 4; ++k) {
      Coefficients up = b, dn = b;
      up.beta[k] += 1e-5;
      dn.beta[k] -= 1e-5;
      VectorXd col = (gradient(d, s, up).beta - gradient(d, s, dn).beta) / 2e-5;
      CHECK((col - h.col(k)).cwiseAbs().maxCoeff() <= 1e-5);
    }
  }
  Dataset d = oracle::random_dataset(5, 4, Task::Binary, 1);
  Coefficients with(4, true);
  CHECK(curvature_matrix(d, LossSpec::logistic(), with).rows() == 5);
  try {
    curvature_matrix(d, LossSpec::logistic(), Coefficients(4), 3);
    FAIL("expected cap error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("analog") != std::string::npos);
  }
}
