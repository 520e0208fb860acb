#include "mullkit/simgen.hpp"

#include <boost/math/distributions/normal.hpp>
#include <boost/random/chi_squared_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>
#include <boost/random/uniform_int_distribution.hpp>

#include <cmath>

namespace mullkit {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

Rng Rng::child(std::uint64_t index) const { return Rng(splitmix64(seed_ ^ splitmix64(index + 1))); }

double Rng::uniform() { return boost::random::uniform_01<double>()(engine_); }

double Rng::normal() { return boost::random::normal_distribution<double>(0.0, 1.0)(engine_); }

double Rng::chi_squared(double df) { return boost::random::chi_squared_distribution<double>(df)(engine_); }

double Rng::student_t(double df) {
  const double z = normal();
  return z / std::sqrt(chi_squared(df) / df);
}

bool Rng::bernoulli(double prob) { return uniform() < prob; }

std::uint64_t Rng::below(std::uint64_t bound) {
  return boost::random::uniform_int_distribution<std::uint64_t>(0, bound - 1)(engine_);
}

std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::S1: return "s1";
    case Scheme::S2: return "s2";
    case Scheme::S3: return "s3";
    case Scheme::QuantileHet: return "qhet";
  }
  return "?";
}

Scheme parse_scheme(const std::string& s) {
  if (s == "s1") return Scheme::S1;
  if (s == "s2") return Scheme::S2;
  if (s == "s3") return Scheme::S3;
  if (s == "qhet") return Scheme::QuantileHet;
  throw Error("unknown scheme '" + s + "' (expected s1, s2, s3 or qhet)");
}

NoiseDist parse_noise(const std::string& s) {
  if (s == "normal") return NoiseDist::Normal;
  if (s == "t2") return NoiseDist::StudentT2;
  throw Error("unknown noise '" + s + "' (expected normal or t2)");
}

void SchemeSpec::validate() const {
  if (n < 2) throw Error("scheme requires n >= 2");
  if (p < 5) throw Error("scheme requires p >= 5");
  if (!(sigma_u >= 0.0) || !std::isfinite(sigma_u)) throw Error("sigma_u must be a nonnegative number");
  if (!(tau > 0.0 && tau < 1.0)) throw Error("tau must lie in (0,1)");
  if (!(noise_sd > 0.0)) throw Error("noise sd must be positive");
}

Dataset SimReplicate::dataset(bool clean) const {
  Dataset d;
  d.features = clean ? x : w;
  d.response = y;
  d.task = task;
  return d;
}

MatrixXd cholesky(const MatrixXd& sigma) {
  const Index p = sigma.rows();
  if (sigma.cols() != p) throw Error("cholesky requires a square matrix");
  if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + sigma.cwiseAbs().maxCoeff()))
    throw Error("cholesky requires a symmetric matrix");
  MatrixXd l = MatrixXd::Zero(p, p);
  for (Index j = 0; j < p; ++j) {
    double d = sigma(j, j) - l.row(j).head(j).squaredNorm();
    if (!(d > 0.0)) throw Error("matrix is not positive definite (pivot " + std::to_string(j) + ")");
    l(j, j) = std::sqrt(d);
    for (Index i = j + 1; i < p; ++i)
      l(i, j) = (sigma(i, j) - l.row(i).head(j).dot(l.row(j).head(j))) / l(j, j);
  }
  return l;
}

MatrixXd ar_covariance(Index p, double rho) {
  MatrixXd s(p, p);
  for (Index i = 0; i < p; ++i)
    for (Index j = 0; j < p; ++j) s(i, j) = std::pow(rho, static_cast<double>(std::abs(i - j)));
  return s;
}

VectorXd true_beta(Scheme s, Index p) {
  VectorXd b = VectorXd::Zero(p);
  switch (s) {
    case Scheme::S1: b.head(5) << 1.39, 1.47, 1.56, 1.65, 1.74; break;
    case Scheme::S2:
    case Scheme::S3: b.head(5).setConstant(1.1); break;
    case Scheme::QuantileHet: b.head(5).setConstant(1.5); break;
  }
  return b;
}

double t2_cdf(double x) { return 0.5 * (1.0 + x / std::sqrt(2.0 + x * x)); }

double t2_quantile(double prob) {
  if (!(prob > 0.0 && prob < 1.0)) throw Error("t2 quantile needs prob in (0,1)");
  return (2.0 * prob - 1.0) / std::sqrt(2.0 * prob * (1.0 - prob));
}

double noise_quantile(NoiseDist dist, double sd, double tau) {
  if (dist == NoiseDist::StudentT2) return t2_quantile(tau);
  return boost::math::quantile(boost::math::normal_distribution<double>(0.0, sd), tau);
}

namespace {

// One row of N(0, AR(rho)) via x_1 = z_1, x_j = rho x_{j-1} + sqrt(1 - rho^2) z_j.
void ar_row(Rng& rng, double rho, Eigen::Ref<VectorXd> out) {
  const double s = std::sqrt(1.0 - rho * rho);
  double prev = rng.normal();
  out[0] = prev;
  for (Index j = 1; j < out.size(); ++j) {
    prev = rho * prev + s * rng.normal();
    out[j] = prev;
  }
}

}  // namespace

SimReplicate gen_scheme(const SchemeSpec& spec) {
  spec.validate();
  const Index n = spec.n, p = spec.p;
  Rng root(spec.seed);
  Rng rng = root.child(0);

  SimReplicate rep;
  rep.task = spec.task();
  rep.beta = Coefficients(true_beta(spec.scheme, p), std::nullopt);
  rep.x.resize(n, p);
  rep.y.resize(n);
  const VectorXd& b = rep.beta.beta;
  VectorXd row(p);

  switch (spec.scheme) {
    case Scheme::S1: {
      MatrixXd block = MatrixXd::Constant(5, 5, -0.2);
      block.diagonal().setOnes();
      const MatrixXd l = cholesky(block);
      VectorXd mu = VectorXd::Zero(5);
      mu << 0.1, 0.2, 0.3, 0.4, 0.5;
      for (Index i = 0; i < n; ++i) {
        const bool pos = rng.bernoulli(0.5);
        for (Index j = 0; j < p; ++j) row[j] = rng.normal();
        row.head(5) = (l * row.head(5)).eval() + (pos ? mu : (-mu).eval());
        rep.x.row(i) = row.transpose();
        rep.y[i] = pos ? 1.0 : 0.0;
      }
      break;
    }
    case Scheme::S2:
    case Scheme::S3:
      for (Index i = 0; i < n; ++i) {
        ar_row(rng, 0.4, row);
        rep.x.row(i) = row.transpose();
        const double t = row.dot(b);
        const double prob = spec.scheme == Scheme::S2 ? t2_cdf(t) : 1.0 / (1.0 + std::exp(-t));
        rep.y[i] = rng.bernoulli(prob) ? 1.0 : 0.0;
      }
      break;
    case Scheme::QuantileHet: {
      rep.intercept = 1.5;
      rep.beta.intercept = 1.5;
      const double q = noise_quantile(spec.noise, spec.noise_sd, spec.tau);
      for (Index i = 0; i < n; ++i) {
        ar_row(rng, 0.7, row);
        rep.x.row(i) = row.transpose();
        const double eps =
            spec.noise == NoiseDist::Normal ? spec.noise_sd * rng.normal() : rng.student_t(2.0);
        rep.y[i] = 1.5 + row.dot(b) + (row[0] + 1.0) * (eps - q);
      }
      break;
    }
  }
  rep.w = add_noise(rep.x, spec.sigma_u, root.child(1).seed());
  return rep;
}

MatrixXd add_noise(const MatrixXd& x, double sigma_u, std::uint64_t seed) {
  if (!(sigma_u >= 0.0)) throw Error("sigma_u must be nonnegative");
  if (sigma_u == 0.0) return x;
  Rng rng(seed);
  MatrixXd w = x;
  for (Index i = 0; i < w.rows(); ++i)
    for (Index j = 0; j < w.cols(); ++j) w(i, j) += sigma_u * rng.normal();
  return w;
}

}  // namespace mullkit
