#pragma once

#include "mullkit/dataset.hpp"
#include "mullkit/rng.hpp"

#include <cstdint>
#include <string>

namespace mullkit {

enum class Scheme { S1, S2, S3, QuantileHet };
enum class NoiseDist { Normal, StudentT2 };

std::string to_string(Scheme s);
Scheme parse_scheme(const std::string& s);  // s1 | s2 | s3 | qhet
NoiseDist parse_noise(const std::string& s);  // normal | t2

struct SchemeSpec {
  Scheme scheme = Scheme::S3;
  Index n = 100;
  Index p = 200;
  double sigma_u = 0.3;
  double tau = 0.5;           // quantile level of the heterogeneous scheme
  NoiseDist noise = NoiseDist::Normal;
  double noise_sd = 2.0;      // sd of the normal response noise
  std::uint64_t seed = 1;

  void validate() const;
  Task task() const { return scheme == Scheme::QuantileHet ? Task::Quantile : Task::Binary; }
};

struct SimReplicate {
  MatrixXd x;  // clean features
  MatrixXd w;  // x plus measurement noise
  VectorXd y;  // {0,1} labels or real responses
  Coefficients beta;
  double intercept = 0.0;
  Task task = Task::Binary;

  // Dataset on the noisy features (clean ones when `clean` is set).
  Dataset dataset(bool clean = false) const;
};

// Lower-triangular L with L L' = sigma. Throws when a pivot is not positive.
MatrixXd cholesky(const MatrixXd& sigma);

// sigma_ij = rho^|i-j|.
MatrixXd ar_covariance(Index p, double rho);

VectorXd true_beta(Scheme s, Index p);

// Centered Student-t CDF with 2 degrees of freedom.
double t2_cdf(double x);
double t2_quantile(double prob);

// Quantile of the response noise at level tau.
double noise_quantile(NoiseDist dist, double sd, double tau);

SimReplicate gen_scheme(const SchemeSpec& spec);

// w = x + u with u_ij ~ N(0, sigma_u^2); sigma_u = 0 returns x unchanged.
MatrixXd add_noise(const MatrixXd& x, double sigma_u, std::uint64_t seed);

}  // namespace mullkit
