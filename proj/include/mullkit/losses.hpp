#pragma once

#include "mullkit/dataset.hpp"

#include <string>

namespace mullkit {

enum class LossKind { Logistic, SmoothHinge, Conquer };

// Smoothing kernel for the conquer loss. Gaussian is twice differentiable
// everywhere; Uniform has a piecewise-constant second derivative.
enum class Kernel { Gaussian, Uniform };

/// A convex, Lipschitz, twice-differentiable loss f(t; y) in the linear predictor t.
///
/// Label encodings: Logistic takes y in {0, 1}; SmoothHinge takes y in {-1, +1};
/// Conquer takes any real y and smooths the check loss of the residual y - t.
class LossSpec {
 public:
  static LossSpec logistic();
  static LossSpec smooth_hinge(double sigma2 = 4.0);
  static LossSpec conquer(double tau, double bandwidth, Kernel kernel = Kernel::Gaussian);

  LossKind kind() const { return kind_; }
  double sigma2() const { return sigma2_; }
  double tau() const { return tau_; }
  double bandwidth() const { return bandwidth_; }
  Kernel kernel() const { return kernel_; }
  Task task() const { return kind_ == LossKind::Conquer ? Task::Quantile : Task::Binary; }
  std::string name() const;

 private:
  LossKind kind_ = LossKind::Logistic;
  double sigma2_ = 4.0;
  double tau_ = 0.5;
  double bandwidth_ = 0.5;
  Kernel kernel_ = Kernel::Gaussian;
};

double loss_value(const LossSpec& spec, double t, double y);
double loss_d1(const LossSpec& spec, double t, double y);
double loss_d2(const LossSpec& spec, double t, double y);

// sup_t |d1|; max(tau, 1 - tau) for conquer.
double lipschitz_const(const LossSpec& spec);
// sup_t d2: 1/4 logistic, 1/(2 sigma) smooth hinge, 1/(h sqrt(2 pi)) Gaussian conquer.
double d2_max(const LossSpec& spec);

// max(0.05, sqrt(tau (1 - tau)) (log p / n)^(1/4)).
double default_bandwidth(double tau, Index n, Index p);

// Throws Error if a response value is outside the loss's label encoding.
void check_labels(const Dataset& data, const LossSpec& spec);

// Rewrites {0,1} labels as {-1,+1} for the smooth hinge loss; other losses pass through.
Dataset to_loss_encoding(const Dataset& data, const LossSpec& spec);

// Mean loss (1/n) sum_i f(<w_i, beta> + b; y_i).
double empirical_loss(const Dataset& data, const LossSpec& spec, const Coefficients& beta);

struct Gradient {
  VectorXd beta;
  double intercept = 0.0;  // meaningful only when the coefficients carry an intercept
};

// S(beta) = (1/n) sum_i d1(<w_i, beta> + b; y_i) w_i.
Gradient gradient(const Dataset& data, const LossSpec& spec, const Coefficients& beta);

inline constexpr Index kDefaultCurvatureCap = 2000;

// (1/n) sum_i d2(<w_i, beta> + b; y_i) w_i w_i'. With an intercept the design is
// augmented by a trailing column of ones, so the result is (p+1) x (p+1).
MatrixXd curvature_matrix(const Dataset& data, const LossSpec& spec, const Coefficients& beta,
                          Index cap = kDefaultCurvatureCap);

namespace detail {
// Vectorised per-sample derivatives at predictor values t; no label checks.
void per_sample_d1(const LossSpec& spec, const VectorXd& t, const VectorXd& y, VectorXd& out);
double mean_loss(const LossSpec& spec, const VectorXd& t, const VectorXd& y);
double std_normal_cdf(double x);
double std_normal_pdf(double x);
}  // namespace detail

}  // namespace mullkit
