#pragma once

#include "mullkit/dataset.hpp"
#include "mullkit/losses.hpp"

#include <optional>

namespace mullkit {

/// Tuning and solver controls for the penalised estimator
///   minimize L_w(beta) + lambda2 ||beta||_1 + (gamma2 / 2) ||beta||_1^2  s.t. ||beta||_1 <= radius.
struct AnalogConfig {
  double lambda2 = 0.0;
  double gamma2 = 0.0;
  double radius = 50.0;
  double alpha_min = 1e-10;
  double alpha_max = 1e10;
  int memory = 10;
  double delta = 1e-4;
  int max_iter = 5000;
  double grad_tol = 1e-6;
  bool intercept = false;
  std::optional<Coefficients> init;

  void validate() const;
};

// Euclidean projection onto {z : ||z||_1 <= radius}, O(p log p).
VectorXd project_l1(const VectorXd& v, double radius);

// Euclidean projection onto {z >= 0 : sum(z) <= radius}.
VectorXd project_capped_simplex(const VectorXd& v, double radius);

double analog_objective(const Dataset& data, const LossSpec& spec, const Coefficients& beta,
                        const AnalogConfig& cfg);

// S_w(beta) + (lambda2 + gamma2 ||beta||_1) sign(beta), sign(0) = 0. The intercept
// component, when present, is the plain loss derivative.
Gradient analog_subgradient(const Dataset& data, const LossSpec& spec, const Coefficients& beta,
                            const AnalogConfig& cfg);

/// Largest violation of the stationarity conditions of the penalised problem:
/// |S_j + pen sign(beta_j)| on nonzero coordinates, max(0, |S_j| - pen) on zero
/// coordinates, |S_0| for the intercept, with pen = lambda2 + gamma2 ||beta||_1.
/// Valid as an optimality measure when the radius constraint is inactive.
double kkt_check(const Dataset& data, const LossSpec& spec, const Coefficients& beta,
                 const AnalogConfig& cfg);

/// Spectral projected gradient with a non-monotone Armijo line search.
///
/// The iteration runs on the split coordinates beta = u - v with u, v >= 0 and
/// sum(u + v) <= radius, where the objective is smooth and the penalty gradient
/// is (lambda2 + gamma2 ||beta||_1) sign(beta) on every nonzero coordinate.
/// Converged when the unit-step projected gradient residual is below grad_tol.
FitResult spg_fit(const Dataset& data, const LossSpec& spec, const AnalogConfig& cfg);

}  // namespace mullkit
