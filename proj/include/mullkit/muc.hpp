#pragma once

#include "mullkit/analog.hpp"
#include "mullkit/dataset.hpp"
#include "mullkit/losses.hpp"
#include "mullkit/lp.hpp"

#include <optional>

namespace mullkit {

enum class WarmStart { Analog, Zero };

/// Settings for the minimum-L1 estimator over
///   C_w(lambda, gamma) = { beta : ||S_w(beta)||_inf <= lambda + gamma ||beta||_1 }.
/// gamma = 0 gives the noiseless feasible set C(lambda).
struct MucConfig {
  double lambda = 0.0;
  double gamma = 0.0;
  int max_outer_iter = 50;
  double step_tol = 1e-4;
  // Used as the starting point when set; otherwise warm_start decides.
  std::optional<Coefficients> init;
  WarmStart warm_start = WarmStart::Analog;
  // Solver controls for the analog warm start; its penalties are replaced by (lambda, gamma).
  AnalogConfig analog;
  bool intercept = false;
  Index curvature_cap = kDefaultCurvatureCap;
  LpOptions lp;

  void validate() const;
};

// Raised when the first linearised program has no feasible point.
class InfeasibleFeasibleSet : public Error {
 public:
  using Error::Error;
};

// max(0, ||S_w(beta)||_inf - lambda - gamma ||beta||_1), and |S_0| for an intercept.
double feasibility_gap(const Dataset& data, const LossSpec& spec, const Coefficients& beta,
                       double lambda, double gamma);

/// Linear program for one linearisation step at beta_m over z = [b+; b-]:
///   minimize 1'(b+ + b-)
///   (Sigma - gamma J) b+ - (Sigma + gamma J) b- <= lambda 1 - nu
///  -(Sigma + gamma J) b+ + (Sigma - gamma J) b- <= lambda 1 + nu
/// with nu = S_w(beta_m) - Sigma beta_m and J the all-ones matrix. An intercept adds
/// a free pair (b0+, b0-) that is excluded from the objective and from J, and whose
/// gradient row is held at zero.
LinearProgram build_muc_lp(const Dataset& data, const LossSpec& spec, const Coefficients& beta_m,
                           const MucConfig& cfg);

FitResult muc_fit(const Dataset& data, const LossSpec& spec, const MucConfig& cfg);

/// Fits the analog estimator on all columns, keeps the `keep` largest |beta_j|
/// (ties to the lower index), and runs muc_fit on the kept columns. The result is
/// re-embedded into length p.
FitResult hybrid_fit(const Dataset& data, const LossSpec& spec, const AnalogConfig& analog_cfg,
                     const MucConfig& muc_cfg, Index keep);

std::vector<Index> top_k_columns(const VectorXd& beta, Index keep);

}  // namespace mullkit
