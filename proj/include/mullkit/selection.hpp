#pragma once

#include "mullkit/analog.hpp"
#include "mullkit/dataset.hpp"
#include "mullkit/losses.hpp"
#include "mullkit/muc.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mullkit {

// Zeroes beta_j when |beta_j| <= fraction * max_k |beta_k|. The intercept is kept.
Coefficients threshold_estimate(const Coefficients& beta, double fraction);

struct ClassificationScores {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Positive class is label 1; any other label is negative. F1 is 0 when P + R = 0.
ClassificationScores classification_metrics(const VectorXd& predicted, const VectorXd& truth);

struct SupportScores {
  Index fn = 0;
  Index fp = 0;
  double l1_error = 0.0;
};

SupportScores support_metrics(const Coefficients& estimate, const Coefficients& truth);

// Mean of rho_tau(y_i - yhat_i), rho_tau(u) = u (tau - 1{u < 0}).
double check_loss(const VectorXd& predicted, const VectorXd& truth, double tau);

struct MetricReport {
  Index fn_count = 0;
  Index fp_count = 0;
  double l1_error = 0.0;
  std::optional<double> accuracy;
  std::optional<double> f1;
  std::optional<double> check_loss;
};

// Binary labels {0,1} predicted as 1 when the linear predictor is positive.
VectorXd predict_labels(const MatrixXd& features, const Coefficients& coefs);

enum class Method { Muc, Analog, Hybrid };

std::string to_string(Method m);
Method parse_method(const std::string& s);

// Fixed solver settings shared by every grid point.
struct MethodOptions {
  AnalogConfig analog;
  MucConfig muc;
  Index hybrid_keep = 1000;
  bool intercept = false;
};

// Fits `method` at penalty (lambda, gamma): the analog solver reads them as
// (lambda2, gamma2), MUC as (lambda, gamma), the hybrid uses them in both stages.
FitResult fit_method(const Dataset& data, const LossSpec& spec, Method method, double lambda,
                     double gamma, const MethodOptions& opts,
                     const std::optional<Coefficients>& warm = std::nullopt);

/// Tuning grid. Penalties are multipliers: lambda = m * sqrt(log p / n) and
/// gamma = m * sqrt(log n / n), with n and p of the full dataset.
struct CvGrid {
  std::vector<double> lambda_multipliers{0.25, 0.5, 0.75, 1.0, 1.25, 1.5};
  std::vector<double> gamma_multipliers{0.0, 0.5, 1.0};
  std::vector<double> threshold_fractions{0.0, 0.05, 0.10, 0.15, 0.20, 0.25,
                                          0.30, 0.35, 0.40, 0.45, 0.50};
  int folds = 5;
  std::uint64_t seed = 1;

  void validate(Index n) const;
};

double lambda_scale(Index n, Index p);
double gamma_scale(Index n);

struct CvRow {
  double lambda_multiplier = 0.0;
  double gamma_multiplier = 0.0;
  double threshold = 0.0;
  double lambda = 0.0;
  double gamma = 0.0;
  double score = 0.0;  // mean held-out criterion, +inf when a fold fit failed
  int failed_folds = 0;
};

struct CvResult {
  CvRow best;
  std::vector<CvRow> table;
};

/// Seeded K-fold sample assignment; stratified by label for binary tasks.
std::vector<int> make_folds(const Dataset& data, int folds, std::uint64_t seed);

/// K-fold cross validation over (lambda, gamma, threshold). The criterion is the
/// misclassification rate for binary tasks and the mean check loss at the loss's
/// tau for quantile tasks. Within each fold and gamma the lambda path is solved
/// from largest to smallest with warm starts. Ties go to larger lambda, then
/// larger gamma, then larger threshold. `jobs` > 1 runs folds concurrently.
CvResult cv_tune(const Dataset& data, const LossSpec& spec, Method method, const CvGrid& grid,
                 const MethodOptions& opts = {}, int jobs = 1);

struct TunedFit {
  CvResult cv;
  FitResult fit;  // coefficients already thresholded at the selected fraction
};

// cv_tune followed by a full-data refit at the selected point.
TunedFit tune_and_fit(const Dataset& data, const LossSpec& spec, Method method, const CvGrid& grid,
                      const MethodOptions& opts = {}, int jobs = 1);

}  // namespace mullkit
