#pragma once

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mullkit {

using Index = Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised by standardize() when a column has zero second moment.
class ZeroVarianceColumn : public Error {
 public:
  ZeroVarianceColumn(Index column, const std::string& name);
  Index column() const { return column_; }

 private:
  Index column_;
};

enum class Task { Binary, Quantile };

struct Dataset {
  MatrixXd features;  // n x p, one row per sample
  VectorXd response;
  Task task = Task::Binary;
  bool standardized = false;
  // Column divisors applied by standardize(); empty when never standardized.
  VectorXd scale;
  std::vector<std::string> names;

  Index n() const { return features.rows(); }
  Index p() const { return features.cols(); }

  // Throws Error on empty or non-finite data, or a response of the wrong length.
  void validate() const;
  std::string column_name(Index j) const;
};

struct Coefficients {
  VectorXd beta;
  std::optional<double> intercept;

  Coefficients() = default;
  explicit Coefficients(Index p, bool with_intercept = false)
      : beta(VectorXd::Zero(p)) {
    if (with_intercept) intercept = 0.0;
  }
  Coefficients(VectorXd b, std::optional<double> b0)
      : beta(std::move(b)), intercept(b0) {}

  Index size() const { return beta.size(); }
  Index nonzeros() const;
  double intercept_or_zero() const { return intercept.value_or(0.0); }
};

struct FitResult {
  Coefficients coefficients;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  // max(0, ||S_w(beta)||_inf - lambda - gamma ||beta||_1), exact gradient.
  double feasibility_gap = 0.0;
  std::optional<double> kkt_residual;
  std::string diagnostic;
  std::vector<std::string> warnings;
  // Per-iteration objective (analog) or L1 norm (MUC) history.
  std::vector<double> trajectory;
};

// Divides every column by its root mean square so diag(W'W/n) = 1.
Dataset standardize(const Dataset& data);

// Maps coefficients fitted on standardize(data) back to the original column scale.
Coefficients unstandardize(const Coefficients& coefs, const Dataset& standardized);

// Keeps the listed rows; scaling metadata is carried over unchanged.
Dataset subset_rows(const Dataset& data, const std::vector<Index>& rows);
// Keeps the listed columns in the given order.
Dataset subset_columns(const Dataset& data, const std::vector<Index>& cols);

double l1_norm(const VectorXd& beta);
inline double l1_norm(const Coefficients& c) { return l1_norm(c.beta); }

// Linear predictor W beta + intercept.
VectorXd linear_predictor(const MatrixXd& features, const Coefficients& coefs);

}  // namespace mullkit
