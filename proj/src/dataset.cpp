#include "mullkit/dataset.hpp"

#include <cmath>

namespace mullkit {

ZeroVarianceColumn::ZeroVarianceColumn(Index column, const std::string& name)
    : Error("column " + std::to_string(column) + " (" + name +
            ") has zero variance; cannot standardize"),
      column_(column) {}

void Dataset::validate() const {
  if (n() < 1 || p() < 1) throw Error("dataset must have at least one row and one column");
  if (response.size() != n())
    throw Error("response length " + std::to_string(response.size()) +
                " does not match " + std::to_string(n()) + " rows");
  if (!features.allFinite()) throw Error("features contain non-finite values");
  if (!response.allFinite()) throw Error("response contains non-finite values");
  if (!names.empty() && static_cast<Index>(names.size()) != p())
    throw Error("column name count does not match feature count");
}

std::string Dataset::column_name(Index j) const {
  if (j < static_cast<Index>(names.size())) return names[j];
  return "x" + std::to_string(j + 1);
}

Index Coefficients::nonzeros() const {
  Index k = 0;
  for (Index j = 0; j < beta.size(); ++j)
    if (std::abs(beta[j]) > 0.0) ++k;
  return k;
}

Dataset standardize(const Dataset& data) {
  data.validate();
  Dataset out = data;
  const double n = static_cast<double>(data.n());
  VectorXd s(data.p());
  for (Index j = 0; j < data.p(); ++j) {
    double ms = data.features.col(j).squaredNorm() / n;
    if (!(ms > 0.0)) throw ZeroVarianceColumn(j, data.column_name(j));
    s[j] = std::sqrt(ms);
    out.features.col(j) /= s[j];
  }
  // Compose with any earlier scaling so unstandardize() returns to the raw scale.
  if (data.scale.size() == data.p())
    out.scale = data.scale.cwiseProduct(s);
  else
    out.scale = s;
  out.standardized = true;
  return out;
}

Coefficients unstandardize(const Coefficients& coefs, const Dataset& standardized) {
  if (standardized.scale.size() != coefs.size()) return coefs;
  Coefficients out = coefs;
  out.beta = coefs.beta.cwiseQuotient(standardized.scale);
  return out;
}

Dataset subset_rows(const Dataset& data, const std::vector<Index>& rows) {
  Dataset out;
  out.features.resize(static_cast<Index>(rows.size()), data.p());
  out.response.resize(static_cast<Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.features.row(static_cast<Index>(i)) = data.features.row(rows[i]);
    out.response[static_cast<Index>(i)] = data.response[rows[i]];
  }
  out.task = data.task;
  out.standardized = data.standardized;
  out.scale = data.scale;
  out.names = data.names;
  return out;
}

Dataset subset_columns(const Dataset& data, const std::vector<Index>& cols) {
  Dataset out;
  out.features.resize(data.n(), static_cast<Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k)
    out.features.col(static_cast<Index>(k)) = data.features.col(cols[k]);
  out.response = data.response;
  out.task = data.task;
  out.standardized = data.standardized;
  if (data.scale.size() == data.p()) {
    out.scale.resize(static_cast<Index>(cols.size()));
    for (std::size_t k = 0; k < cols.size(); ++k) out.scale[static_cast<Index>(k)] = data.scale[cols[k]];
  }
  if (!data.names.empty())
    for (Index c : cols) out.names.push_back(data.names[c]);
  return out;
}

double l1_norm(const VectorXd& beta) {
  double s = 0.0;
  for (Index j = 0; j < beta.size(); ++j) s += std::abs(beta[j]);
  return s;
}

VectorXd linear_predictor(const MatrixXd& features, const Coefficients& coefs) {
  if (features.cols() != coefs.size())
    throw Error("coefficient length " + std::to_string(coefs.size()) +
                " does not match " + std::to_string(features.cols()) + " features");
  VectorXd t = features * coefs.beta;
  if (coefs.intercept) t.array() += *coefs.intercept;
  return t;
}

}  // namespace mullkit
