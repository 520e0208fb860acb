#pragma once

#include "mullkit/dataset.hpp"

#include <string>

namespace mullkit {

// minimize c'z subject to A z <= b, z >= 0.
struct LinearProgram {
  VectorXd c;
  MatrixXd A;
  VectorXd b;

  Index num_vars() const { return c.size(); }
  Index num_rows() const { return b.size(); }
  void validate() const;
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

std::string to_string(LpStatus s);

struct LpSolution {
  VectorXd z;
  double objective_value = 0.0;
  LpStatus status = LpStatus::IterationLimit;
  int iterations = 0;
  bool used_bland = false;
  std::string diagnostic;
};

struct LpOptions {
  double feas_tol = 1e-8;
  double opt_tol = 1e-9;
  int max_iter = 0;  // 0 means 50 * (m + q)
};

/// Dense revised simplex with an explicit basis inverse.
///
/// Phase I minimises the sum of artificial variables attached to rows with a
/// negative right-hand side; a positive optimum reports Infeasible. Pricing is
/// Dantzig's rule, switching to Bland's rule once 10 (m + q) degenerate pivots
/// have occurred. The basis inverse is refactorised every 64 pivots.
LpSolution solve_lp(const LinearProgram& lp, const LpOptions& opts = {});

}  // namespace mullkit
