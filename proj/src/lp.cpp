#include "mullkit/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace mullkit {

void LinearProgram::validate() const {
  if (A.rows() != b.size() || A.cols() != c.size())
    throw Error("linear program dimensions are inconsistent: A is " + std::to_string(A.rows()) +
                "x" + std::to_string(A.cols()) + ", b has " + std::to_string(b.size()) +
                ", c has " + std::to_string(c.size()));
  if (!A.allFinite() || !b.allFinite() || !c.allFinite())
    throw Error("linear program contains non-finite entries");
}

std::string to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::IterationLimit: return "iteration_limit";
  }
  return "?";
}

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kBreakdownTol = 1e-12;
constexpr int kRefactorEvery = 64;

// Column layout of the working problem [D A | D | I_art] z' = D b, D = diag(sign).
class Simplex {
 public:
  Simplex(const LinearProgram& lp, const LpOptions& opts) : lp_(lp), opts_(opts) {
    m_ = lp.num_vars();
    q_ = lp.num_rows();
    sign_.resize(q_);
    bbar_.resize(q_);
    for (Index i = 0; i < q_; ++i) {
      sign_[i] = lp.b[i] < 0.0 ? -1.0 : 1.0;
      bbar_[i] = sign_[i] * lp.b[i];
      if (sign_[i] < 0.0) {
        art_row_.push_back(i);
      }
    }
    ncols_ = m_ + q_ + static_cast<Index>(art_row_.size());
    basis_.resize(q_);
    is_basic_.assign(ncols_, -1);
    Index a = 0;
    for (Index i = 0; i < q_; ++i) {
      Index col = sign_[i] > 0.0 ? m_ + i : m_ + q_ + a++;
      basis_[i] = col;
      is_basic_[col] = i;
    }
    binv_ = MatrixXd::Identity(q_, q_);
    xb_ = bbar_;
    max_iter_ = opts.max_iter > 0 ? opts.max_iter : static_cast<int>(50 * (m_ + q_) + 50);
    bnorm_ = lp.b.size() ? lp.b.cwiseAbs().maxCoeff() : 0.0;
  }

  LpSolution run() {
    LpSolution sol;
    if (!art_row_.empty()) {
      cost_ = VectorXd::Zero(ncols_);
      cost_.tail(static_cast<Index>(art_row_.size())).setOnes();
      allow_art_ = true;
      auto st = iterate();
      if (st == Stop::Limit || st == Stop::Breakdown) return finish_failure(sol, st);
      double infeas = 0.0;
      for (Index i = 0; i < q_; ++i)
        if (is_artificial(basis_[i])) infeas += std::max(0.0, xb_[i]);
      if (infeas > opts_.feas_tol * (1.0 + bnorm_)) {
        sol.status = LpStatus::Infeasible;
        sol.iterations = iters_;
        sol.used_bland = bland_;
        sol.diagnostic = "phase I optimum " + std::to_string(infeas) + " > 0";
        return sol;
      }
      drive_out_artificials();
    }
    cost_ = VectorXd::Zero(ncols_);
    cost_.head(m_) = lp_.c;
    allow_art_ = false;
    auto st = iterate();
    if (st == Stop::Limit || st == Stop::Breakdown) return finish_failure(sol, st);
    if (st == Stop::Unbounded) {
      sol.status = LpStatus::Unbounded;
      sol.iterations = iters_;
      sol.used_bland = bland_;
      sol.diagnostic = "entering column has no positive pivot";
      return sol;
    }
    return finish_optimal(sol);
  }

 private:
  enum class Stop { Optimal, Unbounded, Limit, Breakdown };

  bool is_artificial(Index col) const { return col >= m_ + q_; }

  VectorXd column(Index j) const {
    if (j < m_) return sign_.cwiseProduct(lp_.A.col(j));
    VectorXd e = VectorXd::Zero(q_);
    if (j < m_ + q_) {
      e[j - m_] = sign_[j - m_];
    } else {
      e[art_row_[static_cast<std::size_t>(j - m_ - q_)]] = 1.0;
    }
    return e;
  }

  // y' col_j for every column j.
  VectorXd priced(const VectorXd& y) const {
    VectorXd out(ncols_);
    VectorXd u = sign_.cwiseProduct(y);
    out.head(m_).noalias() = lp_.A.transpose() * u;
    out.segment(m_, q_) = u;
    for (std::size_t a = 0; a < art_row_.size(); ++a) out[m_ + q_ + static_cast<Index>(a)] = y[art_row_[a]];
    return out;
  }

  bool refactor() {
    MatrixXd B(q_, q_);
    for (Index i = 0; i < q_; ++i) B.col(i) = column(basis_[i]);
    Eigen::PartialPivLU<MatrixXd> lu(B);
    if (!(lu.rcond() > 1e-14)) return false;
    binv_ = lu.inverse();
    xb_ = binv_ * bbar_;
    since_refactor_ = 0;
    return true;
  }

  void pivot(Index r, Index entering, const VectorXd& alpha) {
    const double theta = std::max(0.0, xb_[r]) / alpha[r];
    xb_.noalias() -= theta * alpha;
    xb_[r] = theta;
    Eigen::RowVectorXd R = binv_.row(r) / alpha[r];
    binv_.noalias() -= alpha * R;
    binv_.row(r) += R;
    is_basic_[basis_[r]] = -1;
    basis_[r] = entering;
    is_basic_[entering] = r;
    if (++since_refactor_ >= kRefactorEvery) refactor();
  }

  Stop iterate() {
    const int degen_limit = static_cast<int>(10 * (m_ + q_));
    while (true) {
      if (iters_ >= max_iter_) return Stop::Limit;
      VectorXd cb(q_);
      for (Index i = 0; i < q_; ++i) cb[i] = cost_[basis_[i]];
      VectorXd y = binv_.transpose() * cb;
      VectorXd py = priced(y);

      Index entering = -1;
      double best = -opts_.opt_tol;
      for (Index j = 0; j < ncols_; ++j) {
        if (is_basic_[j] >= 0) continue;
        if (!allow_art_ && is_artificial(j)) continue;
        double d = cost_[j] - py[j];
        if (bland_) {
          if (d < -opts_.opt_tol) {
            entering = j;
            break;
          }
        } else if (d < best) {
          best = d;
          entering = j;
        }
      }
      if (entering < 0) return Stop::Optimal;

      VectorXd alpha = binv_ * column(entering);
      Index r = ratio_test(alpha);
      if (r < 0) {
        if (since_refactor_ > 0) {
          if (!refactor()) return Stop::Breakdown;
          alpha = binv_ * column(entering);
          r = ratio_test(alpha);
        }
        if (r < 0) {
          if (alpha.maxCoeff() > kBreakdownTol) return Stop::Breakdown;
          return Stop::Unbounded;
        }
      }
      const double theta = std::max(0.0, xb_[r]) / alpha[r];
      if (theta <= 1e-12) {
        if (++degenerate_ > degen_limit) bland_ = true;
      }
      pivot(r, entering, alpha);
      ++iters_;
    }
  }

  Index ratio_test(const VectorXd& alpha) const {
    double best = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < q_; ++i)
      if (alpha[i] > kPivotTol) best = std::min(best, std::max(0.0, xb_[i]) / alpha[i]);
    if (!std::isfinite(best)) return -1;
    const double slack = 1e-12 * (1.0 + best);
    Index r = -1;
    for (Index i = 0; i < q_; ++i) {
      if (alpha[i] <= kPivotTol) continue;
      double ratio = std::max(0.0, xb_[i]) / alpha[i];
      if (ratio > best + slack) continue;
      if (r < 0) {
        r = i;
      } else if (bland_) {
        if (basis_[i] < basis_[r]) r = i;
      } else if (alpha[i] > alpha[r]) {
        r = i;
      }
    }
    return r;
  }

  void drive_out_artificials() {
    for (Index r = 0; r < q_; ++r) {
      if (!is_artificial(basis_[r])) continue;
      Eigen::RowVectorXd row = binv_.row(r);
      VectorXd rowT = row.transpose();
      VectorXd pr = priced(rowT);
      Index best = -1;
      double mag = 1e-9;
      for (Index j = 0; j < m_ + q_; ++j) {
        if (is_basic_[j] >= 0) continue;
        if (std::abs(pr[j]) > mag) {
          mag = std::abs(pr[j]);
          best = j;
        }
      }
      // A row with no candidate is redundant; its artificial stays basic at zero.
      if (best < 0) continue;
      VectorXd alpha = binv_ * column(best);
      pivot(r, best, alpha);
      if (xb_[r] < 0.0) xb_[r] = 0.0;
    }
  }

  VectorXd structural() const {
    VectorXd z = VectorXd::Zero(m_);
    for (Index i = 0; i < q_; ++i)
      if (basis_[i] < m_) z[basis_[i]] = xb_[i];
    return z;
  }

  LpSolution finish_optimal(LpSolution& sol) {
    sol.iterations = iters_;
    sol.used_bland = bland_;
    const double tol = opts_.feas_tol * (1.0 + bnorm_);
    for (int attempt = 0; attempt < 2; ++attempt) {
      VectorXd z = structural();
      bool nonneg = true;
      for (Index j = 0; j < m_; ++j) {
        if (z[j] < -opts_.feas_tol) nonneg = false;
        if (z[j] < 0.0) z[j] = 0.0;
      }
      VectorXd viol = lp_.A * z - lp_.b;
      if (nonneg && (q_ == 0 || viol.maxCoeff() <= tol)) {
        sol.z = std::move(z);
        sol.objective_value = lp_.c.dot(sol.z);
        sol.status = LpStatus::Optimal;
        return sol;
      }
      if (attempt == 0 && !refactor()) break;
    }
    sol.status = LpStatus::IterationLimit;
    sol.z = structural();
    sol.objective_value = lp_.c.dot(sol.z);
    sol.diagnostic = "numerical breakdown: final basis violates constraints";
    return sol;
  }

  LpSolution finish_failure(LpSolution& sol, Stop st) {
    sol.status = LpStatus::IterationLimit;
    sol.iterations = iters_;
    sol.used_bland = bland_;
    sol.z = structural();
    sol.objective_value = lp_.c.dot(sol.z);
    sol.diagnostic = st == Stop::Limit ? "iteration limit " + std::to_string(max_iter_) + " reached"
                                       : "numerical breakdown: pivot below 1e-12 or singular basis";
    return sol;
  }

  const LinearProgram& lp_;
  LpOptions opts_;
  Index m_ = 0, q_ = 0, ncols_ = 0;
  VectorXd sign_, bbar_, cost_, xb_;
  std::vector<Index> art_row_;
  std::vector<Index> basis_;
  std::vector<Index> is_basic_;
  MatrixXd binv_;
  int iters_ = 0, max_iter_ = 0, degenerate_ = 0, since_refactor_ = 0;
  bool bland_ = false, allow_art_ = false;
  double bnorm_ = 0.0;
};

}  // namespace

LpSolution solve_lp(const LinearProgram& lp, const LpOptions& opts) {
  lp.validate();
  if (lp.num_rows() == 0) {
    // Only z >= 0 constrains the problem.
    LpSolution sol;
    sol.z = VectorXd::Zero(lp.num_vars());
    if ((lp.c.array() < -opts.opt_tol).any()) {
      sol.status = LpStatus::Unbounded;
      return sol;
    }
    sol.status = LpStatus::Optimal;
    return sol;
  }
  Simplex s(lp, opts);
  return s.run();
}

}  // namespace mullkit
