#include "mullkit/muc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mullkit {

void MucConfig::validate() const {
  if (!(lambda >= 0.0)) throw Error("lambda must be nonnegative");
  if (!(gamma >= 0.0)) throw Error("gamma must be nonnegative");
  if (!(step_tol > 0.0)) throw Error("step_tol must be positive");
  if (max_outer_iter < 1) throw Error("max_outer_iter must be positive");
}

double feasibility_gap(const Dataset& data, const LossSpec& spec, const Coefficients& beta,
                       double lambda, double gamma) {
  Gradient g = gradient(data, spec, beta);
  double sup = g.beta.size() ? g.beta.cwiseAbs().maxCoeff() : 0.0;
  double gap = std::max(0.0, sup - lambda - gamma * l1_norm(beta));
  if (beta.intercept) gap = std::max(gap, std::abs(g.intercept));
  return gap;
}

LinearProgram build_muc_lp(const Dataset& data, const LossSpec& spec, const Coefficients& beta_m,
                           const MucConfig& cfg) {
  const Index p = data.p();
  Coefficients at = beta_m;
  if (cfg.intercept && !at.intercept) at.intercept = 0.0;
  if (!cfg.intercept) at.intercept.reset();
  MatrixXd sigma = curvature_matrix(data, spec, at, cfg.curvature_cap);
  Gradient g = gradient(data, spec, at);

  const Index d = cfg.intercept ? p + 1 : p;
  VectorXd s(d), bm(d);
  s.head(p) = g.beta;
  bm.head(p) = at.beta;
  if (cfg.intercept) {
    s[p] = g.intercept;
    bm[p] = *at.intercept;
  }
  VectorXd nu = s - sigma * bm;

  LinearProgram lp;
  lp.c = VectorXd::Zero(2 * d);
  lp.c.head(p).setOnes();
  lp.c.segment(d, p).setOnes();

  // J acts on the coefficient columns only; the intercept pair carries no gamma term.
  MatrixXd minus_j = sigma, plus_j = sigma;
  minus_j.leftCols(p).array() -= cfg.gamma;
  plus_j.leftCols(p).array() += cfg.gamma;
  lp.A.resize(2 * d, 2 * d);
  lp.A.topLeftCorner(d, d) = minus_j;
  lp.A.topRightCorner(d, d) = -plus_j;
  lp.A.bottomLeftCorner(d, d) = -plus_j;
  lp.A.bottomRightCorner(d, d) = minus_j;

  lp.b.resize(2 * d);
  lp.b.head(d) = cfg.lambda - nu.array();
  lp.b.tail(d) = cfg.lambda + nu.array();
  if (cfg.intercept) {
    // Intercept rows: exact stationarity, no band, no J coupling.
    lp.A.row(p).head(d) = sigma.row(p);
    lp.A.row(p).tail(d) = -sigma.row(p);
    lp.A.row(d + p).head(d) = -sigma.row(p);
    lp.A.row(d + p).tail(d) = sigma.row(p);
    lp.b[p] = -nu[p];
    lp.b[d + p] = nu[p];
  }
  return lp;
}

namespace {

double sup_diff(const Coefficients& a, const Coefficients& b) {
  double d = (a.beta - b.beta).cwiseAbs().maxCoeff();
  if (a.intercept && b.intercept) d = std::max(d, std::abs(*a.intercept - *b.intercept));
  return d;
}

}  // namespace

FitResult muc_fit(const Dataset& data, const LossSpec& spec, const MucConfig& cfg) {
  data.validate();
  cfg.validate();
  check_labels(data, spec);
  const Index p = data.p();
  FitResult res;
  if (!data.standardized) res.warnings.push_back("design matrix is not standardized");

  Coefficients cur(p, cfg.intercept);
  if (cfg.init) {
    if (cfg.init->size() != p) throw Error("warm start length does not match p");
    cur.beta = cfg.init->beta;
    if (cfg.intercept) cur.intercept = cfg.init->intercept_or_zero();
  } else if (cfg.warm_start == WarmStart::Analog) {
    AnalogConfig a = cfg.analog;
    a.lambda2 = cfg.lambda;
    a.gamma2 = cfg.gamma;
    a.intercept = cfg.intercept;
    a.init.reset();
    cur = spg_fit(data, spec, a).coefficients;
  }

  const double feas_ok = 1e-6;
  std::optional<Coefficients> best;
  double best_l1 = 0.0;
  auto consider = [&](const Coefficients& c) {
    if (feasibility_gap(data, spec, c, cfg.lambda, cfg.gamma) > feas_ok) return;
    double l1 = l1_norm(c);
    if (!best || l1 < best_l1) {
      best = c;
      best_l1 = l1;
    }
  };

  double prev_l1 = l1_norm(cur);
  int increases = 0;
  bool stopped_nonmonotone = false;
  int m = 0;
  for (; m < cfg.max_outer_iter; ++m) {
    LinearProgram lp = build_muc_lp(data, spec, cur, cfg);
    LpSolution sol = solve_lp(lp, cfg.lp);
    if (sol.status != LpStatus::Optimal) {
      if (m == 0 && sol.status == LpStatus::Infeasible)
        throw InfeasibleFeasibleSet("lambda too small / feasible set empty: the linearised program at "
                                    "the starting point is infeasible");
      res.diagnostic = "linearised program " + to_string(sol.status) + " at outer iteration " +
                       std::to_string(m) + (sol.diagnostic.empty() ? "" : ": " + sol.diagnostic);
      break;
    }
    const Index d = lp.num_vars() / 2;
    Coefficients next(p, cfg.intercept);
    next.beta = sol.z.head(p) - sol.z.segment(d, p);
    if (cfg.intercept) next.intercept = sol.z[p] - sol.z[d + p];

    const double step = sup_diff(next, cur);
    const double l1 = l1_norm(next);
    res.trajectory.push_back(l1);
    cur = std::move(next);
    consider(cur);
    if (step <= cfg.step_tol) {
      res.converged = true;
      ++m;
      break;
    }
    increases = l1 > prev_l1 ? increases + 1 : 0;
    prev_l1 = l1;
    if (increases >= 3) {
      stopped_nonmonotone = true;
      res.diagnostic = "L1 norm increased for 3 consecutive outer iterations";
      ++m;
      break;
    }
  }
  res.iterations = m;
  if (!res.converged && res.diagnostic.empty())
    res.diagnostic = "max_outer_iter " + std::to_string(cfg.max_outer_iter) + " reached";

  res.coefficients = (stopped_nonmonotone && best) ? *best : cur;
  res.objective = l1_norm(res.coefficients);
  res.feasibility_gap = feasibility_gap(data, spec, res.coefficients, cfg.lambda, cfg.gamma);
  return res;
}

std::vector<Index> top_k_columns(const VectorXd& beta, Index keep) {
  std::vector<Index> idx(static_cast<std::size_t>(beta.size()));
  std::iota(idx.begin(), idx.end(), Index{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](Index a, Index b) { return std::abs(beta[a]) > std::abs(beta[b]); });
  idx.resize(static_cast<std::size_t>(std::min<Index>(keep, beta.size())));
  std::sort(idx.begin(), idx.end());
  return idx;
}

FitResult hybrid_fit(const Dataset& data, const LossSpec& spec, const AnalogConfig& analog_cfg,
                     const MucConfig& muc_cfg, Index keep) {
  if (keep < 1) throw Error("hybrid keep must be positive");
  if (keep > muc_cfg.curvature_cap)
    throw Error("hybrid keep " + std::to_string(keep) + " exceeds the curvature cap " +
                std::to_string(muc_cfg.curvature_cap));
  FitResult screen = spg_fit(data, spec, analog_cfg);
  std::vector<Index> cols = top_k_columns(screen.coefficients.beta, keep);
  Dataset sub = subset_columns(data, cols);
  MucConfig cfg = muc_cfg;
  if (cfg.init) {
    Coefficients init(static_cast<Index>(cols.size()), cfg.intercept);
    for (std::size_t k = 0; k < cols.size(); ++k) init.beta[static_cast<Index>(k)] = cfg.init->beta[cols[k]];
    if (cfg.intercept) init.intercept = cfg.init->intercept_or_zero();
    cfg.init = init;
  }
  FitResult inner = muc_fit(sub, spec, cfg);

  FitResult res = inner;
  res.coefficients = Coefficients(data.p(), muc_cfg.intercept);
  for (std::size_t k = 0; k < cols.size(); ++k)
    res.coefficients.beta[cols[k]] = inner.coefficients.beta[static_cast<Index>(k)];
  res.coefficients.intercept = inner.coefficients.intercept;
  res.objective = l1_norm(res.coefficients);
  res.feasibility_gap = feasibility_gap(data, spec, res.coefficients, muc_cfg.lambda, muc_cfg.gamma);
  for (const auto& w : screen.warnings) res.warnings.push_back("screen: " + w);
  return res;
}

}  // namespace mullkit
