#include "mullkit/analog.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <numeric>
#include <vector>

namespace mullkit {

void AnalogConfig::validate() const {
  if (!(lambda2 >= 0.0)) throw Error("lambda2 must be nonnegative");
  if (!(gamma2 >= 0.0)) throw Error("gamma2 must be nonnegative");
  if (!(radius > 0.0)) throw Error("radius must be positive");
  if (!(alpha_min > 0.0 && alpha_min < alpha_max)) throw Error("need 0 < alpha_min < alpha_max");
  if (memory < 1) throw Error("line-search memory must be at least 1");
  if (!(delta > 0.0 && delta < 1.0)) throw Error("armijo delta must lie in (0,1)");
  if (max_iter < 1) throw Error("max_iter must be positive");
  if (!(grad_tol > 0.0)) throw Error("grad_tol must be positive");
}

namespace {

// theta >= 0 with sum(max(a - theta, 0)) = radius, for a >= 0 with sum(a) > radius.
double simplex_threshold(std::vector<double> a, double radius) {
  std::sort(a.begin(), a.end(), std::greater<double>());
  double cum = 0.0, theta = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    cum += a[j];
    double t = (cum - radius) / static_cast<double>(j + 1);
    if (a[j] - t > 0.0) theta = t;
  }
  return std::max(theta, 0.0);
}

}  // namespace

VectorXd project_l1(const VectorXd& v, double radius) {
  if (l1_norm(v) <= radius) return v;
  std::vector<double> a(static_cast<std::size_t>(v.size()));
  for (Index j = 0; j < v.size(); ++j) a[static_cast<std::size_t>(j)] = std::abs(v[j]);
  const double theta = simplex_threshold(std::move(a), radius);
  VectorXd z(v.size());
  for (Index j = 0; j < v.size(); ++j) {
    double m = std::max(std::abs(v[j]) - theta, 0.0);
    z[j] = v[j] < 0.0 ? -m : m;
  }
  return z;
}

VectorXd project_capped_simplex(const VectorXd& v, double radius) {
  VectorXd z = v.cwiseMax(0.0);
  if (z.sum() <= radius) return z;
  std::vector<double> a(z.data(), z.data() + z.size());
  const double theta = simplex_threshold(std::move(a), radius);
  return (v.array() - theta).cwiseMax(0.0).matrix();
}

double analog_objective(const Dataset& data, const LossSpec& spec, const Coefficients& beta,
                        const AnalogConfig& cfg) {
  const double l1 = l1_norm(beta);
  return empirical_loss(data, spec, beta) + cfg.lambda2 * l1 + 0.5 * cfg.gamma2 * l1 * l1;
}

Gradient analog_subgradient(const Dataset& data, const LossSpec& spec, const Coefficients& beta,
                            const AnalogConfig& cfg) {
  Gradient g = gradient(data, spec, beta);
  const double pen = cfg.lambda2 + cfg.gamma2 * l1_norm(beta);
  for (Index j = 0; j < beta.size(); ++j) {
    if (beta.beta[j] > 0.0)
      g.beta[j] += pen;
    else if (beta.beta[j] < 0.0)
      g.beta[j] -= pen;
  }
  return g;
}

namespace {

double kkt_from_gradient(const Coefficients& beta, const Gradient& g, double pen) {
  double r = 0.0;
  for (Index j = 0; j < beta.size(); ++j) {
    const double b = beta.beta[j];
    if (b != 0.0)
      r = std::max(r, std::abs(g.beta[j] + (b > 0.0 ? pen : -pen)));
    else
      r = std::max(r, std::abs(g.beta[j]) - pen);
  }
  if (beta.intercept) r = std::max(r, std::abs(g.intercept));
  return r;
}

double gap_from_gradient(const Coefficients& beta, const Gradient& g, double band) {
  double sup = g.beta.size() ? g.beta.cwiseAbs().maxCoeff() : 0.0;
  double gap = std::max(0.0, sup - band);
  if (beta.intercept) gap = std::max(gap, std::abs(g.intercept));
  return gap;
}

}  // namespace

double kkt_check(const Dataset& data, const LossSpec& spec, const Coefficients& beta,
                 const AnalogConfig& cfg) {
  Gradient g = gradient(data, spec, beta);
  return kkt_from_gradient(beta, g, cfg.lambda2 + cfg.gamma2 * l1_norm(beta));
}

namespace {

// Split-coordinate state: z = [u; v; b0?], beta = u - v.
class SplitProblem {
 public:
  SplitProblem(const Dataset& data, const LossSpec& spec, const AnalogConfig& cfg)
      : data_(data), spec_(spec), cfg_(cfg), p_(data.p()), icpt_(cfg.intercept) {}

  Index dim() const { return 2 * p_ + (icpt_ ? 1 : 0); }

  VectorXd beta_of(const VectorXd& z) const { return z.head(p_) - z.segment(p_, p_); }
  double b0_of(const VectorXd& z) const { return icpt_ ? z[2 * p_] : 0.0; }

  // Linear predictor of a direction or point.
  VectorXd predictor(const VectorXd& z) const {
    VectorXd t = data_.features * beta_of(z);
    if (icpt_) t.array() += z[2 * p_];
    return t;
  }

  double value(const VectorXd& z, const VectorXd& t) const {
    const double s = z.head(2 * p_).sum();
    return detail::mean_loss(spec_, t, data_.response) + cfg_.lambda2 * s + 0.5 * cfg_.gamma2 * s * s;
  }

  VectorXd grad(const VectorXd& z, const VectorXd& t) const {
    VectorXd d1;
    detail::per_sample_d1(spec_, t, data_.response, d1);
    const double n = static_cast<double>(data_.n());
    VectorXd S = data_.features.transpose() * d1 / n;
    const double pen = cfg_.lambda2 + cfg_.gamma2 * z.head(2 * p_).sum();
    VectorXd g(dim());
    g.head(p_) = S.array() + pen;
    g.segment(p_, p_) = (-S).array() + pen;
    if (icpt_) g[2 * p_] = d1.sum() / n;
    return g;
  }

  VectorXd project(const VectorXd& z) const {
    VectorXd out(dim());
    out.head(2 * p_) = project_capped_simplex(z.head(2 * p_), cfg_.radius);
    if (icpt_) out[2 * p_] = z[2 * p_];
    return out;
  }

  VectorXd from_coefficients(const Coefficients& c) const {
    VectorXd z = VectorXd::Zero(dim());
    z.head(p_) = c.beta.cwiseMax(0.0);
    z.segment(p_, p_) = (-c.beta).cwiseMax(0.0);
    if (icpt_) z[2 * p_] = c.intercept_or_zero();
    return project(z);
  }

 private:
  const Dataset& data_;
  const LossSpec& spec_;
  const AnalogConfig& cfg_;
  Index p_;
  bool icpt_;
};

}  // namespace

FitResult spg_fit(const Dataset& data, const LossSpec& spec, const AnalogConfig& cfg) {
  data.validate();
  cfg.validate();
  check_labels(data, spec);
  FitResult res;
  if (!data.standardized) res.warnings.push_back("design matrix is not standardized");

  SplitProblem prob(data, spec, cfg);
  VectorXd z = VectorXd::Zero(prob.dim());
  if (cfg.init) {
    if (cfg.init->size() != data.p()) throw Error("warm start length does not match p");
    z = prob.from_coefficients(*cfg.init);
  }
  VectorXd t = prob.predictor(z);
  double f = prob.value(z, t);
  VectorXd g = prob.grad(z, t);

  const auto clamp_step = [&](double a) { return std::clamp(a, cfg.alpha_min, cfg.alpha_max); };
  double ginf = g.cwiseAbs().maxCoeff();
  double alpha = clamp_step(ginf > 0.0 ? 1.0 / ginf : cfg.alpha_max);

  std::deque<double> history{f};
  res.trajectory.push_back(f);
  int it = 0;
  bool converged = false;
  for (; it < cfg.max_iter; ++it) {
    VectorXd pg = prob.project(z - g) - z;
    if (pg.cwiseAbs().maxCoeff() <= cfg.grad_tol) {
      converged = true;
      break;
    }
    VectorXd d = prob.project(z - alpha * g) - z;
    const double gtd = g.dot(d);
    const double fmax = *std::max_element(history.begin(), history.end());
    VectorXd td = prob.predictor(d);

    double lam = 1.0;
    double fnew = 0.0;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      VectorXd tn = t + lam * td;
      fnew = prob.value(z + lam * d, tn);
      if (!std::isfinite(fnew)) {
        res.diagnostic = "non-finite objective during line search at iteration " + std::to_string(it);
        break;
      }
      if (fnew <= fmax + cfg.delta * lam * gtd) {
        accepted = true;
        break;
      }
      const double denom = fnew - f - lam * gtd;
      double lt = denom > 0.0 ? -0.5 * lam * lam * gtd / denom : 0.5 * lam;
      if (lt < 0.1 * lam || lt > 0.9 * lam) lt = 0.5 * lam;
      lam = lt;
    }
    if (!accepted) {
      if (res.diagnostic.empty())
        res.diagnostic = "line search failed to find an acceptable step at iteration " + std::to_string(it);
      break;
    }
    VectorXd s = lam * d;
    z += s;
    t += lam * td;
    f = fnew;
    VectorXd gnew = prob.grad(z, t);
    const double sty = s.dot(gnew - g);
    alpha = sty > 0.0 ? clamp_step(s.squaredNorm() / sty) : cfg.alpha_max;
    g = std::move(gnew);
    history.push_back(f);
    if (static_cast<int>(history.size()) > cfg.memory) history.pop_front();
    res.trajectory.push_back(f);
  }

  if (converged) {
    // Coordinates the unit projected step sends to zero and that already sit
    // within grad_tol of zero are snapped to exact zeros.
    VectorXd zp = prob.project(z - g);
    for (Index j = 0; j < 2 * data.p(); ++j)
      if (zp[j] == 0.0 && z[j] <= cfg.grad_tol) z[j] = 0.0;
  }

  res.coefficients.beta = prob.beta_of(z);
  if (cfg.intercept) res.coefficients.intercept = prob.b0_of(z);
  res.iterations = it;
  res.converged = converged;
  if (!converged && res.diagnostic.empty())
    res.diagnostic = "max_iter " + std::to_string(cfg.max_iter) + " reached";

  const Coefficients& c = res.coefficients;
  Gradient grad_final = gradient(data, spec, c);
  const double l1 = l1_norm(c);
  const double pen = cfg.lambda2 + cfg.gamma2 * l1;
  res.objective = empirical_loss(data, spec, c) + cfg.lambda2 * l1 + 0.5 * cfg.gamma2 * l1 * l1;
  res.kkt_residual = kkt_from_gradient(c, grad_final, pen);
  res.feasibility_gap = gap_from_gradient(c, grad_final, pen);
  return res;
}

}  // namespace mullkit
