#include "mullkit/selection.hpp"

#include "mullkit/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <thread>

namespace mullkit {

Coefficients threshold_estimate(const Coefficients& beta, double fraction) {
  if (!(fraction >= 0.0 && fraction < 1.0)) throw Error("threshold fraction must lie in [0,1)");
  Coefficients out = beta;
  if (fraction == 0.0 || beta.size() == 0) return out;
  const double cut = fraction * beta.beta.cwiseAbs().maxCoeff();
  for (Index j = 0; j < out.size(); ++j)
    if (std::abs(out.beta[j]) <= cut) out.beta[j] = 0.0;
  return out;
}

ClassificationScores classification_metrics(const VectorXd& predicted, const VectorXd& truth) {
  if (predicted.size() != truth.size()) throw Error("prediction and label lengths differ");
  if (truth.size() == 0) throw Error("no labels to score");
  Index tp = 0, fp = 0, fn = 0, correct = 0;
  for (Index i = 0; i < truth.size(); ++i) {
    const bool p = predicted[i] == 1.0, t = truth[i] == 1.0;
    if (p == t) ++correct;
    if (p && t) ++tp;
    if (p && !t) ++fp;
    if (!p && t) ++fn;
  }
  ClassificationScores s;
  s.accuracy = static_cast<double>(correct) / static_cast<double>(truth.size());
  s.precision = tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
  s.recall = tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
  s.f1 = s.precision + s.recall > 0.0 ? 2.0 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
  return s;
}

SupportScores support_metrics(const Coefficients& estimate, const Coefficients& truth) {
  if (estimate.size() != truth.size()) throw Error("estimate and truth lengths differ");
  SupportScores s;
  for (Index j = 0; j < truth.size(); ++j) {
    const bool on = truth.beta[j] != 0.0, hat = estimate.beta[j] != 0.0;
    if (on && !hat) ++s.fn;
    if (!on && hat) ++s.fp;
    s.l1_error += std::abs(estimate.beta[j] - truth.beta[j]);
  }
  return s;
}

double check_loss(const VectorXd& predicted, const VectorXd& truth, double tau) {
  if (predicted.size() != truth.size()) throw Error("prediction and response lengths differ");
  if (!(tau > 0.0 && tau < 1.0)) throw Error("check loss requires 0 < tau < 1");
  if (truth.size() == 0) throw Error("no responses to score");
  double s = 0.0;
  for (Index i = 0; i < truth.size(); ++i) {
    const double u = truth[i] - predicted[i];
    s += u * (tau - (u < 0.0 ? 1.0 : 0.0));
  }
  return s / static_cast<double>(truth.size());
}

VectorXd predict_labels(const MatrixXd& features, const Coefficients& coefs) {
  VectorXd t = linear_predictor(features, coefs);
  return (t.array() > 0.0).cast<double>().matrix();
}

std::string to_string(Method m) {
  switch (m) {
    case Method::Muc: return "muc";
    case Method::Analog: return "analog";
    case Method::Hybrid: return "hybrid";
  }
  return "?";
}

Method parse_method(const std::string& s) {
  if (s == "muc") return Method::Muc;
  if (s == "analog") return Method::Analog;
  if (s == "hybrid") return Method::Hybrid;
  throw Error("unknown method '" + s + "' (expected muc, analog or hybrid)");
}

FitResult fit_method(const Dataset& data, const LossSpec& spec, Method method, double lambda,
                     double gamma, const MethodOptions& opts, const std::optional<Coefficients>& warm) {
  AnalogConfig a = opts.analog;
  a.lambda2 = lambda;
  a.gamma2 = gamma;
  a.intercept = opts.intercept;
  MucConfig m = opts.muc;
  m.lambda = lambda;
  m.gamma = gamma;
  m.intercept = opts.intercept;
  m.analog = opts.analog;
  switch (method) {
    case Method::Analog:
      a.init = warm;
      return spg_fit(data, spec, a);
    case Method::Muc:
      if (warm) m.init = warm;
      return muc_fit(data, spec, m);
    case Method::Hybrid:
      a.init.reset();
      return hybrid_fit(data, spec, a, m, std::min(opts.hybrid_keep, data.p()));
  }
  throw Error("unknown method");
}

void CvGrid::validate(Index n) const {
  if (lambda_multipliers.empty() || gamma_multipliers.empty() || threshold_fractions.empty())
    throw Error("cross-validation grids must be non-empty");
  for (double v : lambda_multipliers)
    if (!(v > 0.0)) throw Error("lambda multipliers must be positive");
  for (double v : gamma_multipliers)
    if (!(v >= 0.0)) throw Error("gamma multipliers must be nonnegative");
  for (double v : threshold_fractions)
    if (!(v >= 0.0 && v < 1.0)) throw Error("threshold fractions must lie in [0,1)");
  if (folds < 2) throw Error("need at least 2 folds");
  if (folds > n) throw Error("more folds than samples");
}

double lambda_scale(Index n, Index p) {
  return std::sqrt(std::log(static_cast<double>(std::max<Index>(p, 2))) / static_cast<double>(n));
}

double gamma_scale(Index n) {
  return std::sqrt(std::log(static_cast<double>(std::max<Index>(n, 2))) / static_cast<double>(n));
}

std::vector<int> make_folds(const Dataset& data, int folds, std::uint64_t seed) {
  const Index n = data.n();
  if (folds < 2 || folds > n) throw Error("invalid fold count");
  Rng rng(seed);
  std::vector<int> assign(static_cast<std::size_t>(n), 0);
  // Strata: one per label for binary tasks, one overall for quantile tasks.
  std::map<double, std::vector<Index>> strata;
  for (Index i = 0; i < n; ++i) strata[data.task == Task::Binary ? data.response[i] : 0.0].push_back(i);
  int offset = 0;
  for (auto& [label, rows] : strata) {
    rng.shuffle(rows);
    for (std::size_t k = 0; k < rows.size(); ++k)
      assign[static_cast<std::size_t>(rows[k])] = static_cast<int>((k + static_cast<std::size_t>(offset)) % static_cast<std::size_t>(folds));
    offset = static_cast<int>((rows.size() + static_cast<std::size_t>(offset)) % static_cast<std::size_t>(folds));
  }
  return assign;
}

namespace {

double held_out_criterion(const Dataset& test, const LossSpec& spec, const Coefficients& c) {
  if (test.task == Task::Binary) {
    VectorXd pred = predict_labels(test.features, c);
    Index wrong = 0;
    for (Index i = 0; i < test.n(); ++i)
      if ((pred[i] == 1.0) != (test.response[i] == 1.0)) ++wrong;
    return static_cast<double>(wrong) / static_cast<double>(test.n());
  }
  return check_loss(linear_predictor(test.features, c), test.response, spec.tau());
}

std::vector<double> unique_desc(std::vector<double> v) {
  std::sort(v.begin(), v.end(), std::greater<double>());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

std::size_t index_of(const std::vector<double>& v, double x) {
  return static_cast<std::size_t>(std::find(v.begin(), v.end(), x) - v.begin());
}

}  // namespace

CvResult cv_tune(const Dataset& data, const LossSpec& spec, Method method, const CvGrid& grid,
                 const MethodOptions& opts, int jobs) {
  data.validate();
  grid.validate(data.n());
  const double ls = lambda_scale(data.n(), data.p());
  const double gs = gamma_scale(data.n());
  const std::vector<double> lam = unique_desc(grid.lambda_multipliers);
  const std::vector<double> gam = unique_desc(grid.gamma_multipliers);
  const std::vector<double> thr = unique_desc(grid.threshold_fractions);
  const std::vector<int> assign = make_folds(data, grid.folds, grid.seed);
  const double inf = std::numeric_limits<double>::infinity();

  // scores[fold][gamma][lambda][threshold]
  using Cube = std::vector<std::vector<std::vector<double>>>;
  std::vector<Cube> scores(static_cast<std::size_t>(grid.folds),
                           Cube(gam.size(), std::vector<std::vector<double>>(
                                                lam.size(), std::vector<double>(thr.size(), inf))));

  auto run_fold = [&](int k) {
    std::vector<Index> train, test;
    for (Index i = 0; i < data.n(); ++i) (assign[static_cast<std::size_t>(i)] == k ? test : train).push_back(i);
    Dataset tr = subset_rows(data, train), te = subset_rows(data, test);
    for (std::size_t gi = 0; gi < gam.size(); ++gi) {
      std::optional<Coefficients> warm;
      for (std::size_t li = 0; li < lam.size(); ++li) {
        try {
          FitResult fit = fit_method(tr, spec, method, lam[li] * ls, gam[gi] * gs, opts,
                                     method == Method::Analog ? warm : std::nullopt);
          warm = fit.coefficients;
          for (std::size_t ti = 0; ti < thr.size(); ++ti)
            scores[static_cast<std::size_t>(k)][gi][li][ti] =
                held_out_criterion(te, spec, threshold_estimate(fit.coefficients, thr[ti]));
        } catch (const Error&) {
          // Failed grid points keep an infinite criterion.
        }
      }
    }
  };

  jobs = std::max(1, std::min(jobs, grid.folds));
  if (jobs == 1) {
    for (int k = 0; k < grid.folds; ++k) run_fold(k);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < jobs; ++w)
      pool.emplace_back([&, w] {
        for (int k = w; k < grid.folds; k += jobs) run_fold(k);
      });
    for (auto& th : pool) th.join();
  }

  CvResult out;
  bool have_best = false;
  auto better = [](const CvRow& a, const CvRow& b) {
    const double tol = 1e-12;
    if (a.score < b.score - tol) return true;
    if (a.score > b.score + tol) return false;
    if (a.lambda_multiplier != b.lambda_multiplier) return a.lambda_multiplier > b.lambda_multiplier;
    if (a.gamma_multiplier != b.gamma_multiplier) return a.gamma_multiplier > b.gamma_multiplier;
    return a.threshold > b.threshold;
  };
  for (double lm : grid.lambda_multipliers) {
    for (double gm : grid.gamma_multipliers) {
      for (double tf : grid.threshold_fractions) {
        const std::size_t li = index_of(lam, lm), gi = index_of(gam, gm), ti = index_of(thr, tf);
        CvRow row{lm, gm, tf, lm * ls, gm * gs, 0.0, 0};
        for (int k = 0; k < grid.folds; ++k) {
          double s = scores[static_cast<std::size_t>(k)][gi][li][ti];
          if (!std::isfinite(s)) ++row.failed_folds;
          row.score += s;
        }
        row.score = row.failed_folds > 0 ? inf : row.score / grid.folds;
        if (!have_best || better(row, out.best)) {
          out.best = row;
          have_best = true;
        }
        out.table.push_back(row);
      }
    }
  }
  return out;
}

TunedFit tune_and_fit(const Dataset& data, const LossSpec& spec, Method method, const CvGrid& grid,
                      const MethodOptions& opts, int jobs) {
  TunedFit out;
  out.cv = cv_tune(data, spec, method, grid, opts, jobs);
  out.fit = fit_method(data, spec, method, out.cv.best.lambda, out.cv.best.gamma, opts);
  out.fit.coefficients = threshold_estimate(out.fit.coefficients, out.cv.best.threshold);
  return out;
}

}  // namespace mullkit
