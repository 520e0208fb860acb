#include "mullkit/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>

namespace mullkit {

BenchMethod parse_bench_method(const std::string& label) {
  const auto dot = label.find('.');
  if (dot == std::string::npos) throw Error("bench method '" + label + "' must look like family.loss");
  const std::string family = label.substr(0, dot), loss = label.substr(dot + 1);
  BenchMethod m;
  m.label = label;
  if (family == "nocorr") {
    m.method = Method::Analog;
    m.no_correction = true;
  } else {
    m.method = parse_method(family);
  }
  if (loss == "logistic")
    m.loss = LossKind::Logistic;
  else if (loss == "smhinge")
    m.loss = LossKind::SmoothHinge;
  else if (loss == "qr")
    m.loss = LossKind::Conquer;
  else
    throw Error("unknown bench loss '" + loss + "' (expected logistic, smhinge or qr)");
  return m;
}

void BenchPlan::validate() const {
  scheme.validate();
  if (replicates < 1) throw Error("replicates must be at least 1");
  if (methods.empty()) throw Error("bench needs at least one method");
  for (const auto& m : methods) {
    const bool quantile = m.loss == LossKind::Conquer;
    if (quantile != (scheme.task() == Task::Quantile))
      throw Error("method " + m.label + " does not match the task of scheme " + to_string(scheme.scheme));
  }
  for (double t : quantiles)
    if (!(t > 0.0 && t < 1.0)) throw Error("quantile levels must lie in (0,1)");
  grid.validate(scheme.n - scheme.n / grid.folds);
}

std::vector<double> BenchPlan::settings() const {
  if (scheme.task() != Task::Quantile) return {scheme.tau};
  return quantiles.empty() ? std::vector<double>{scheme.tau} : quantiles;
}

std::vector<const ReplicateRecord*> BenchResult::select(const std::string& method, double tau) const {
  std::vector<const ReplicateRecord*> out;
  for (const auto& r : records)
    if (r.method == method && r.tau == tau) out.push_back(&r);
  return out;
}

std::uint64_t train_seed(std::uint64_t base, int replicate) {
  return Rng(base).child(static_cast<std::uint64_t>(replicate)).child(0).seed();
}

std::uint64_t test_seed(std::uint64_t base, int replicate) {
  return Rng(base).child(static_cast<std::uint64_t>(replicate)).child(1).seed();
}

LossSpec bench_loss(const BenchPlan& plan, LossKind kind, double tau) {
  switch (kind) {
    case LossKind::Logistic: return LossSpec::logistic();
    case LossKind::SmoothHinge: return LossSpec::smooth_hinge(plan.sigma2);
    case LossKind::Conquer:
      return LossSpec::conquer(tau, plan.bandwidth.value_or(default_bandwidth(tau, plan.scheme.n, plan.scheme.p)),
                               plan.kernel);
  }
  throw Error("unknown loss");
}

MetricReport evaluate_fit(const Coefficients& estimate, const SimReplicate& train, const SimReplicate& test,
                          double tau) {
  MetricReport m;
  SupportScores s = support_metrics(estimate, train.beta);
  m.fn_count = s.fn;
  m.fp_count = s.fp;
  m.l1_error = s.l1_error;
  if (test.task == Task::Binary) {
    ClassificationScores c = classification_metrics(predict_labels(test.w, estimate), test.y);
    m.accuracy = c.accuracy;
    m.f1 = c.f1;
  } else {
    m.check_loss = check_loss(linear_predictor(test.w, estimate), test.y, tau);
  }
  return m;
}

ReplicateRecord run_replicate(const BenchPlan& plan, const BenchMethod& method, const SimReplicate& train,
                              const SimReplicate& test, int replicate, double tau) {
  ReplicateRecord rec;
  rec.replicate = replicate;
  rec.tau = tau;
  rec.method = method.label;
  const auto start = std::chrono::steady_clock::now();
  try {
    const LossSpec spec = bench_loss(plan, method.loss, tau);
    Dataset data = standardize(to_loss_encoding(train.dataset(), spec));
    MethodOptions opts = plan.options;
    opts.intercept = plan.intercept.value_or(train.task == Task::Quantile);
    CvGrid grid = plan.grid;
    if (method.no_correction) {
      grid.gamma_multipliers = {0.0};
      grid.threshold_fractions = {0.0};
    }
    TunedFit tuned = tune_and_fit(data, spec, method.method, grid, opts, 1);
    rec.selected = tuned.cv.best;
    rec.converged = tuned.fit.converged;
    rec.metrics = evaluate_fit(unstandardize(tuned.fit.coefficients, data), train, test, tau);
    rec.ok = true;
  } catch (const std::exception& e) {
    rec.error = e.what();
  }
  rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

namespace {

std::string noise_name(const SchemeSpec& s) {
  if (s.scheme != Scheme::QuantileHet) return "-";
  return s.noise == NoiseDist::Normal ? "normal" : "t2";
}

void summarize(const std::vector<double>& v, SummaryRow& row) {
  row.count = static_cast<int>(v.size());
  if (v.empty()) return;
  double sum = 0.0;
  for (double x : v) sum += x;
  row.mean = sum / static_cast<double>(v.size());
  std::vector<double> s = v;
  std::sort(s.begin(), s.end());
  const std::size_t k = s.size();
  row.median = k % 2 ? s[k / 2] : 0.5 * (s[k / 2 - 1] + s[k / 2]);
  if (k > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - row.mean) * (x - row.mean);
    row.se = std::sqrt(ss / static_cast<double>(k - 1) / static_cast<double>(k));
  }
}

}  // namespace

BenchResult run_bench(const BenchPlan& plan) {
  plan.validate();
  const std::vector<double> taus = plan.settings();
  const std::size_t nm = plan.methods.size(), nr = static_cast<std::size_t>(plan.replicates);
  const std::size_t units = taus.size() * nr;
  BenchResult result;
  result.records.resize(units * nm);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t u = next++; u < units; u = next++) {
      const double tau = taus[u / nr];
      const int r = static_cast<int>(u % nr);
      SchemeSpec spec = plan.scheme;
      spec.tau = tau;
      spec.seed = train_seed(plan.scheme.seed, r);
      SimReplicate train = gen_scheme(spec);
      spec.seed = test_seed(plan.scheme.seed, r);
      SimReplicate test = gen_scheme(spec);
      for (std::size_t m = 0; m < nm; ++m)
        result.records[u * nm + m] = run_replicate(plan, plan.methods[m], train, test, r, tau);
    }
  };
  const int jobs = std::max(1, std::min<int>(plan.jobs, static_cast<int>(units)));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  const bool quantile = plan.scheme.task() == Task::Quantile;
  std::vector<std::string> metrics{"FN", "FP", "L1"};
  if (quantile)
    metrics.push_back("Check");
  else {
    metrics.push_back("Accuracy");
    metrics.push_back("F1");
  }
  std::ostringstream msg;
  for (double tau : taus) {
    for (const auto& m : plan.methods) {
      auto recs = result.select(m.label, tau);
      int failed = 0;
      for (auto* r : recs) failed += r->ok ? 0 : 1;
      if (failed * 5 > static_cast<int>(recs.size())) {
        result.failed = true;
        msg << m.label << (quantile ? " at tau=" + std::to_string(tau) : std::string()) << ": " << failed
            << " of " << recs.size() << " replicates failed; ";
      }
      for (const auto& name : metrics) {
        std::vector<double> vals;
        for (auto* r : recs) {
          if (!r->ok) continue;
          const MetricReport& mr = r->metrics;
          if (name == "FN") vals.push_back(static_cast<double>(mr.fn_count));
          else if (name == "FP") vals.push_back(static_cast<double>(mr.fp_count));
          else if (name == "L1") vals.push_back(mr.l1_error);
          else if (name == "Accuracy") vals.push_back(*mr.accuracy);
          else if (name == "F1") vals.push_back(*mr.f1);
          else vals.push_back(*mr.check_loss);
        }
        SummaryRow row;
        row.scheme = to_string(plan.scheme.scheme);
        row.n = plan.scheme.n;
        row.p = plan.scheme.p;
        row.sigma_u = plan.scheme.sigma_u;
        row.noise = noise_name(plan.scheme);
        if (quantile) row.tau = tau;
        row.method = m.label;
        row.metric = name;
        row.failed = failed;
        summarize(vals, row);
        result.summary.push_back(row);
      }
    }
  }
  result.message = msg.str();
  return result;
}

namespace {

std::string fmt(double v, int digits = 4) {
  std::ostringstream s;
  s << std::setprecision(digits) << std::fixed << v;
  return s.str();
}

}  // namespace

void write_bench_csv(std::ostream& os, const BenchResult& result) {
  os << "scheme,n,p,sigma_u,noise,tau,method,metric,replicates,failed,mean,median,se\n";
  for (const auto& r : result.summary) {
    os << r.scheme << ',' << r.n << ',' << r.p << ',' << fmt(r.sigma_u, 3) << ',' << r.noise << ','
       << (r.tau ? fmt(*r.tau, 3) : "") << ',' << r.method << ',' << r.metric << ',' << r.count << ','
       << r.failed << ',' << fmt(r.mean, 6) << ',' << fmt(r.median, 6) << ',' << (r.se ? fmt(*r.se, 6) : "")
       << '\n';
  }
}

void write_bench_text(std::ostream& os, const BenchResult& result) {
  std::vector<std::vector<std::string>> rows{
      {"scheme", "p", "sigma_u", "noise", "tau", "method", "metric", "mean", "median", "se", "ok/failed"}};
  for (const auto& r : result.summary)
    rows.push_back({r.scheme, std::to_string(r.p), fmt(r.sigma_u, 2), r.noise, r.tau ? fmt(*r.tau, 2) : "-",
                    r.method, r.metric, fmt(r.mean, 3), fmt(r.median, 3), r.se ? fmt(*r.se, 3) : "-",
                    std::to_string(r.count) + "/" + std::to_string(r.failed)});
  std::vector<std::size_t> width(rows[0].size(), 0);
  for (const auto& row : rows)
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) os << "  ";
      os << std::setw(static_cast<int>(width[c])) << (c < 7 ? std::left : std::right) << row[c];
    }
    os << '\n';
  }
  if (!result.message.empty()) os << "failures: " << result.message << '\n';
}

void write_replicates_csv(std::ostream& os, const BenchResult& result) {
  os << "replicate,tau,method,ok,fn,fp,l1_error,accuracy,f1,check_loss,lambda_mult,gamma_mult,threshold,"
        "converged,seconds,error\n";
  for (const auto& r : result.records) {
    const MetricReport& m = r.metrics;
    std::string err = r.error;
    std::replace(err.begin(), err.end(), ',', ';');
    os << r.replicate << ',' << fmt(r.tau, 3) << ',' << r.method << ',' << (r.ok ? 1 : 0) << ',' << m.fn_count
       << ',' << m.fp_count << ',' << fmt(m.l1_error, 6) << ',' << (m.accuracy ? fmt(*m.accuracy, 6) : "")
       << ',' << (m.f1 ? fmt(*m.f1, 6) : "") << ',' << (m.check_loss ? fmt(*m.check_loss, 6) : "") << ','
       << r.selected.lambda_multiplier << ',' << r.selected.gamma_multiplier << ',' << r.selected.threshold
       << ',' << (r.converged ? 1 : 0) << ',' << fmt(r.seconds, 3) << ',' << err << '\n';
  }
}

}  // namespace mullkit
