#pragma once

#include "mullkit/losses.hpp"
#include "mullkit/selection.hpp"
#include "mullkit/simgen.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace mullkit {

/// One benchmarked estimator, written "<family>.<loss>": family is muc, analog,
/// hybrid or nocorr (the analog solver with gamma fixed at zero and no
/// thresholding, i.e. a plain L1 fit); loss is logistic, smhinge or qr.
struct BenchMethod {
  std::string label;
  Method method = Method::Analog;
  LossKind loss = LossKind::Logistic;
  bool no_correction = false;
};

BenchMethod parse_bench_method(const std::string& label);

struct BenchPlan {
  SchemeSpec scheme;
  std::vector<BenchMethod> methods;
  int replicates = 10;
  std::vector<double> quantiles;  // heterogeneous scheme only; empty means scheme.tau
  CvGrid grid;                    // nocorr methods use gamma {0} and threshold {0}
  MethodOptions options;
  std::optional<bool> intercept;  // default: on for quantile tasks, off otherwise
  double sigma2 = 4.0;
  std::optional<double> bandwidth;  // default_bandwidth(tau, n, p) when unset
  Kernel kernel = Kernel::Gaussian;
  int jobs = 1;

  void validate() const;
  std::vector<double> settings() const;
};

struct ReplicateRecord {
  int replicate = 0;
  double tau = 0.0;
  std::string method;
  bool ok = false;
  std::string error;
  MetricReport metrics;
  CvRow selected;
  bool converged = false;
  double seconds = 0.0;
};

struct SummaryRow {
  std::string scheme;
  Index n = 0;
  Index p = 0;
  double sigma_u = 0.0;
  std::string noise;
  std::optional<double> tau;
  std::string method;
  std::string metric;
  int count = 0;
  int failed = 0;
  double mean = 0.0;
  double median = 0.0;
  std::optional<double> se;  // absent with a single replicate
};

struct BenchResult {
  std::vector<ReplicateRecord> records;  // ordered by (setting, replicate, method)
  std::vector<SummaryRow> summary;
  bool failed = false;  // some (method, setting) lost more than 20% of replicates
  std::string message;

  // Records of one method at one setting, by replicate index.
  std::vector<const ReplicateRecord*> select(const std::string& method, double tau) const;
};

// Seeds of replicate r: training draw and the independent test draw of the same size.
std::uint64_t train_seed(std::uint64_t base, int replicate);
std::uint64_t test_seed(std::uint64_t base, int replicate);

LossSpec bench_loss(const BenchPlan& plan, LossKind kind, double tau);

// Support and L1 error against the truth; accuracy and F1, or check loss, on the test draw.
MetricReport evaluate_fit(const Coefficients& estimate, const SimReplicate& train,
                          const SimReplicate& test, double tau);

// Fits and scores one method on one replicate. Failures are returned, not thrown.
ReplicateRecord run_replicate(const BenchPlan& plan, const BenchMethod& method, const SimReplicate& train,
                              const SimReplicate& test, int replicate, double tau);

BenchResult run_bench(const BenchPlan& plan);

void write_bench_csv(std::ostream& os, const BenchResult& result);
void write_bench_text(std::ostream& os, const BenchResult& result);
void write_replicates_csv(std::ostream& os, const BenchResult& result);

}  // namespace mullkit
