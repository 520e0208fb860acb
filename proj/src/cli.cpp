#include "mullkit/cli.hpp"

#include "mullkit/bench.hpp"
#include "mullkit/io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <thread>

namespace mullkit {

namespace {

using Json = nlohmann::ordered_json;

struct LossArgs {
  std::string loss = "logistic";
  double sigma2 = 4.0;
  double tau = 0.5;
  double bandwidth = 0.0;  // 0 selects the default rule
  std::string kernel = "gaussian";

  void add(CLI::App* app) {
    app->add_option("--loss", loss, "logistic | smooth-hinge | conquer")
        ->check(CLI::IsMember({"logistic", "smooth-hinge", "conquer"}));
    app->add_option("--sigma2", sigma2, "smooth hinge smoothing parameter")->check(CLI::PositiveNumber);
    app->add_option("--tau", tau, "quantile level for conquer")->check(CLI::Range(0.0, 1.0));
    app->add_option("--bandwidth", bandwidth, "conquer bandwidth (default: data-driven rule)");
    app->add_option("--kernel", kernel, "conquer kernel")->check(CLI::IsMember({"gaussian", "uniform"}));
  }

  Task task() const { return loss == "conquer" ? Task::Quantile : Task::Binary; }

  LossSpec build(Index n, Index p) const {
    if (loss == "logistic") return LossSpec::logistic();
    if (loss == "smooth-hinge") return LossSpec::smooth_hinge(sigma2);
    const double h = bandwidth > 0.0 ? bandwidth : default_bandwidth(tau, n, p);
    return LossSpec::conquer(tau, h, kernel == "uniform" ? Kernel::Uniform : Kernel::Gaussian);
  }
};

struct SolverArgs {
  std::string method = "analog";
  std::optional<double> lambda, gamma, lambda2, gamma2;
  double radius = 50.0;
  std::optional<int> max_iter;
  std::optional<double> tol;
  std::string warm_start = "analog";
  Index keep = 1000;
  bool intercept = false;
  CLI::Option* intercept_opt = nullptr;
  Index curvature_cap = kDefaultCurvatureCap;

  void add(CLI::App* app, bool penalties) {
    app->add_option("--method", method, "muc | analog | hybrid")->check(CLI::IsMember({"muc", "analog", "hybrid"}));
    if (penalties) {
      app->add_option("--lambda", lambda, "feasible-set level (default sqrt(log p / n))");
      app->add_option("--gamma", gamma, "noise correction (default 0.5 sqrt(log n / n))");
      app->add_option("--lambda2", lambda2, "analog L1 penalty (default: --lambda)");
      app->add_option("--gamma2", gamma2, "analog squared-L1 penalty (default: --gamma)");
    }
    app->add_option("--radius", radius, "analog L1-ball radius")->check(CLI::PositiveNumber);
    app->add_option("--max-iter", max_iter, "iteration cap (SPG iterations or MUC outer iterations)");
    app->add_option("--tol", tol, "convergence tolerance (SPG residual or MUC step)");
    app->add_option("--warm-start", warm_start, "MUC starting point")->check(CLI::IsMember({"analog", "zero"}));
    app->add_option("--keep", keep, "hybrid: predictors kept after screening")->check(CLI::PositiveNumber);
    app->add_option("--curvature-cap", curvature_cap, "largest p for which MUC builds the curvature matrix");
    intercept_opt = app->add_flag("--intercept,!--no-intercept", intercept,
                                  "fit an unpenalized intercept (default: on for conquer, off otherwise)");
  }

  MethodOptions options(Task task) const {
    MethodOptions o;
    o.intercept = intercept_opt && intercept_opt->count() ? intercept : task == Task::Quantile;
    o.analog.radius = radius;
    o.muc.warm_start = warm_start == "zero" ? WarmStart::Zero : WarmStart::Analog;
    o.muc.curvature_cap = curvature_cap;
    o.hybrid_keep = keep;
    const Method m = parse_method(method);
    if (m == Method::Analog) {
      if (max_iter) o.analog.max_iter = *max_iter;
      if (tol) o.analog.grad_tol = *tol;
    } else {
      if (max_iter) o.muc.max_outer_iter = *max_iter;
      if (tol) o.muc.step_tol = *tol;
    }
    return o;
  }
};

struct DataArgs {
  std::string path;
  std::string response = "y";

  void add(CLI::App* app) {
    app->add_option("--data", path, "input CSV (header row)");
    app->add_option("--response", response, "response column name");
  }
};

// Values from a flat key=value file for options not given on the command line.
void apply_config(CLI::App* app, const std::string& path) {
  for (const auto& [key, value] : read_key_values_file(path)) {
    CLI::Option* opt = app->get_option_no_throw("--" + key);
    if (!opt) throw Error("config key '" + key + "' is not an option of '" + app->get_name() + "'");
    if (opt->count() > 0) continue;
    opt->add_result(value);
    opt->run_callback();
  }
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write '" + path + "'");
  return os;
}

Json coefficients_json(const Coefficients& c) {
  Json j = Json::array();
  for (Index k = 0; k < c.size(); ++k) j.push_back(c.beta[k]);
  return j;
}

Json optional_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

Json result_json(const FitResult& r) {
  Json j;
  j["objective"] = r.objective;
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  j["feasibility_gap"] = r.feasibility_gap;
  j["kkt_residual"] = optional_json(r.kkt_residual);
  j["nonzeros"] = r.coefficients.nonzeros();
  j["diagnostic"] = r.diagnostic;
  j["warnings"] = r.warnings;
  return j;
}

Json loss_json(const LossSpec& s) {
  Json j;
  j["name"] = s.name();
  if (s.kind() == LossKind::SmoothHinge) j["sigma2"] = s.sigma2();
  if (s.kind() == LossKind::Conquer) {
    j["tau"] = s.tau();
    j["bandwidth"] = s.bandwidth();
    j["kernel"] = s.kernel() == Kernel::Gaussian ? "gaussian" : "uniform";
  }
  return j;
}

Json options_json(const MethodOptions& o) {
  Json j;
  j["intercept"] = o.intercept;
  j["radius"] = o.analog.radius;
  j["spg_max_iter"] = o.analog.max_iter;
  j["spg_grad_tol"] = o.analog.grad_tol;
  j["muc_max_outer_iter"] = o.muc.max_outer_iter;
  j["muc_step_tol"] = o.muc.step_tol;
  j["warm_start"] = o.muc.warm_start == WarmStart::Analog ? "analog" : "zero";
  j["hybrid_keep"] = o.hybrid_keep;
  return j;
}

struct Prepared {
  Dataset raw;
  Dataset data;  // loss encoding, standardized
  LossSpec spec;
};

Prepared prepare(const DataArgs& d, const LossArgs& l) {
  if (d.path.empty()) throw Error("--data is required");
  Prepared p;
  p.raw = read_dataset_csv(d.path, l.task(), d.response);
  p.spec = l.build(p.raw.n(), p.raw.p());
  p.data = standardize(to_loss_encoding(p.raw, p.spec));
  check_labels(p.data, p.spec);
  return p;
}

void write_outputs(const Coefficients& coefs, const Dataset& raw, const std::string& coef_path,
                   const std::string& report_path, const Json& report, std::ostream& out) {
  if (coef_path.empty()) {
    write_coefficients_csv(out, coefs, raw.names);
  } else {
    auto os = open_out(coef_path);
    write_coefficients_csv(os, coefs, raw.names);
  }
  if (!report_path.empty()) {
    auto os = open_out(report_path);
    os << report.dump(2) << '\n';
  }
}

int default_jobs() {
  unsigned hc = std::thread::hardware_concurrency();
  return hc ? static_cast<int>(hc) : 1;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Measurement-error-robust sparse estimation for Lipschitz losses", "mullkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "mullkit 1.0.0");

  // simulate
  CLI::App* sim = app.add_subcommand("simulate", "generate a simulation replicate");
  std::string scheme = "s3", noise = "normal", sim_out, clean_out, beta_out;
  SchemeSpec sspec;
  sim->add_option("--scheme", scheme, "s1 | s2 | s3 | qhet")->check(CLI::IsMember({"s1", "s2", "s3", "qhet"}));
  sim->add_option("--n", sspec.n, "samples");
  sim->add_option("--p", sspec.p, "predictors");
  sim->add_option("--sigma-u", sspec.sigma_u, "measurement error sd");
  sim->add_option("--noise", noise, "qhet response noise")->check(CLI::IsMember({"normal", "t2"}));
  sim->add_option("--noise-sd", sspec.noise_sd, "sd of normal qhet noise");
  sim->add_option("--tau", sspec.tau, "qhet quantile level");
  sim->add_option("--seed", sspec.seed, "random seed");
  sim->add_option("--out", sim_out, "CSV of noisy features and response");
  sim->add_option("--clean-out", clean_out, "CSV of clean features and response");
  sim->add_option("--beta-out", beta_out, "true coefficients (index,name,value)");
  std::string sim_cfg;
  sim->add_option("--config", sim_cfg, "flat key=value defaults");

  // fit
  CLI::App* fit = app.add_subcommand("fit", "fit one estimator at fixed tuning parameters");
  DataArgs fit_data;
  LossArgs fit_loss;
  SolverArgs fit_solver;
  std::string fit_coef, fit_report, fit_cfg;
  std::uint64_t fit_seed = 1;
  fit_data.add(fit);
  fit_loss.add(fit);
  fit_solver.add(fit, true);
  fit->add_option("--seed", fit_seed, "recorded in the report; fitting is deterministic");
  fit->add_option("--out", fit_coef, "coefficient CSV (default: stdout)");
  fit->add_option("--report", fit_report, "JSON run report");
  fit->add_option("--config", fit_cfg, "flat key=value defaults");

  // cv
  CLI::App* cv = app.add_subcommand("cv", "cross-validate (lambda, gamma, threshold) and refit");
  DataArgs cv_data;
  LossArgs cv_loss;
  SolverArgs cv_solver;
  std::string cv_grid, cv_table, cv_coef, cv_report, cv_cfg;
  std::optional<int> cv_folds;
  std::optional<std::uint64_t> cv_seed;
  int cv_jobs = default_jobs();
  cv_data.add(cv);
  cv_loss.add(cv);
  cv_solver.add(cv, false);
  cv->add_option("--grid-file", cv_grid, "grid as key=list lines (lambda, gamma, threshold, folds, seed)");
  cv->add_option("--folds", cv_folds, "number of folds");
  cv->add_option("--seed", cv_seed, "fold assignment seed");
  cv->add_option("--jobs", cv_jobs, "worker threads")->envname("MULLKIT_JOBS");
  cv->add_option("--table", cv_table, "CV table CSV");
  cv->add_option("--out", cv_coef, "coefficient CSV (default: stdout)");
  cv->add_option("--report", cv_report, "JSON run report");
  cv->add_option("--config", cv_cfg, "flat key=value defaults");

  // bench
  CLI::App* bench = app.add_subcommand("bench", "Monte Carlo benchmark over replicates");
  std::string b_scheme = "s3", b_noise = "normal", b_grid, b_out, b_text, b_reps_out, b_cfg;
  std::vector<std::string> b_methods;
  std::vector<double> b_taus;
  SchemeSpec b_spec;
  int b_replicates = 10, b_jobs = default_jobs();
  bool full_scale = false;
  std::optional<double> b_bandwidth;
  double b_sigma2 = 4.0;
  bench->add_option("--scheme", b_scheme, "s1 | s2 | s3 | qhet")->check(CLI::IsMember({"s1", "s2", "s3", "qhet"}));
  bench->add_option("--n", b_spec.n, "training and test sample size");
  bench->add_option("--p", b_spec.p, "predictors");
  bench->add_option("--sigma-u", b_spec.sigma_u, "measurement error sd");
  bench->add_option("--noise", b_noise, "qhet response noise")->check(CLI::IsMember({"normal", "t2"}));
  bench->add_option("--quantiles", b_taus, "qhet quantile levels")->delimiter(',');
  bench->add_option("--methods", b_methods, "family.loss list, e.g. analog.logistic,nocorr.logistic")
      ->delimiter(',');
  bench->add_option("--replicates", b_replicates, "replicates per setting")->check(CLI::PositiveNumber);
  bench->add_option("--seed", b_spec.seed, "base seed");
  bench->add_option("--grid-file", b_grid, "CV grid file");
  bench->add_option("--sigma2", b_sigma2, "smooth hinge smoothing parameter");
  bench->add_option("--bandwidth", b_bandwidth, "conquer bandwidth (default: data-driven rule)");
  bench->add_option("--jobs", b_jobs, "worker threads")->envname("MULLKIT_JOBS");
  bench->add_flag("--full-scale", full_scale, "run p = 1000 and p = 5000");
  bench->add_option("--out", b_out, "summary CSV");
  bench->add_option("--text", b_text, "aligned text table (default: stdout)");
  bench->add_option("--replicates-out", b_reps_out, "per-replicate CSV");
  bench->add_option("--config", b_cfg, "flat key=value defaults");

  // lp solve
  CLI::App* lp = app.add_subcommand("lp", "linear programming utilities");
  lp->require_subcommand(1);
  CLI::App* lp_solve = lp->add_subcommand("solve", "solve min c'z s.t. Az <= b, z >= 0");
  std::string lp_file, lp_out;
  lp_solve->add_option("--file", lp_file, "triplet CSV block,row,col,value")->required();
  lp_solve->add_option("--out", lp_out, "JSON solution (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }

  try {
    if (sim->parsed()) {
      if (!sim_cfg.empty()) apply_config(sim, sim_cfg);
      if (sim_out.empty()) throw Error("simulate requires --out");
      sspec.scheme = parse_scheme(scheme);
      sspec.noise = parse_noise(noise);
      SimReplicate rep = gen_scheme(sspec);
      {
        auto os = open_out(sim_out);
        write_dataset_csv(os, rep.w, rep.y);
      }
      if (!clean_out.empty()) {
        auto os = open_out(clean_out);
        write_dataset_csv(os, rep.x, rep.y);
      }
      if (!beta_out.empty()) {
        auto os = open_out(beta_out);
        write_coefficients_csv(os, rep.beta);
      }
      return 0;
    }

    if (fit->parsed()) {
      if (!fit_cfg.empty()) apply_config(fit, fit_cfg);
      const auto start = std::chrono::steady_clock::now();
      Prepared P = prepare(fit_data, fit_loss);
      const Method method = parse_method(fit_solver.method);
      const MethodOptions opts = fit_solver.options(P.data.task);
      const Index n = P.data.n(), p = P.data.p();
      const double lambda = fit_solver.lambda.value_or(lambda_scale(n, p));
      const double gamma = fit_solver.gamma.value_or(0.5 * gamma_scale(n));
      const double lam = method == Method::Analog ? fit_solver.lambda2.value_or(lambda) : lambda;
      const double gam = method == Method::Analog ? fit_solver.gamma2.value_or(gamma) : gamma;
      FitResult r = fit_method(P.data, P.spec, method, lam, gam, opts);
      Coefficients coefs = unstandardize(r.coefficients, P.data);
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

      Json rep;
      rep["command"] = "fit";
      rep["data"] = fit_data.path;
      rep["n"] = n;
      rep["p"] = p;
      rep["method"] = to_string(method);
      rep["loss"] = loss_json(P.spec);
      rep["lambda"] = lam;
      rep["gamma"] = gam;
      rep["seed"] = fit_seed;
      rep["options"] = options_json(opts);
      rep["result"] = result_json(r);
      rep["certificates_scale"] = "standardized";
      rep["coefficients"] = coefficients_json(coefs);
      rep["intercept"] = optional_json(coefs.intercept);
      rep["timing"] = {{"seconds", secs}};
      write_outputs(coefs, P.raw, fit_coef, fit_report, rep, out);
      return 0;
    }

    if (cv->parsed()) {
      if (!cv_cfg.empty()) apply_config(cv, cv_cfg);
      const auto start = std::chrono::steady_clock::now();
      Prepared P = prepare(cv_data, cv_loss);
      const Method method = parse_method(cv_solver.method);
      const MethodOptions opts = cv_solver.options(P.data.task);
      CvGrid grid;
      if (!cv_grid.empty()) grid = read_grid_file(cv_grid, grid);
      if (cv_folds) grid.folds = *cv_folds;
      if (cv_seed) grid.seed = *cv_seed;
      TunedFit tf = tune_and_fit(P.data, P.spec, method, grid, opts, cv_jobs);
      Coefficients coefs = unstandardize(tf.fit.coefficients, P.data);
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

      if (!cv_table.empty()) {
        auto os = open_out(cv_table);
        os << "lambda_mult,gamma_mult,threshold,lambda,gamma,score,failed_folds\n";
        os.precision(10);
        for (const auto& row : tf.cv.table)
          os << row.lambda_multiplier << ',' << row.gamma_multiplier << ',' << row.threshold << ',' << row.lambda
             << ',' << row.gamma << ',' << row.score << ',' << row.failed_folds << '\n';
      }
      Json rep;
      rep["command"] = "cv";
      rep["data"] = cv_data.path;
      rep["n"] = P.data.n();
      rep["p"] = P.data.p();
      rep["method"] = to_string(method);
      rep["loss"] = loss_json(P.spec);
      rep["folds"] = grid.folds;
      rep["seed"] = grid.seed;
      rep["selected"] = {{"lambda_mult", tf.cv.best.lambda_multiplier},
                         {"gamma_mult", tf.cv.best.gamma_multiplier},
                         {"threshold", tf.cv.best.threshold},
                         {"lambda", tf.cv.best.lambda},
                         {"gamma", tf.cv.best.gamma},
                         {"cv_score", tf.cv.best.score}};
      rep["options"] = options_json(opts);
      rep["result"] = result_json(tf.fit);
      rep["certificates_scale"] = "standardized";
      rep["coefficients"] = coefficients_json(coefs);
      rep["intercept"] = optional_json(coefs.intercept);
      rep["timing"] = {{"seconds", secs}};
      write_outputs(coefs, P.raw, cv_coef, cv_report, rep, out);
      return 0;
    }

    if (bench->parsed()) {
      if (!b_cfg.empty()) apply_config(bench, b_cfg);
      BenchPlan plan;
      plan.scheme = b_spec;
      plan.scheme.scheme = parse_scheme(b_scheme);
      plan.scheme.noise = parse_noise(b_noise);
      if (b_methods.empty())
        b_methods = plan.scheme.task() == Task::Quantile ? std::vector<std::string>{"analog.qr", "nocorr.qr"}
                                                         : std::vector<std::string>{"analog.logistic", "nocorr.logistic"};
      for (const auto& m : b_methods) plan.methods.push_back(parse_bench_method(m));
      plan.replicates = b_replicates;
      plan.quantiles = b_taus;
      if (!b_grid.empty()) plan.grid = read_grid_file(b_grid, plan.grid);
      plan.sigma2 = b_sigma2;
      plan.bandwidth = b_bandwidth;
      plan.jobs = b_jobs;

      std::vector<Index> ps = full_scale ? std::vector<Index>{1000, 5000} : std::vector<Index>{plan.scheme.p};
      BenchResult all;
      for (Index p : ps) {
        plan.scheme.p = p;
        BenchResult r = run_bench(plan);
        all.records.insert(all.records.end(), r.records.begin(), r.records.end());
        all.summary.insert(all.summary.end(), r.summary.begin(), r.summary.end());
        all.failed = all.failed || r.failed;
        all.message += r.message;
      }
      if (!b_out.empty()) {
        auto os = open_out(b_out);
        write_bench_csv(os, all);
      }
      if (!b_reps_out.empty()) {
        auto os = open_out(b_reps_out);
        write_replicates_csv(os, all);
      }
      if (b_text.empty()) {
        write_bench_text(out, all);
      } else {
        auto os = open_out(b_text);
        write_bench_text(os, all);
      }
      if (all.failed) {
        err << "error: too many failed replicates: " << all.message << '\n';
        return 1;
      }
      return 0;
    }

    if (lp_solve->parsed()) {
      LpSolution s = solve_lp(read_lp_csv(lp_file));
      Json j;
      j["status"] = to_string(s.status);
      j["objective"] = s.status == LpStatus::Optimal ? Json(s.objective_value) : Json(nullptr);
      j["z"] = std::vector<double>(s.z.data(), s.z.data() + s.z.size());
      j["iterations"] = s.iterations;
      j["used_bland"] = s.used_bland;
      j["diagnostic"] = s.diagnostic;
      if (lp_out.empty()) {
        out << j.dump(2) << '\n';
      } else {
        auto os = open_out(lp_out);
        os << j.dump(2) << '\n';
      }
      return 0;
    }
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}

}  // namespace mullkit
