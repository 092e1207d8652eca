// Command-line front end: fitting, tuning, simulation scenarios, the scalar
// thresholding curve and the kernel benchmark.

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dlasso/dlasso.hpp"

namespace {

using dlasso::Dataset;
using dlasso::format_double;

// --out paths are relative to DLASSO_OUT_DIR when that is set.
std::string resolve_out_path(const std::string& path) {
  if (path.empty() || path.front() == '/') return path;
  const char* dir = std::getenv("DLASSO_OUT_DIR");
  if (dir == nullptr || *dir == '\0') return path;
  std::string d(dir);
  if (d.back() != '/') d.push_back('/');
  return d + path;
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  const std::string path = resolve_out_path(out_path);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
  out << text;
}

dlasso::SelectionCriterion make_criterion(const std::string& name, int folds,
                                          std::uint64_t seed) {
  if (name == "aic") return dlasso::SelectionCriterion::aic();
  if (name == "bic") return dlasso::SelectionCriterion::bic();
  if (name == "gcv") return dlasso::SelectionCriterion::gcv();
  if (name == "cv") return dlasso::SelectionCriterion::cv(folds, seed);
  throw CLI::ValidationError("criterion must be one of aic, bic, gcv, cv");
}

std::vector<std::string> split_csv_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

nlohmann::json baseline_fit_json(const std::string& method, const Dataset& data,
                                 const Eigen::VectorXd& beta, double objective_value,
                                 bool converged, int iterations, double df_trace,
                                 const nlohmann::json& params) {
  nlohmann::json coef, coef_orig;
  const auto [orig, intercept] = dlasso::original_scale_coefficients(data, beta);
  int df = 0;
  for (int j = 0; j < data.p(); ++j) {
    coef[data.feature_names[j]] = beta(j);
    coef_orig[data.feature_names[j]] = orig(j);
    if (std::fabs(beta(j)) > 1e-3) ++df;
  }
  nlohmann::json j;
  j["method"] = method;
  j["coefficients"] = coef;
  j["coefficients_original"] = coef_orig;
  j["intercept_original"] = intercept;
  j["df_count"] = df;
  j["df_trace"] = df_trace;
  j["objective"] = objective_value;
  j["converged"] = converged;
  j["iterations"] = iterations;
  j["params"] = params;
  return j;
}

int run_fit(const std::string& data_path, const std::string& response, bool standardize_data,
            const std::string& method, double lambda, bool lambda_set, double s, bool s_set,
            const std::string& tune_lambda_crit, const std::string& tune_both_crit, int cv_folds,
            std::uint64_t seed, const std::string& out, bool strict) {
  const Dataset data = dlasso::load_dataset(data_path, response, standardize_data);
  nlohmann::json doc;
  bool converged = true;

  if (method == "ols") {
    const Eigen::VectorXd beta = dlasso::fit_ols(data);
    const double rss = (data.y - data.X * beta).squaredNorm();
    doc = baseline_fit_json("ols", data, beta, rss, true, 1, data.p(),
                            {{"lambda", nullptr}, {"s", nullptr}});
  } else if (method == "ridge") {
    if (!lambda_set) throw CLI::ValidationError("--method ridge requires --lambda");
    const Eigen::VectorXd beta = dlasso::fit_ridge(data, lambda);
    const double obj = (data.y - data.X * beta).squaredNorm() + lambda * beta.squaredNorm();
    Eigen::MatrixXd XtX = data.X.transpose() * data.X;
    const double df_trace = dlasso::detail::trace_hat(
        XtX, Eigen::VectorXd::Constant(data.p(), lambda));
    doc = baseline_fit_json("ridge", data, beta, obj, true, 1, df_trace,
                            {{"lambda", lambda}, {"s", nullptr}});
  } else if (method == "lasso") {
    if (!lambda_set) throw CLI::ValidationError("--method lasso requires --lambda");
    const dlasso::LassoFit lf = dlasso::fit_lasso_cd(data, lambda);
    const double obj =
        (data.y - data.X * lf.beta).squaredNorm() + lambda * lf.beta.lpNorm<1>();
    int df = 0;
    for (int j = 0; j < data.p(); ++j) df += std::fabs(lf.beta(j)) > 1e-3 ? 1 : 0;
    doc = baseline_fit_json("lasso", data, lf.beta, obj, lf.converged, lf.sweeps,
                            static_cast<double>(df), {{"lambda", lambda}, {"s", nullptr}});
    converged = lf.converged;
  } else if (method == "dlasso") {
    const double s_default = 1.0 / std::sqrt(static_cast<double>(data.n()));
    dlasso::FitResult result;
    if (!tune_both_crit.empty()) {
      const auto crit = make_criterion(tune_both_crit, cv_folds, seed);
      const auto tr = dlasso::tune(data, dlasso::TuningGrid::defaults(data.n()), crit);
      result = tr.best_fit;
    } else if (!tune_lambda_crit.empty()) {
      const auto crit = make_criterion(tune_lambda_crit, cv_folds, seed);
      dlasso::TuningGrid grid = dlasso::TuningGrid::defaults(data.n());
      grid.s_values = {s_set ? s : s_default};
      const auto tr = dlasso::tune(data, grid, crit);
      result = tr.best_fit;
    } else {
      if (!lambda_set) {
        throw CLI::ValidationError("--method dlasso needs --lambda, --tune-lambda or --tune");
      }
      dlasso::FitConfig cfg;
      cfg.params = dlasso::PenaltyParams{s_set ? s : s_default, lambda};
      result = dlasso::fit(data, cfg);
    }
    doc = dlasso::fit_result_to_json(result, data);
    doc["method"] = "dlasso";
    converged = result.converged;
  } else {
    throw CLI::ValidationError("unknown --method '" + method + "'");
  }

  emit(doc.dump(2) + "\n", out);
  if (strict && !converged) {
    std::cerr << "fit did not converge (--strict)\n";
    return 2;
  }
  return 0;
}

int run_tune(const std::string& data_path, const std::string& response, bool standardize_data,
             const std::string& criterion, int cv_folds, std::uint64_t seed,
             const std::string& table_out, const std::string& out) {
  const Dataset data = dlasso::load_dataset(data_path, response, standardize_data);
  const auto crit = make_criterion(criterion, cv_folds, seed);
  const auto tr = dlasso::tune(data, dlasso::TuningGrid::defaults(data.n()), crit);

  std::ostringstream csv;
  csv << "lambda,s,score,df_count,converged\n";
  for (const auto& row : tr.table) {
    csv << format_double(row.params.lambda) << ',' << format_double(row.params.s) << ','
        << format_double(row.score) << ',' << row.df_count << ',' << (row.converged ? 1 : 0)
        << '\n';
  }
  emit(csv.str(), table_out);

  if (!out.empty()) {
    nlohmann::json doc = dlasso::fit_result_to_json(tr.best_fit, data);
    doc["method"] = "dlasso";
    emit(doc.dump(2) + "\n", out);
  }
  return 0;
}

int run_threshold_curve(double lambda, double s, double ymin, double ymax, double step,
                        const std::string& out) {
  if (!(step > 0.0)) throw CLI::ValidationError("--step must be positive");
  if (!(ymin <= ymax)) throw CLI::ValidationError("--ymin must not exceed --ymax");
  std::ostringstream csv;
  csv << "y,estimate\n";
  for (double y = ymin; y <= ymax + 0.5 * step; y += step) {
    const double est = dlasso::scalar_estimate({y, dlasso::PenaltyParams{s, lambda}});
    csv << format_double(y) << ',' << format_double(est) << '\n';
  }
  emit(csv.str(), out);
  return 0;
}

struct BenchSpec {
  std::string name;
  std::function<double(double)> fn;
  std::function<double(double)> reference;
  double lo, hi, step;
};

int run_bench_erf(double s, const std::string& out) {
  using dlasso::ErfKernel;
  const auto ref_erf = [](double x) { return dlasso::erf_reference(x); };
  const auto ref_cdf = [](double x) { return dlasso::normal_cdf(x); };
  const auto ref_abs = [](double x) { return std::fabs(x); };

  std::vector<BenchSpec> specs;
  specs.push_back({"reference", ref_erf, ref_erf, -5.0, 5.0, 1e-3});
  specs.push_back({"taylor_small",
                   [](double x) { return dlasso::eval_erf_kernel(ErfKernel::TaylorSmall, x); },
                   ref_erf, -4.0, 4.0, 1e-3});
  specs.push_back({"taylor_scaled",
                   [](double x) { return dlasso::eval_erf_kernel(ErfKernel::TaylorScaled, x); },
                   ref_erf, -6.0, 6.0, 1e-3});
  specs.push_back({"asymptotic_complement",
                   [](double x) {
                     return dlasso::eval_erf_kernel(ErfKernel::AsymptoticComplement,
                                                    x < 0 ? x - 3.0 : x + 3.0);
                   },
                   [&](double x) { return ref_erf(x < 0 ? x - 3.0 : x + 3.0); }, -5.0, 5.0,
                   1e-3});
  specs.push_back({"tanh_fast",
                   [](double x) { return dlasso::erf_tanh_fast(x); }, ref_erf, -5.0, 5.0, 1e-3});
  specs.push_back({"piecewise_sine_cdf",
                   [](double x) { return dlasso::cdf_piecewise_sine(x); }, ref_cdf, -8.0, 8.0,
                   1e-3});
  specs.push_back({"abs_dlasso", [s](double x) { return dlasso::dlasso_value(x, s); }, ref_abs,
                   -5.0, 5.0, 1e-3});
  specs.push_back({"abs_sqrt_shift",
                   [s](double x) { return dlasso::smooth_abs(dlasso::SmoothAbsKind::SqrtShift, x, s); },
                   ref_abs, -5.0, 5.0, 1e-3});
  specs.push_back({"abs_sqrt_shift_lower",
                   [s](double x) { return dlasso::sqrt_shift_lower(x, s); }, ref_abs, -5.0, 5.0,
                   1e-3});
  specs.push_back({"abs_log_exp",
                   [s](double x) { return dlasso::smooth_abs(dlasso::SmoothAbsKind::LogExp, x, s); },
                   ref_abs, -5.0, 5.0, 1e-3});

  std::ostringstream csv;
  csv << "kernel,grid_max_abs_error,mean_ns_per_call\n";
  for (const auto& spec : specs) {
    double max_err = 0.0;
    long count = 0;
    for (double x = spec.lo; x <= spec.hi + 0.5 * spec.step; x += spec.step) {
      max_err = std::max(max_err, std::fabs(spec.fn(x) - spec.reference(x)));
      ++count;
    }
    // timing: repeat the grid until ~5 ms have elapsed
    volatile double sink = 0.0;
    long calls = 0;
    const auto start = std::chrono::steady_clock::now();
    do {
      for (double x = spec.lo; x <= spec.hi + 0.5 * spec.step; x += spec.step) {
        sink = sink + spec.fn(x);
      }
      calls += count;
    } while (std::chrono::steady_clock::now() - start < std::chrono::milliseconds(5));
    const double ns =
        std::chrono::duration<double, std::nano>(std::chrono::steady_clock::now() - start)
            .count() /
        static_cast<double>(calls);
    csv << spec.name << ',' << format_double(max_err) << ',' << format_double(ns) << '\n';
  }
  emit(csv.str(), out);
  return 0;
}

int run_simulate(int scenario, int replicates, std::uint64_t seed, int n_total, int n_train,
                 const std::string& methods_csv, double s_fixed, int cv_folds,
                 const std::string& out) {
  if (scenario < 1 || scenario > 3) throw CLI::ValidationError("--scenario must be 1, 2 or 3");
  const auto methods = split_csv_list(methods_csv);
  if (methods.empty()) throw CLI::ValidationError("--methods must name at least one method");

  const auto truth = dlasso::scenario_truth(static_cast<dlasso::Scenario>(scenario));
  std::ostringstream csv;
  csv << "method,replicate,pred_mse,param_mse,lambda,s,df_count,converged\n";

  for (int r = 0; r < replicates; ++r) {
    dlasso::ScenarioSpec spec;
    spec.id = static_cast<dlasso::Scenario>(scenario);
    spec.n_total = n_total;
    spec.n_train = n_train;
    spec.replicates = replicates;
    spec.seed = seed + static_cast<std::uint64_t>(r);
    const auto [train, test] = dlasso::generate(spec, truth);
    const dlasso::TuningGrid grid = dlasso::TuningGrid::defaults(train.n());
    const auto cv = dlasso::SelectionCriterion::cv(cv_folds, spec.seed);

    for (const auto& method : methods) {
      Eigen::VectorXd beta;
      bool has_lambda = false, has_s = false, converged = true;
      double lambda = 0.0, s = 0.0;
      if (method == "ols") {
        beta = dlasso::fit_ols(train);
      } else if (method == "ridge" || method == "lasso") {
        // CV over the lambda grid with per-fold refits
        const auto fold = dlasso::cv_fold_assignment(train.n(), cv_folds, spec.seed);
        double best_score = std::numeric_limits<double>::infinity();
        double best_lambda = grid.lambdas.back();
        for (double lam : grid.lambdas) {
          double total = 0.0;
          for (int f = 0; f < cv_folds; ++f) {
            std::vector<int> tr_rows, te_rows;
            for (int i = 0; i < train.n(); ++i) {
              (fold[i] == f ? te_rows : tr_rows).push_back(i);
            }
            const Dataset ftr = dlasso::subset_rows(train, tr_rows);
            const Dataset fte = dlasso::subset_rows(train, te_rows);
            const Eigen::VectorXd fb = method == "ridge"
                                           ? dlasso::fit_ridge(ftr, lam)
                                           : dlasso::fit_lasso_cd(ftr, lam).beta;
            total += (fte.y - fte.X * fb).squaredNorm() / fte.n();
          }
          const double score = total / cv_folds;
          if (score < best_score || (score == best_score && lam > best_lambda)) {
            best_score = score;
            best_lambda = lam;
          }
        }
        has_lambda = true;
        lambda = best_lambda;
        if (method == "ridge") {
          beta = dlasso::fit_ridge(train, best_lambda);
        } else {
          const auto lf = dlasso::fit_lasso_cd(train, best_lambda);
          beta = lf.beta;
          converged = lf.converged;
        }
      } else if (method == "dlasso" || method == "dlasso-s") {
        dlasso::TuningGrid g = grid;
        if (method == "dlasso-s") g.s_values = {s_fixed};
        const auto tr = dlasso::tune(train, g, cv);
        beta = tr.best_fit.beta;
        has_lambda = has_s = true;
        lambda = tr.best.lambda;
        s = tr.best.s;
        converged = tr.best_fit.converged;
      } else {
        throw CLI::ValidationError("unknown method '" + method +
                                   "' (expected dlasso, dlasso-s, lasso, ridge, ols)");
      }

      const auto [pred_mse, param_mse] = dlasso::metrics(truth, test, beta);
      int df = 0;
      for (int j = 0; j < beta.size(); ++j) df += std::fabs(beta(j)) > 1e-3 ? 1 : 0;
      csv << method << ',' << r << ',' << format_double(pred_mse) << ','
          << format_double(param_mse) << ',' << (has_lambda ? format_double(lambda) : "") << ','
          << (has_s ? format_double(s) : "") << ',' << df << ',' << (converged ? 1 : 0) << '\n';
    }
  }
  emit(csv.str(), out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Regularized regression with the differentiable dlasso penalty"};
  app.require_subcommand(1);

  // fit
  auto* fit_cmd = app.add_subcommand("fit", "Fit one model and emit a JSON document");
  std::string data_path, response = "lpsa", method = "dlasso", out;
  bool no_standardize = false, strict = false;
  double lambda = 0.0, s = 0.0;
  std::string tune_lambda_crit, tune_both_crit;
  int cv_folds = 10;
  std::uint64_t seed = 0;
  fit_cmd->add_option("--data", data_path, "CSV file with a header row")->required();
  fit_cmd->add_option("--response", response, "response column name (default lpsa)");
  fit_cmd->add_option("--method", method, "dlasso | ols | ridge | lasso");
  auto* lam_opt = fit_cmd->add_option("--lambda", lambda, "fixed regularization weight");
  auto* s_opt = fit_cmd->add_option("--s", s, "dlasso shape (default 1/sqrt(n))");
  auto* tl_opt = fit_cmd->add_option("--tune-lambda", tune_lambda_crit,
                                     "tune lambda with s fixed: aic | bic | gcv | cv");
  auto* tb_opt =
      fit_cmd->add_option("--tune", tune_both_crit, "tune lambda and s: aic | bic | gcv | cv");
  fit_cmd->add_option("--cv-folds", cv_folds, "folds for cv tuning (default 10)");
  fit_cmd->add_option("--seed", seed, "seed for cv fold assignment");
  fit_cmd->add_flag("--no-standardize", no_standardize, "skip mean/variance standardization");
  fit_cmd->add_option("--out", out, "write JSON here instead of stdout");
  fit_cmd->add_flag("--strict", strict, "exit 2 when the fit did not converge");
  lam_opt->excludes(tl_opt);
  lam_opt->excludes(tb_opt);
  s_opt->excludes(tb_opt);
  tl_opt->excludes(tb_opt);

  // tune
  auto* tune_cmd = app.add_subcommand("tune", "Evaluate the default (lambda, s) grid");
  std::string t_data, t_response = "lpsa", t_criterion = "bic", t_table_out, t_out;
  bool t_no_standardize = false;
  int t_cv_folds = 10;
  std::uint64_t t_seed = 0;
  tune_cmd->add_option("--data", t_data, "CSV file with a header row")->required();
  tune_cmd->add_option("--response", t_response, "response column name (default lpsa)");
  tune_cmd->add_option("--criterion", t_criterion, "aic | bic | gcv | cv (default bic)");
  tune_cmd->add_option("--cv-folds", t_cv_folds, "folds for cv (default 10)");
  tune_cmd->add_option("--seed", t_seed, "seed for cv fold assignment");
  tune_cmd->add_flag("--no-standardize", t_no_standardize, "skip standardization");
  tune_cmd->add_option("--table-out", t_table_out, "write the score table here (default stdout)");
  tune_cmd->add_option("--out", t_out, "also write the best fit as JSON here");

  // threshold-curve
  auto* th_cmd = app.add_subcommand("threshold-curve",
                                    "Scalar estimator curve for the identity design");
  double th_lambda = 1.0, th_s = 0.01, th_ymin = -5.0, th_ymax = 5.0, th_step = 0.01;
  std::string th_out;
  th_cmd->add_option("--lambda", th_lambda, "penalty weight")->required();
  th_cmd->add_option("--s", th_s, "penalty shape")->required();
  th_cmd->add_option("--ymin", th_ymin, "curve start (default -5)");
  th_cmd->add_option("--ymax", th_ymax, "curve end (default 5)");
  th_cmd->add_option("--step", th_step, "grid step (default 0.01)");
  th_cmd->add_option("--out", th_out, "write CSV here instead of stdout");

  // bench-erf
  auto* be_cmd = app.add_subcommand("bench-erf", "Kernel accuracy/speed comparison table");
  double be_s = 0.1;
  std::string be_out;
  be_cmd->add_option("--s", be_s, "shape for the |x| approximation rows (default 0.1)");
  be_cmd->add_option("--out", be_out, "write CSV here instead of stdout");

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "Run a simulation scenario");
  int sim_scenario = 1, sim_replicates = 50, sim_n_total = 240, sim_n_train = 40,
      sim_cv_folds = 10;
  std::uint64_t sim_seed = 1;
  double sim_s = 0.01;
  std::string sim_methods = "dlasso,dlasso-s,lasso,ridge,ols", sim_out;
  sim_cmd->add_option("--scenario", sim_scenario, "1 | 2 | 3")->required();
  sim_cmd->add_option("--replicates", sim_replicates, "number of datasets (default 50)");
  sim_cmd->add_option("--seed", sim_seed, "base seed; replicate r uses seed + r");
  sim_cmd->add_option("--n-total", sim_n_total, "observations per dataset (default 240)");
  sim_cmd->add_option("--n-train", sim_n_train, "training rows (default 40)");
  sim_cmd->add_option("--methods", sim_methods,
                      "comma list of dlasso, dlasso-s, lasso, ridge, ols");
  sim_cmd->add_option("--s", sim_s, "fixed shape for dlasso-s (default 0.01)");
  sim_cmd->add_option("--cv-folds", sim_cv_folds, "folds for cv tuning (default 10)");
  sim_cmd->add_option("--out", sim_out, "write CSV here instead of stdout");

  try {
    app.parse(argc, argv);
    if (*fit_cmd) {
      return run_fit(data_path, response, !no_standardize, method, lambda,
                     lam_opt->count() > 0, s, s_opt->count() > 0, tune_lambda_crit,
                     tune_both_crit, cv_folds, seed, out, strict);
    }
    if (*tune_cmd) {
      return run_tune(t_data, t_response, !t_no_standardize, t_criterion, t_cv_folds, t_seed,
                      t_table_out, t_out);
    }
    if (*th_cmd) return run_threshold_curve(th_lambda, th_s, th_ymin, th_ymax, th_step, th_out);
    if (*be_cmd) return run_bench_erf(be_s, be_out);
    if (*sim_cmd) {
      return run_simulate(sim_scenario, sim_replicates, sim_seed, sim_n_total, sim_n_train,
                          sim_methods, sim_s, sim_cv_folds, sim_out);
    }
    return 1;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
