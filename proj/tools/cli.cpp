#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <reconstruct/reconstruct.hpp>

namespace recon::cli {

namespace {

using json = nlohmann::json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

const std::vector<std::string> kFitMethods{"gprr", "krr", "gpr", "nystrom", "spgp", "eb", "fdp"};
const std::vector<std::string> kScanMethods{"gprr", "krr", "gpr", "nystrom", "fdp"};

int jobs_from_env() {
  const char* env = std::getenv("RECONSTRUCT_JOBS");
  if (env == nullptr || *env == '\0') return 1;
  int jobs = 0;
  const char* end = env + std::char_traits<char>::length(env);
  const auto [ptr, ec] = std::from_chars(env, end, jobs);
  if (ec != std::errc() || ptr != end || jobs < 1) {
    throw UsageError(std::string("RECONSTRUCT_JOBS must be a positive integer, got '") + env + "'");
  }
  return jobs;
}

void emit(const json& j, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << dump_json(j);
  } else {
    save_json(path, j);
  }
}

// ---------------------------------------------------------------------------
// Shared option groups

struct KernelOptions {
  std::string family = "gaussian";
  std::vector<double> theta{12.5};
  double nu = 2.5;
  double phi = 1.0;
  bool estimate = false;
  int max_iter = 20;
};

void add_kernel_options(CLI::App* sub, KernelOptions& k) {
  sub->add_option("--kernel", k.family, "Kernel family")
      ->check(CLI::IsMember({"gaussian", "matern"}))
      ->capture_default_str();
  sub->add_option("--theta", k.theta, "Gaussian scale: one value for all coordinates or one per coordinate")
      ->delimiter(',')
      ->capture_default_str();
  sub->add_option("--nu", k.nu, "Matern smoothness (0.5, 1.5 or 2.5)")->capture_default_str();
  sub->add_option("--phi", k.phi, "Matern range")->capture_default_str();
  sub->add_flag("--estimate-theta", k.estimate, "Estimate the Gaussian scale by least squares on the knots");
  sub->add_option("--kernel-max-iter", k.max_iter, "Iterations of the scale estimation")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

VectorXd theta_vector(const std::vector<double>& theta, Index d) {
  if (theta.size() == 1) return VectorXd::Constant(d, theta.front());
  if (static_cast<Index>(theta.size()) != d) {
    throw UsageError("--theta needs 1 or " + std::to_string(d) + " values, got " + std::to_string(theta.size()));
  }
  return Eigen::Map<const VectorXd>(theta.data(), d);
}

struct LambdaOptions {
  std::string lambda = "auto";
  double grid_min = 1e-8;
  double grid_max = 1e2;
  int grid_size = 50;
};

void add_grid_options(CLI::App* sub, LambdaOptions& l) {
  sub->add_option("--grid-min", l.grid_min, "Smallest lambda of the GCV grid")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--grid-max", l.grid_max, "Largest lambda of the GCV grid")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--grid-size", l.grid_size, "Number of log-spaced grid points")
      ->check(CLI::Range(2, 10000))
      ->capture_default_str();
}

std::vector<double> lambda_grid(const LambdaOptions& l) {
  if (!(l.grid_min < l.grid_max)) throw UsageError("--grid-min must be below --grid-max");
  if (l.grid_min == 1e-8 && l.grid_max == 1e2 && l.grid_size == 50) return default_lambda_grid();
  std::vector<double> grid(static_cast<std::size_t>(l.grid_size));
  const double a = std::log10(l.grid_min);
  const double b = std::log10(l.grid_max);
  for (int k = 0; k < l.grid_size; ++k) grid[static_cast<std::size_t>(k)] = std::pow(10.0, a + (b - a) * k / (l.grid_size - 1));
  return grid;
}

json policy_json(const LambdaPolicy& p) {
  switch (p.kind) {
    case LambdaPolicy::Kind::none: return {{"kind", "none"}};
    case LambdaPolicy::Kind::fixed: return {{"kind", "fixed"}, {"value", p.value}};
    case LambdaPolicy::Kind::gcv: return {{"kind", "gcv"}, {"grid", p.grid}};
  }
  return nullptr;
}

// ---------------------------------------------------------------------------
// fit / gcv-scan

struct FitOptions {
  std::string data;
  std::string out;
  std::string method = "gprr";
  std::string g = "linear";
  std::string boundary = "not-a-knot";
  Index m = 0;
  Index trials = kDefaultSubsetTrials;
  std::uint64_t seed = 0;
  int jobs = 1;
  KernelOptions kernel;
  LambdaOptions lambda;
  std::optional<double> tau2;
  std::optional<double> sigma2;
};

void add_fit_options(CLI::App* sub, FitOptions& o, const std::vector<std::string>& methods) {
  sub->add_option("--data", o.data, "Training CSV (x1..xd,y)")->required()->check(CLI::ExistingFile);
  sub->add_option("--method", o.method, "Estimator")->check(CLI::IsMember(methods))->capture_default_str();
  sub->add_option("--m", o.m, "Number of knots (0: min(10 d, n))")->check(CLI::NonNegativeNumber)->capture_default_str();
  sub->add_option("--trials", o.trials, "Random subsets scored when selecting knots")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--seed", o.seed, "Seed for knot selection")->capture_default_str();
  sub->add_option("--jobs", o.jobs, "Worker threads (default RECONSTRUCT_JOBS or 1)")->check(CLI::PositiveNumber);
  sub->add_option("--g", o.g, "Regression terms for gprr, gpr and nystrom")
      ->check(CLI::IsMember({"none", "constant", "linear"}))
      ->capture_default_str();
  sub->add_option("--boundary", o.boundary, "Spline end condition for fdp")
      ->check(CLI::IsMember({"not-a-knot", "natural"}))
      ->capture_default_str();
  add_kernel_options(sub, o.kernel);
  add_grid_options(sub, o.lambda);
}

LambdaPolicy resolve_policy(const FitOptions& o, Index m, Index n) {
  const std::string& s = o.lambda.lambda;
  if (s == "auto") {
    if (o.method == "gprr") return default_lambda_policy(m, n);
    return LambdaPolicy::gcv(lambda_grid(o.lambda));
  }
  if (s == "gcv") return LambdaPolicy::gcv(lambda_grid(o.lambda));
  if (s == "none") return LambdaPolicy::none();
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !(v >= 0.0) || !std::isfinite(v)) {
    throw UsageError("--lambda must be auto, gcv, none or a nonnegative number, got '" + s + "'");
  }
  return LambdaPolicy::fixed(v);
}

struct FitSetup {
  Dataset data;
  std::optional<KnotSelection> knots;
  std::optional<KernelSpec> spec;
  RegressionBasis g = RegressionBasis::none;
  LambdaPolicy policy;
  json config;
};

FitSetup prepare_fit(const FitOptions& o, const std::string& command) {
  FitSetup s;
  s.data = load_dataset_csv(o.data);
  const Index n = s.data.x.rows();
  const Index d = s.data.x.cols();
  const bool fdp = o.method == "fdp";
  const bool variance_based = o.method == "spgp" || o.method == "eb";
  if (variance_based && o.lambda.lambda != "auto") throw UsageError("--lambda does not apply to " + o.method);
  if (fdp && d != 1) throw Error(ErrorCode::DimensionMismatch, "fdp needs one input column");
  if (o.tau2.has_value() != o.sigma2.has_value()) throw UsageError("--tau2 and --sigma2 go together");

  s.g = (o.method == "gprr" || o.method == "gpr" || o.method == "nystrom") ? parse_regression_basis(o.g)
                                                                            : RegressionBasis::none;
  const bool needs_knots = !fdp && ((o.method != "krr" && o.method != "gpr") || o.kernel.estimate);
  const Index m = o.m > 0 ? o.m : std::min(default_knot_count(d), n);

  s.config = {{"command", command}, {"data", o.data}, {"method", o.method}, {"rows", n}, {"d", d}};
  if (needs_knots) {
    s.knots = select_knots(s.data.x, m, o.trials, o.seed, o.jobs);
    s.config["m"] = m;
    s.config["trials"] = o.trials;
    s.config["seed"] = o.seed;
    s.config["knot_indices"] = s.knots->indices;
    s.config["knot_criterion"] = s.knots->criterion;
  }
  if (!fdp) {
    if (o.kernel.family == "matern") {
      if (o.kernel.estimate) throw UsageError("--estimate-theta needs the gaussian kernel");
      s.spec = KernelSpec::matern(o.kernel.nu, o.kernel.phi);
    } else {
      const VectorXd theta0 = theta_vector(o.kernel.theta, d);
      if (o.kernel.estimate) {
        KernelParamOptions opt;
        opt.max_iter = o.kernel.max_iter;
        const auto est = estimate_kernel_params(s.data.x, s.data.y, s.knots->knots, s.g, theta0, opt);
        s.spec = KernelSpec::gaussian(est.theta);
        s.config["theta0"] = std::vector<double>(theta0.data(), theta0.data() + d);
        s.config["kernel_max_iter"] = o.kernel.max_iter;
        s.config["kernel_objective"] = est.objective;
      } else {
        s.spec = KernelSpec::gaussian(theta0);
      }
    }
    s.config["kernel"] = kernel_to_json(*s.spec);
    s.config["estimate_theta"] = o.kernel.estimate;
    s.config["g"] = to_string(s.g);
  } else {
    s.config["boundary"] = o.boundary;
  }
  if (!variance_based) {
    s.policy = resolve_policy(o, s.knots ? s.knots->knots.size() : n, n);
    s.config["lambda_policy"] = policy_json(s.policy);
  }
  return s;
}

FittedModel fit_with(const FitSetup& s, const FitOptions& o, const LambdaPolicy& policy, json* config) {
  const MatrixXd& x = s.data.x;
  const VectorXd& y = s.data.y;
  if (o.method == "gprr") return fit_gprr(x, y, s.knots->knots, *s.spec, s.g, policy);
  if (o.method == "krr") return fit_krr(x, y, *s.spec, policy);
  if (o.method == "gpr") return fit_gpr(x, y, *s.spec, s.g, policy);
  if (o.method == "nystrom") return fit_nystrom(x, y, s.knots->knots, *s.spec, s.g, policy);
  if (o.method == "fdp") return fdp_model(fit_fdp(y, policy, parse_spline_boundary(o.boundary)));
  VarianceParams vp;
  if (o.tau2) {
    if (!(*o.tau2 > 0.0) || !(*o.sigma2 > 0.0)) throw UsageError("--tau2 and --sigma2 must be positive");
    vp = {*o.tau2, *o.sigma2};
  } else {
    vp = estimate_variances(x, y, s.knots->knots, *s.spec);
  }
  if (config) (*config)["variances"] = {{"tau2", vp.tau2}, {"sigma2", vp.sigma2}, {"estimated", !o.tau2}};
  if (o.method == "spgp") return fit_spgp(x, y, s.knots->knots, *s.spec, vp);
  return fit_empirical_bayes(x, y, s.knots->knots, *s.spec, vp);
}

int cmd_fit(const FitOptions& o, std::ostream& out) {
  FitSetup s = prepare_fit(o, "fit");
  const FittedModel model = fit_with(s, o, s.policy, &s.config);
  json j = model_to_json(model);
  j["config"] = s.config;
  emit(j, o.out, out);
  return kExitOk;
}

int cmd_gcv_scan(const FitOptions& o, std::ostream& out) {
  FitSetup s = prepare_fit(o, "gcv-scan");
  const std::vector<double> grid = lambda_grid(o.lambda);
  LambdaSelection sel;
  if (o.method == "gprr") {
    sel = gprr_gcv_curve(s.data.x, s.data.y, s.knots->knots, *s.spec, s.g, grid);
  } else {
    std::vector<double> curve;
    for (double lambda : grid) {
      if (o.method == "fdp") {
        curve.push_back(fdp_gcv(s.data.y, lambda));
      } else {
        curve.push_back(fit_with(s, o, LambdaPolicy::fixed(lambda), nullptr).diagnostics.gcv);
      }
    }
    sel = select_from_curve(grid, curve);
  }
  s.config.erase("lambda_policy");
  s.config["grid"] = grid;
  json curve = json::array();
  for (double v : sel.curve) curve.push_back(std::isfinite(v) ? json(v) : json(nullptr));
  emit({{"config", s.config}, {"grid", sel.grid}, {"gcv", curve}, {"lambda", sel.lambda}, {"min_gcv", sel.gcv}}, o.out,
       out);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// predict / inspect

struct PredictOptions {
  std::string model;
  std::string data;
  std::string out;
};

void write_csv_stream(std::ostream& os, const std::vector<std::string>& header, const MatrixXd& values) {
  for (std::size_t c = 0; c < header.size(); ++c) os << (c ? "," : "") << header[c];
  os << '\n' << std::setprecision(17);
  for (Index i = 0; i < values.rows(); ++i) {
    for (Index j = 0; j < values.cols(); ++j) os << (j ? "," : "") << values(i, j);
    os << '\n';
  }
}

int cmd_predict(const PredictOptions& o, std::ostream& out, std::ostream& err) {
  const FittedModel model = load_model(o.model);
  const CsvTable table = read_csv(o.data);
  const Index d = model.knots.dimension();
  const Index cols = table.values.cols();
  if (cols != d && cols != d + 1) {
    throw Error(ErrorCode::BadSchema, "model takes " + std::to_string(d) + " inputs, CSV has " + std::to_string(cols) +
                                          " columns");
  }
  const MatrixXd x = table.values.leftCols(d);
  const VectorXd yhat = predict(model, x);

  std::vector<std::string> header(table.header.begin(), table.header.begin() + d);
  header.emplace_back("prediction");
  MatrixXd values(x.rows(), d + 1);
  values << x, yhat;
  if (o.out.empty()) {
    write_csv_stream(out, header, values);
  } else {
    std::ofstream f(o.out);
    if (!f) throw Error(ErrorCode::IoError, "cannot write " + o.out);
    write_csv_stream(f, header, values);
    if (!f) throw Error(ErrorCode::IoError, "failed writing " + o.out);
  }
  if (cols == d + 1 && x.rows() > 0) {
    err << "mse " << std::setprecision(10) << mean_squared_error(yhat, table.values.col(d)) << '\n';
  }
  return kExitOk;
}

int cmd_inspect(const std::string& path, bool as_json, std::ostream& out) {
  const FittedModel m = load_model(path);
  json s{{"interpolator", to_string(m.interpolator)},
         {"method", to_string(m.method)},
         {"knots", m.knots.size()},
         {"dimension", m.knots.dimension()},
         {"lambda", m.lambda},
         {"g_kind", to_string(m.g_kind)},
         {"kernel", m.kernel ? kernel_to_json(*m.kernel) : json(nullptr)},
         {"gcv", std::isfinite(m.diagnostics.gcv) ? json(m.diagnostics.gcv) : json(nullptr)},
         {"jitter", m.diagnostics.jitter},
         {"gamma_range", {m.gamma_hat.minCoeff(), m.gamma_hat.maxCoeff()}}};
  if (m.interpolator == InterpolatorKind::spline) s["boundary"] = to_string(m.boundary);
  if (as_json) {
    out << dump_json(s);
    return kExitOk;
  }
  out << "method        " << to_string(m.method) << '\n'
      << "interpolator  " << to_string(m.interpolator) << '\n'
      << "knots         " << m.knots.size() << " x " << m.knots.dimension() << '\n'
      << "lambda        " << std::setprecision(6) << m.lambda << '\n'
      << "gcv           " << m.diagnostics.gcv << '\n'
      << "jitter        " << m.diagnostics.jitter << '\n';
  if (m.kernel) out << "kernel        " << kernel_to_json(*m.kernel).dump() << '\n';
  if (m.interpolator == InterpolatorKind::kernel || m.interpolator == InterpolatorKind::gp) {
    out << "g             " << to_string(m.g_kind) << '\n';
  }
  if (m.interpolator == InterpolatorKind::spline) out << "boundary      " << to_string(m.boundary) << '\n';
  out << "gamma_hat     [" << m.gamma_hat.minCoeff() << ", " << m.gamma_hat.maxCoeff() << "]\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// knots

struct KnotsOptions {
  std::string data;
  std::string test;
  std::string out;
  bool ccpp = false;
  Index m = 0;
  Index trials = kDefaultSubsetTrials;
  std::uint64_t seed = 0;
  int jobs = 1;
  Index m0 = 40;
  int iterations = 15;
  bool no_early_stop = false;
  KernelOptions kernel;
};

int cmd_knots_select(const KnotsOptions& o, std::ostream& out) {
  const Dataset data = o.ccpp ? load_ccpp(o.data) : load_dataset_csv(o.data);
  const Index m = o.m > 0 ? o.m : std::min(default_knot_count(data.x.cols()), data.x.rows());
  const KnotSelection sel = select_knots(data.x, m, o.trials, o.seed, o.jobs);
  json rows = json::array();
  for (Index i = 0; i < sel.knots.size(); ++i) {
    const VectorXd r = sel.knots.points().row(i).transpose();
    rows.push_back(std::vector<double>(r.data(), r.data() + r.size()));
  }
  json config{{"command", "knots select"}, {"data", o.data}, {"ccpp", o.ccpp}, {"m", m}, {"trials", o.trials},
              {"seed", o.seed}};
  emit({{"config", config}, {"indices", sel.indices}, {"criterion", sel.criterion}, {"knots", rows}}, o.out, out);
  return kExitOk;
}

int cmd_knots_sequential(const KnotsOptions& o, std::ostream& out) {
  if (o.ccpp == !o.test.empty()) throw UsageError("knots sequential needs exactly one of --ccpp or --test");
  Dataset data = o.ccpp ? load_ccpp(o.data) : load_dataset_csv(o.data);
  if (!o.ccpp) {
    const Dataset test = load_dataset_csv(o.test);
    if (test.x.cols() != data.x.cols()) throw Error(ErrorCode::DimensionMismatch, "test CSV has a different width");
    data.x_test = test.x;
    data.y_test = test.y;
  }
  if (o.kernel.family != "gaussian") throw UsageError("knots sequential uses the gaussian kernel");
  ExperimentConfig c;
  c.function = o.ccpp ? "ccpp" : "csv";
  c.d = data.x.cols();
  c.n = data.x.rows();
  c.m = o.m0;
  c.test_size = data.x_test.rows();
  c.seed = o.seed;
  c.subset_trials = o.trials;
  if (o.kernel.theta.size() != 1) throw UsageError("knots sequential takes a single --theta starting value");
  c.theta = o.kernel.theta.front();
  c.estimate_theta = o.kernel.estimate;
  c.kernel_max_iter = o.kernel.max_iter;
  c.stop_rule.early_stop = !o.no_early_stop;
  c.stop_rule.max_iterations = o.iterations;
  c.jobs = o.jobs;
  c.methods = {"gprr"};
  const SequentialResult result = run_ccpp_sequential(data, c, o.m0, o.iterations);
  BenchmarkReport report = sequential_report(result, c);
  report.config["data"] = o.data;
  if (!o.test.empty()) report.config["test"] = o.test;
  report.config["iterations"] = o.iterations;
  emit(report_to_json(report), o.out, out);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// bench

struct BenchOptions {
  ExperimentConfig config;
  std::string out;
  std::string data;
  bool no_estimate_theta = false;
};

void add_bench_common(CLI::App* sub, BenchOptions& b) {
  ExperimentConfig& c = b.config;
  sub->add_option("--seed", c.seed, "Base seed; repetition r uses seed + r")->required();
  sub->add_option("--reps", c.repetitions, "Repetitions")->check(CLI::PositiveNumber)->capture_default_str();
  sub->add_option("--methods", c.methods, "Comma-separated subset of the methods")->delimiter(',');
  sub->add_option("--jobs", c.jobs, "Worker threads (default RECONSTRUCT_JOBS or 1)")->check(CLI::PositiveNumber);
  sub->add_flag("--timings", c.timings, "Record wall-clock timings (makes the report non-reproducible)");
  sub->add_option("--out", b.out, "Report path (default stdout)");
}

void add_simulation_options(CLI::App* sub, BenchOptions& b) {
  ExperimentConfig& c = b.config;
  sub->add_option("--model,--function", c.function, "Test function")
      ->check(CLI::IsMember({"I", "II", "III", "borehole", "f1d"}))
      ->capture_default_str();
  sub->add_option("--d", c.d, "Input dimension")->check(CLI::PositiveNumber)->capture_default_str();
  sub->add_option("--n", c.n, "Training size")->check(CLI::PositiveNumber)->capture_default_str();
  sub->add_option("--sigma", c.sigma, "Noise standard deviation")->check(CLI::NonNegativeNumber)->capture_default_str();
  sub->add_option("--test-size", c.test_size, "Test points")->check(CLI::PositiveNumber)->capture_default_str();
  sub->add_option("--theta", c.theta, "Gaussian scale (starting value when estimated)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_flag("--ackley-standard", c.ackley_standard, "Model II with the cosine term of standard Ackley");
}

void add_tuning_options(CLI::App* sub, BenchOptions& b) {
  sub->add_option("--m", b.config.m, "Knots per subset")->check(CLI::PositiveNumber)->capture_default_str();
  sub->add_flag("--no-estimate-theta", b.no_estimate_theta, "Keep --theta fixed instead of estimating it");
  sub->add_option("--kernel-max-iter", b.config.kernel_max_iter, "Iterations of the scale estimation")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

int cmd_bench(const std::string& which, BenchOptions& b, std::ostream& out) {
  ExperimentConfig& c = b.config;
  if (b.no_estimate_theta) c.estimate_theta = false;
  const Index need = c.function == "ccpp" ? 0 : required_dimension(parse_test_function(c.function));
  if (need != 0 && need != c.d) {
    throw UsageError("function " + c.function + " takes d = " + std::to_string(need));
  }
  BenchmarkReport report;
  if (which == "table1") {
    report = run_table1(c);
  } else if (which == "table3") {
    report = run_table3(c);
  } else if (which == "replication") {
    report = run_replication_study(c);
  } else {
    std::string path = b.data;
    if (path.empty()) {
      const char* env = std::getenv("RECONSTRUCT_CCPP_PATH");
      path = env != nullptr ? env : "";
    }
    if (path.empty()) throw UsageError("bench ccpp needs --data or RECONSTRUCT_CCPP_PATH");
    report = run_ccpp(load_ccpp(path), c);
    report.config["data"] = path;
  }
  emit(report_to_json(report), b.out, out);
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Nonparametric regression by penalized reconstruction at knots", "reconstruct"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "reconstruct 0.1.0");

  int env_jobs = 1;
  try {
    env_jobs = jobs_from_env();
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  FitOptions fit;
  fit.jobs = env_jobs;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a model to a CSV and write it as JSON");
  add_fit_options(fit_cmd, fit, kFitMethods);
  fit_cmd->add_option("--lambda", fit.lambda.lambda, "auto, gcv, none or a fixed value")->capture_default_str();
  fit_cmd->add_option("--tau2", fit.tau2, "Prior variance for spgp and eb (estimated when omitted)");
  fit_cmd->add_option("--sigma2", fit.sigma2, "Noise variance for spgp and eb (estimated when omitted)");
  fit_cmd->add_option("--out", fit.out, "Model path (default stdout)");

  FitOptions scan;
  scan.jobs = env_jobs;
  auto* scan_cmd = app.add_subcommand("gcv-scan", "GCV over a lambda grid");
  add_fit_options(scan_cmd, scan, kScanMethods);
  scan_cmd->add_option("--out", scan.out, "Output path (default stdout)");

  PredictOptions pred;
  auto* pred_cmd = app.add_subcommand("predict", "Predict at the rows of a CSV");
  pred_cmd->add_option("--model", pred.model, "Model JSON")->required()->check(CLI::ExistingFile);
  pred_cmd->add_option("--data", pred.data, "CSV with the model's inputs (an extra last column is the response)")
      ->required()
      ->check(CLI::ExistingFile);
  pred_cmd->add_option("--out", pred.out, "Prediction CSV (default stdout)");

  std::string inspect_path;
  bool inspect_json = false;
  auto* inspect_cmd = app.add_subcommand("inspect", "Print a model summary");
  inspect_cmd->add_option("model", inspect_path, "Model JSON")->required()->check(CLI::ExistingFile);
  inspect_cmd->add_flag("--json", inspect_json, "Summary as JSON");

  KnotsOptions knots;
  knots.jobs = env_jobs;
  auto* knots_cmd = app.add_subcommand("knots", "Knot selection");
  knots_cmd->require_subcommand(1);
  auto* select_cmd = knots_cmd->add_subcommand("select", "Best random subset under the spacing criterion");
  auto* seq_cmd = knots_cmd->add_subcommand("sequential", "Greedy maximum-residual knot additions");
  for (auto* sub : {select_cmd, seq_cmd}) {
    sub->add_option("--data", knots.data, "Training CSV")->required()->check(CLI::ExistingFile);
    sub->add_flag("--ccpp", knots.ccpp, "Read --data as the AT,V,AP,RH,PE power-plant file");
    sub->add_option("--trials", knots.trials, "Random subsets scored")->check(CLI::PositiveNumber)->capture_default_str();
    sub->add_option("--seed", knots.seed, "Seed")->capture_default_str();
    sub->add_option("--jobs", knots.jobs, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--out", knots.out, "Output path (default stdout)");
  }
  select_cmd->add_option("--m", knots.m, "Number of knots (0: min(10 d, n))")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  seq_cmd->add_option("--test", knots.test, "Held-out CSV for the test error")->check(CLI::ExistingFile);
  seq_cmd->add_option("--m0", knots.m0, "Initial knots")->check(CLI::PositiveNumber)->capture_default_str();
  seq_cmd->add_option("--iterations", knots.iterations, "Knots to add")->check(CLI::PositiveNumber)->capture_default_str();
  seq_cmd->add_flag("--no-early-stop", knots.no_early_stop, "Run all iterations");
  add_kernel_options(seq_cmd, knots.kernel);

  auto* bench_cmd = app.add_subcommand("bench", "Benchmark suites");
  bench_cmd->require_subcommand(1);

  BenchOptions t1;
  t1.config.estimate_theta = false;
  t1.config.jobs = env_jobs;
  auto* t1_cmd = bench_cmd->add_subcommand("table1", "Models I-III with all points as knots: krr, gpr, gprr");
  add_bench_common(t1_cmd, t1);
  add_simulation_options(t1_cmd, t1);

  BenchOptions t3;
  t3.config.function = "borehole";
  t3.config.d = 8;
  t3.config.n = 5000;
  t3.config.m = 80;
  t3.config.repetitions = 5;
  t3.config.inner = 10;
  t3.config.jobs = env_jobs;
  auto* t3_cmd = bench_cmd->add_subcommand("table3", "Random knot subsets: gprr, spgp, nystrom");
  add_bench_common(t3_cmd, t3);
  add_simulation_options(t3_cmd, t3);
  add_tuning_options(t3_cmd, t3);
  t3_cmd->add_option("--inner", t3.config.inner, "Knot subsets per repetition")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  BenchOptions rep;
  rep.config.sigma_grid = default_sigma_grid();
  rep.config.jobs = env_jobs;
  auto* rep_cmd = bench_cmd->add_subcommand("replication", "Replicated 1-D designs over a noise grid");
  add_bench_common(rep_cmd, rep);
  rep_cmd->add_option("--sigma-grid", rep.config.sigma_grid, "Noise levels")->delimiter(',')->capture_default_str();
  rep_cmd->add_option("--knots-per-design", rep.config.knots_per_design, "Distinct design points")
      ->check(CLI::Range(2, 100000))
      ->capture_default_str();
  rep_cmd->add_option("--replications", rep.config.replications_per_knot, "Observations per design point")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  BenchOptions cc;
  cc.config.function = "ccpp";
  cc.config.m = 40;
  cc.config.repetitions = 1;
  cc.config.jobs = env_jobs;
  auto* cc_cmd = bench_cmd->add_subcommand("ccpp", "Power-plant data with selected knots");
  add_bench_common(cc_cmd, cc);
  add_tuning_options(cc_cmd, cc);
  cc_cmd->add_option("--data", cc.data, "CCPP CSV (default RECONSTRUCT_CCPP_PATH)")->check(CLI::ExistingFile);
  cc_cmd->add_option("--trials", cc.config.subset_trials, "Random subsets scored")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cc_cmd->add_option("--theta", cc.config.theta, "Gaussian scale starting value")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*fit_cmd) return cmd_fit(fit, out);
    if (*scan_cmd) return cmd_gcv_scan(scan, out);
    if (*pred_cmd) return cmd_predict(pred, out, err);
    if (*inspect_cmd) return cmd_inspect(inspect_path, inspect_json, out);
    if (*select_cmd) return cmd_knots_select(knots, out);
    if (*seq_cmd) return cmd_knots_sequential(knots, out);
    if (*t1_cmd) return cmd_bench("table1", t1, out);
    if (*t3_cmd) return cmd_bench("table3", t3, out);
    if (*rep_cmd) return cmd_bench("replication", rep, out);
    if (*cc_cmd) return cmd_bench("ccpp", cc, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace recon::cli
