#include "reconstruct/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <limits>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "reconstruct/error.hpp"
#include "reconstruct/random.hpp"

namespace recon {

namespace {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

// Independent stream for the test points of one repetition.
constexpr std::uint64_t kTestStream = 0x7465737470747321ULL;
constexpr std::uint64_t kSubsetStream = 0x7375627365747321ULL;

std::uint64_t stream_seed(std::uint64_t rep_seed, std::uint64_t stream) { return mix_seed(rep_seed) ^ stream; }

// Runs body(i) for i in [0, count) on up to `jobs` threads. Exceptions are
// rethrown after all workers finish (first by index).
void parallel_for(Index count, int jobs, const std::function<void(Index)>& body) {
  const int workers = std::clamp<int>(jobs, 1, static_cast<int>(std::max<Index>(count, 1)));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
  if (workers == 1) {
    for (Index i = 0; i < count; ++i) {
      try {
        body(i);
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  } else {
    std::atomic<Index> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (Index i = next++; i < count; i = next++) {
          try {
            body(i);
          } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

// Runs one fit-and-score, recording failures instead of aborting.
RunRecord scored_run(std::string method, Index rep, Index inner, std::uint64_t seed,
                     const std::function<double()>& score) {
  RunRecord r;
  r.method = std::move(method);
  r.repetition = rep;
  r.inner = inner;
  r.seed = seed;
  try {
    r.value = score();
    if (!std::isfinite(r.value)) {
      r.failed = true;
      r.error = "non-finite score";
    }
  } catch (const Error& e) {
    r.failed = true;
    r.error = e.what();
  }
  return r;
}

void check_methods(const std::vector<std::string>& methods, const std::vector<std::string>& allowed,
                   const std::string& experiment) {
  if (methods.empty()) throw Error(ErrorCode::InvalidArgument, experiment + " needs at least one method");
  for (const auto& m : methods) {
    if (std::find(allowed.begin(), allowed.end(), m) == allowed.end()) {
      throw Error(ErrorCode::InvalidArgument, "method '" + m + "' is not available in " + experiment);
    }
  }
}

std::vector<std::string> methods_or(const ExperimentConfig& c, std::vector<std::string> fallback) {
  return c.methods.empty() ? fallback : c.methods;
}

std::vector<Index> random_subset(Rng& rng, Index n, Index m) {
  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  for (Index k = 0; k < m; ++k) {
    const std::size_t pick = static_cast<std::size_t>(k) + rng.index(static_cast<std::size_t>(n - k));
    std::swap(perm[static_cast<std::size_t>(k)], perm[pick]);
  }
  std::vector<Index> subset(perm.begin(), perm.begin() + m);
  std::sort(subset.begin(), subset.end());
  return subset;
}

MatrixXd rows_of(const MatrixXd& x, const std::vector<Index>& rows) {
  MatrixXd out(static_cast<Index>(rows.size()), x.cols());
  for (std::size_t k = 0; k < rows.size(); ++k) out.row(static_cast<Index>(k)) = x.row(rows[k]);
  return out;
}

json vector_json(const VectorXd& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

// θ (estimated or fixed) and (τ², σ²) for a knot set, shared by all methods.
struct Tuning {
  KernelSpec spec = KernelSpec::gaussian(1, 12.5);
  VarianceParams vp;
  std::vector<double> objective;
  bool has_variances = false;
};

Tuning tune(const ExperimentConfig& c, const MatrixXd& x, const VectorXd& y, const KnotSet& knots, bool variances) {
  Tuning t;
  const Index d = x.cols();
  if (c.estimate_theta) {
    KernelParamOptions opt;
    opt.max_iter = c.kernel_max_iter;
    const auto est = estimate_kernel_params(x, y, knots, RegressionBasis::linear, VectorXd::Constant(d, c.theta), opt);
    t.spec = KernelSpec::gaussian(est.theta);
    t.objective = est.objective;
  } else {
    t.spec = KernelSpec::gaussian(d, c.theta);
  }
  if (variances) {
    t.vp = estimate_variances(x, y, knots, t.spec);
    t.has_variances = true;
  }
  return t;
}

json tuning_json(const Tuning& t) {
  json j;
  j["theta"] = vector_json(t.spec.theta());
  if (t.has_variances) j["variances"] = {{"tau2", t.vp.tau2}, {"sigma2", t.vp.sigma2}};
  if (!t.objective.empty()) j["kernel_objective"] = t.objective;
  return j;
}

double subset_method_score(const std::string& method, const MatrixXd& x, const VectorXd& y, const KnotSet& knots,
                           const Tuning& t, const ExperimentConfig& c, const MatrixXd& x_test,
                           const VectorXd& target) {
  const Index n = x.rows();
  if (method == "gprr") {
    return evaluate(fit_gprr(x, y, knots, t.spec, RegressionBasis::linear, default_lambda_policy(knots.size(), n)),
                    x_test, target);
  }
  if (method == "spgp") return evaluate(fit_spgp(x, y, knots, t.spec, t.vp), x_test, target);
  if (method == "nystrom") {
    return evaluate(fit_nystrom(x, y, knots, t.spec, RegressionBasis::linear, LambdaPolicy::gcv(c.lambda_grid)),
                    x_test, target);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown method " + method);
}

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sd_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double mu = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - mu) * (x - mu);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

std::string format_sigma(double sigma) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(2) << sigma;
  return out.str();
}

}  // namespace

std::string summary_key(const RunRecord& run) {
  return std::isnan(run.sigma) ? run.method : run.method + "@" + format_sigma(run.sigma);
}

std::map<std::string, MethodSummary> summarize(const std::vector<RunRecord>& runs) {
  // key -> repetition -> values, in insertion order of repetition index.
  std::map<std::string, std::map<Index, std::vector<double>>> groups;
  std::map<std::string, MethodSummary> out;
  for (const auto& r : runs) {
    MethodSummary& s = out[summary_key(r)];
    if (r.failed) {
      ++s.failures;
      continue;
    }
    ++s.runs;
    groups[summary_key(r)][r.inner < 0 ? 0 : r.repetition].push_back(r.value);
  }
  for (auto& [key, by_rep] : groups) {
    MethodSummary& s = out[key];
    std::vector<double> all;
    std::vector<double> means;
    std::vector<double> sds;
    bool nested = false;
    for (const auto& r : runs) {
      if (summary_key(r) == key && !r.failed && r.inner >= 0) nested = true;
    }
    for (const auto& [rep, values] : by_rep) {
      all.insert(all.end(), values.begin(), values.end());
      means.push_back(mean_of(values));
      sds.push_back(sd_of(values));
    }
    s.mean_mse = mean_of(all);
    s.sd = sd_of(all);
    s.mmse = nested ? mean_of(means) : s.mean_mse;
    s.mstd = nested ? mean_of(sds) : s.sd;
  }
  return out;
}

json config_to_json(const ExperimentConfig& c, const std::string& experiment) {
  json j;
  j["experiment"] = experiment;
  j["function"] = c.function;
  j["d"] = c.d;
  j["n"] = c.n;
  j["sigma"] = c.sigma;
  j["m"] = c.knot_count();
  j["methods"] = c.methods;
  j["repetitions"] = c.repetitions;
  j["inner"] = c.inner;
  j["test_size"] = c.test_size;
  j["seed"] = c.seed;
  j["theta0"] = c.theta;
  j["estimate_theta"] = c.estimate_theta;
  j["kernel_max_iter"] = c.kernel_max_iter;
  j["ackley_standard"] = c.ackley_standard;
  j["lambda_grid"] = c.lambda_grid;
  j["subset_trials"] = c.subset_trials;
  j["stop_rule"] = {{"min_relative_improvement", c.stop_rule.min_relative_improvement},
                    {"patience", c.stop_rule.patience},
                    {"max_iterations", c.stop_rule.max_iterations},
                    {"early_stop", c.stop_rule.early_stop}};
  j["sigma_grid"] = c.sigma_grid;
  j["knots_per_design"] = c.knots_per_design;
  j["replications_per_knot"] = c.replications_per_knot;
  return j;
}

// ---------------------------------------------------------------------------

BenchmarkReport run_table1(const ExperimentConfig& config) {
  ExperimentConfig c = config;
  c.methods = methods_or(c, {"krr", "gpr", "gprr"});
  check_methods(c.methods, {"krr", "gpr", "gprr"}, "table1");
  const TestFunctionId fn = parse_test_function(c.function);
  if (c.repetitions < 1 || c.n < 2 || c.test_size < 1) throw Error(ErrorCode::InvalidArgument, "counts must be positive");
  const KernelSpec spec = KernelSpec::gaussian(c.d, c.theta);
  const LambdaPolicy policy = LambdaPolicy::gcv(c.lambda_grid);

  const std::size_t nm = c.methods.size();
  std::vector<RunRecord> slots(static_cast<std::size_t>(c.repetitions) * nm);
  std::vector<double> time_ms(slots.size(), 0.0);
  parallel_for(c.repetitions, c.jobs, [&](Index rep) {
    const std::uint64_t seed = repetition_seed(c.seed, rep);
    const Dataset ds = simulate(fn, c.n, c.d, c.sigma, seed, c.ackley_standard);
    const MatrixXd xt = uniform_points(c.test_size, c.d, stream_seed(seed, kTestStream));
    const VectorXd truth = evaluate_function(fn, xt, c.ackley_standard);
    for (std::size_t k = 0; k < nm; ++k) {
      const std::string& method = c.methods[k];
      const auto start = Clock::now();
      slots[static_cast<std::size_t>(rep) * nm + k] = scored_run(method, rep, -1, seed, [&] {
        if (method == "krr") return evaluate(fit_krr(ds.x, ds.y, spec, policy), xt, truth);
        if (method == "gpr") return evaluate(fit_gpr(ds.x, ds.y, spec, RegressionBasis::linear, policy), xt, truth);
        return evaluate(fit_gprr(ds.x, ds.y, KnotSet(ds.x), spec, RegressionBasis::linear, policy), xt, truth);
      });
      time_ms[static_cast<std::size_t>(rep) * nm + k] = elapsed_ms(start);
    }
  });

  BenchmarkReport report;
  report.experiment = "table1";
  report.config = config_to_json(c, report.experiment);
  report.seed = c.seed;
  report.per_run = std::move(slots);
  report.summary = summarize(report.per_run);
  report.details["protocol"] = "A = X, Gaussian kernel with fixed theta, lambda by GCV, g = (1, x) for gpr and gprr";
  if (c.timings) {
    json t = json::object();
    for (std::size_t k = 0; k < nm; ++k) {
      double total = 0.0;
      for (Index rep = 0; rep < c.repetitions; ++rep) total += time_ms[static_cast<std::size_t>(rep) * nm + k];
      t[c.methods[k]] = total;
    }
    report.timings = t;
  }
  return report;
}

BenchmarkReport run_table3(const ExperimentConfig& config) {
  ExperimentConfig c = config;
  c.methods = methods_or(c, {"gprr", "spgp", "nystrom"});
  check_methods(c.methods, {"gprr", "spgp", "nystrom"}, "table3");
  const TestFunctionId fn = parse_test_function(c.function);
  const Index m = c.knot_count();
  if (c.repetitions < 1 || c.inner < 1 || m < 2 || m > c.n) throw Error(ErrorCode::InvalidArgument, "bad table3 counts");
  const bool need_vp = std::find(c.methods.begin(), c.methods.end(), "spgp") != c.methods.end();

  const std::size_t nm = c.methods.size();
  const std::size_t per_rep = static_cast<std::size_t>(c.inner) * nm;
  std::vector<RunRecord> slots(static_cast<std::size_t>(c.repetitions) * per_rep);
  std::vector<double> time_ms(slots.size(), 0.0);
  std::vector<json> knots(static_cast<std::size_t>(c.repetitions));
  std::vector<json> tuning(static_cast<std::size_t>(c.repetitions));

  parallel_for(c.repetitions, c.jobs, [&](Index rep) {
    const std::uint64_t seed = repetition_seed(c.seed, rep);
    const Dataset ds = simulate(fn, c.n, c.d, c.sigma, seed, c.ackley_standard);
    const MatrixXd xt = uniform_points(c.test_size, c.d, stream_seed(seed, kTestStream));
    const VectorXd truth = evaluate_function(fn, xt, c.ackley_standard);
    Rng rng(stream_seed(seed, kSubsetStream));
    std::vector<std::vector<Index>> subsets;
    for (Index k = 0; k < c.inner; ++k) subsets.push_back(random_subset(rng, c.n, m));
    knots[static_cast<std::size_t>(rep)] = subsets;

    const auto start = Clock::now();
    const Tuning t = tune(c, ds.x, ds.y, KnotSet(rows_of(ds.x, subsets[0])), need_vp);
    const double tune_ms = elapsed_ms(start);
    tuning[static_cast<std::size_t>(rep)] = tuning_json(t);

    for (Index k = 0; k < c.inner; ++k) {
      const KnotSet a(rows_of(ds.x, subsets[static_cast<std::size_t>(k)]));
      for (std::size_t j = 0; j < nm; ++j) {
        const std::size_t slot = static_cast<std::size_t>(rep) * per_rep + static_cast<std::size_t>(k) * nm + j;
        const auto s = Clock::now();
        slots[slot] = scored_run(c.methods[j], rep, k, seed,
                                 [&] { return subset_method_score(c.methods[j], ds.x, ds.y, a, t, c, xt, truth); });
        time_ms[slot] = elapsed_ms(s) + (k == 0 ? tune_ms / static_cast<double>(nm) : 0.0);
      }
    }
  });

  BenchmarkReport report;
  report.experiment = "table3";
  report.config = config_to_json(c, report.experiment);
  report.seed = c.seed;
  report.per_run = std::move(slots);
  report.summary = summarize(report.per_run);
  report.knots = knots;
  report.details["tuning"] = tuning;
  report.details["protocol"] =
      "theta by least squares on the first knot subset of each repetition (g = (1, x)), shared by all methods; "
      "(tau2, sigma2) by SPGP likelihood grid search; gprr unpenalized when m <= n/5; nystrom lambda by GCV";
  if (c.timings) {
    json tj = json::object();
    for (std::size_t j = 0; j < nm; ++j) {
      double total = 0.0;
      for (std::size_t s = j; s < time_ms.size(); s += nm) total += time_ms[s];
      tj[c.methods[j]] = total;
    }
    report.timings = tj;
  }
  return report;
}

BenchmarkReport run_ccpp(const Dataset& data, const ExperimentConfig& config) {
  ExperimentConfig c = config;
  c.methods = methods_or(c, {"gprr", "spgp", "nystrom"});
  check_methods(c.methods, {"gprr", "spgp", "nystrom"}, "ccpp");
  if (data.x_test.rows() == 0) throw Error(ErrorCode::InvalidArgument, "CCPP data has no test split");
  c.d = data.x.cols();
  c.n = data.x.rows();
  c.test_size = data.x_test.rows();
  c.function = "ccpp";
  const Index m = c.knot_count();
  const bool need_vp = std::find(c.methods.begin(), c.methods.end(), "spgp") != c.methods.end();

  const auto start = Clock::now();
  const KnotSelection sel = select_knots(data.x, m, c.subset_trials, c.seed, c.jobs);
  const Tuning t = tune(c, data.x, data.y, sel.knots, need_vp);
  BenchmarkReport report;
  report.experiment = "ccpp";
  for (const auto& method : c.methods) {
    report.per_run.push_back(scored_run(method, 0, -1, c.seed, [&] {
      return subset_method_score(method, data.x, data.y, sel.knots, t, c, data.x_test, data.y_test);
    }));
  }
  report.config = config_to_json(c, report.experiment);
  report.seed = c.seed;
  report.summary = summarize(report.per_run);
  report.knots = json::array({sel.indices});
  report.details["criterion"] = sel.criterion;
  report.details["tuning"] = tuning_json(t);
  report.details["source_rows"] = data.source_rows;
  report.details["warnings"] = data.warnings;
  if (c.timings) report.timings = json{{"total", elapsed_ms(start)}};
  return report;
}

SequentialResult run_ccpp_sequential(const Dataset& data, const ExperimentConfig& config, Index m0, int iterations) {
  if (data.x_test.rows() == 0) throw Error(ErrorCode::InvalidArgument, "data has no test split");
  const KnotSelection sel = select_knots(data.x, m0, config.subset_trials, config.seed, config.jobs);
  ExperimentConfig c = config;
  const Tuning t = tune(c, data.x, data.y, sel.knots, false);

  SequentialResult result;
  result.theta = t.spec.theta();
  result.knot_indices = sel.indices;
  std::vector<bool> used(static_cast<std::size_t>(data.x.rows()), false);
  for (Index i : sel.indices) used[static_cast<std::size_t>(i)] = true;

  auto fit = [&](const std::vector<Index>& idx) {
    const KnotSet a(rows_of(data.x, idx));
    return fit_gprr(data.x, data.y, a, t.spec, RegressionBasis::linear, default_lambda_policy(a.size(), data.x.rows()));
  };
  FittedModel model = fit(result.knot_indices);
  result.steps.push_back({0, static_cast<Index>(result.knot_indices.size()), -1, model.diagnostics.gcv,
                          evaluate(model, data.x_test, data.y_test)});

  SequentialStopRule rule = c.stop_rule;
  rule.max_iterations = iterations;
  SequentialStopper stopper(rule, model.diagnostics.gcv);
  for (int it = 1; it <= iterations; ++it) {
    // Rows equal to an existing knot are not candidates either.
    std::vector<bool> excluded = rows_in_knot_set(data.x, model.knots);
    for (std::size_t i = 0; i < used.size(); ++i) excluded[i] = excluded[i] || used[i];
    const Index add = next_knot(data.y, predict(model, data.x), excluded);
    used[static_cast<std::size_t>(add)] = true;
    result.knot_indices.push_back(add);
    model = fit(result.knot_indices);
    result.steps.push_back({it, static_cast<Index>(result.knot_indices.size()), add, model.diagnostics.gcv,
                            evaluate(model, data.x_test, data.y_test)});
    if (stopper.update(model.diagnostics.gcv)) {
      result.stopped_early = it < iterations;
      break;
    }
  }
  return result;
}

BenchmarkReport sequential_report(const SequentialResult& result, const ExperimentConfig& config) {
  BenchmarkReport report;
  report.experiment = "ccpp-sequential";
  report.config = config_to_json(config, report.experiment);
  report.seed = config.seed;
  for (const auto& s : result.steps) {
    RunRecord r;
    r.method = "gprr";
    r.repetition = s.iteration;
    r.seed = config.seed;
    r.value = s.test_error;
    report.per_run.push_back(r);
  }
  report.summary = summarize(report.per_run);
  json steps = json::array();
  for (const auto& s : result.steps) {
    steps.push_back({{"iteration", s.iteration}, {"knots", s.knots}, {"added", s.added}, {"gcv", s.gcv},
                     {"test_error", s.test_error}});
  }
  report.details["steps"] = steps;
  report.details["theta"] = vector_json(result.theta);
  report.details["stopped_early"] = result.stopped_early;
  report.knots = json::array({result.knot_indices});
  return report;
}

// ---------------------------------------------------------------------------

std::vector<double> default_sigma_grid() {
  std::vector<double> g;
  for (int k = 1; k <= 11; ++k) g.push_back(0.05 * k);
  return g;
}

double replication_mise(InterpolatorKind kind, Index m, Index l, double sigma, std::uint64_t seed) {
  const VectorXd knots = kind == InterpolatorKind::lagrange ? chebyshev_knots(m) : equispaced_knots(m);
  const ReplicationDesign design = replication_design(knots, l);
  const VectorXd x = design.points();
  Rng rng(mix_seed(seed));
  VectorXd y(x.size());
  for (Index i = 0; i < x.size(); ++i) {
    y[i] = test_function(TestFunctionId::f1d, x.segment(i, 1)) + sigma * rng.normal();
  }
  const FittedModel model = fit_replication(design, y, kind);
  return mise_1d(model, [](double t) { return test_function(TestFunctionId::f1d, VectorXd::Constant(1, t)); });
}

BenchmarkReport run_replication_study(const ExperimentConfig& config) {
  ExperimentConfig c = config;
  c.function = "f1d";
  c.d = 1;
  if (c.sigma_grid.empty()) c.sigma_grid = default_sigma_grid();
  c.methods = methods_or(c, {"lagrange", "spline"});
  check_methods(c.methods, {"lagrange", "spline"}, "replication");
  c.n = c.knots_per_design * c.replications_per_knot;
  c.m = c.knots_per_design;

  const std::size_t ns = c.sigma_grid.size();
  const std::size_t nm = c.methods.size();
  std::vector<RunRecord> slots(static_cast<std::size_t>(c.repetitions) * ns * nm);
  parallel_for(c.repetitions, c.jobs, [&](Index rep) {
    const std::uint64_t seed = repetition_seed(c.seed, rep);
    for (std::size_t si = 0; si < ns; ++si) {
      for (std::size_t k = 0; k < nm; ++k) {
        const InterpolatorKind kind = c.methods[k] == "lagrange" ? InterpolatorKind::lagrange : InterpolatorKind::spline;
        // Same noise stream for every σ of a repetition.
        RunRecord r = scored_run(c.methods[k], rep, -1, seed, [&] {
          return replication_mise(kind, c.knots_per_design, c.replications_per_knot, c.sigma_grid[si], seed);
        });
        r.sigma = c.sigma_grid[si];
        slots[(static_cast<std::size_t>(rep) * ns + si) * nm + k] = std::move(r);
      }
    }
  });

  BenchmarkReport report;
  report.experiment = "replication";
  report.config = config_to_json(c, report.experiment);
  report.seed = c.seed;
  report.per_run = std::move(slots);
  report.summary = summarize(report.per_run);
  return report;
}

}  // namespace recon
