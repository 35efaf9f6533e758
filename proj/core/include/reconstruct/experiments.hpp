#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "reconstruct/baselines.hpp"
#include "reconstruct/dataset.hpp"
#include "reconstruct/designs.hpp"

namespace recon {

struct ExperimentConfig {
  std::string function = "I";
  Index d = 2;
  Index n = 200;
  double sigma = 1.0;
  Index m = 0;  // 0 means 10 d
  std::vector<std::string> methods;
  Index repetitions = 20;
  Index inner = 10;
  Index test_size = 2000;
  std::uint64_t seed = 0;
  double theta = 12.5;
  bool estimate_theta = true;
  int kernel_max_iter = 60;
  bool ackley_standard = false;
  std::vector<double> lambda_grid = default_lambda_grid();
  Index subset_trials = kDefaultSubsetTrials;
  SequentialStopRule stop_rule;
  std::vector<double> sigma_grid;
  Index knots_per_design = 7;
  Index replications_per_knot = 7;
  int jobs = 1;
  bool timings = false;

  Index knot_count() const { return m > 0 ? m : default_knot_count(d); }
};

struct RunRecord {
  std::string method;
  Index repetition = 0;
  Index inner = -1;  // -1 when there is no inner loop
  double sigma = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t seed = 0;
  double value = std::numeric_limits<double>::quiet_NaN();  // MSE, test error or MISE
  bool failed = false;
  std::string error;
};

/// mean_mse / sd pool every successful run; mmse / mstd average the per
/// repetition means and standard deviations over the inner loop (equal to
/// mean_mse / sd when there is no inner loop).
struct MethodSummary {
  double mmse = 0.0;
  double mstd = 0.0;
  double mean_mse = 0.0;
  double sd = 0.0;
  Index runs = 0;
  Index failures = 0;
};

struct BenchmarkReport {
  std::string experiment;
  nlohmann::json config;
  std::vector<RunRecord> per_run;
  std::map<std::string, MethodSummary> summary;
  nlohmann::json knots = nlohmann::json::array();
  nlohmann::json details = nlohmann::json::object();
  std::optional<nlohmann::json> timings;
  std::uint64_t seed = 0;
};

/// Groups runs by method (and σ when set) and computes the statistics above.
std::map<std::string, MethodSummary> summarize(const std::vector<RunRecord>& runs);

/// Summary key of a run: the method, suffixed with "@σ" when σ is set.
std::string summary_key(const RunRecord& run);

/// Seed of one repetition.
inline std::uint64_t repetition_seed(std::uint64_t seed, Index rep) { return seed + static_cast<std::uint64_t>(rep); }

/// Models I-III on the full training set (A = X): methods ⊆ {krr, gpr, gprr}.
BenchmarkReport run_table1(const ExperimentConfig& config);

/// Borehole, random knot subsets: methods ⊆ {gprr, spgp, nystrom}.
BenchmarkReport run_table3(const ExperimentConfig& config);

/// CCPP with knots chosen by the subset criterion: methods ⊆ {gprr, spgp, nystrom}.
BenchmarkReport run_ccpp(const Dataset& data, const ExperimentConfig& config);

struct SequentialStep {
  Index iteration = 0;
  Index knots = 0;
  Index added = -1;  // training row added at this step
  double gcv = 0.0;
  double test_error = 0.0;
};

struct SequentialResult {
  std::vector<SequentialStep> steps;
  std::vector<Index> knot_indices;  // initial knots first, then additions in order
  VectorXd theta;
  bool stopped_early = false;
};

/// Knots by the subset criterion, GPRR fit, then one maximum-residual knot
/// per iteration with a refit, recording GCV and test error.
SequentialResult run_ccpp_sequential(const Dataset& data, const ExperimentConfig& config, Index m0 = 40,
                                     int iterations = 15);

BenchmarkReport sequential_report(const SequentialResult& result, const ExperimentConfig& config);

/// σ grid 0.05, 0.10, ..., 0.55.
std::vector<double> default_sigma_grid();

/// MISE of one replicated-design fit of f1d: Chebyshev knots with Lagrange
/// reconstruction, or equispaced knots with spline reconstruction.
double replication_mise(InterpolatorKind kind, Index m, Index l, double sigma, std::uint64_t seed);

/// Both estimators over the σ grid; methods "lagrange" and "spline".
BenchmarkReport run_replication_study(const ExperimentConfig& config);

/// Serialized config echo with defaults expanded.
nlohmann::json config_to_json(const ExperimentConfig& config, const std::string& experiment);

}  // namespace recon
