#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "reconstruct/estimators.hpp"
#include "reconstruct/test_functions.hpp"

namespace recon {

/// Inputs in [0,1]^d (rows) with responses, an optional noiseless truth and
/// an optional held-out test split.
struct Dataset {
  MatrixXd x;
  VectorXd y;
  VectorXd truth;  // f(x_i) when known, else empty
  MatrixXd x_test;
  VectorXd y_test;
  std::vector<std::string> feature_names;
  std::string response_name = "y";
  Index source_rows = 0;
  std::vector<std::string> warnings;
};

/// X uniform on [0,1]^d and y = f(X) + N(0, σ²) noise, all from `seed`.
Dataset simulate(TestFunctionId fn, Index n, Index d, double sigma, std::uint64_t seed, bool ackley_standard = false);

/// n × d uniform points from the seeded stream.
MatrixXd uniform_points(Index n, Index d, std::uint64_t seed);

/// f evaluated at every row.
VectorXd evaluate_function(TestFunctionId fn, const MatrixXd& x, bool ackley_standard = false);

/// Mean squared difference of two equal-length vectors.
double mean_squared_error(const VectorXd& prediction, const VectorXd& truth);

/// Mean squared test error of the model against noiseless truth.
double evaluate(const FittedModel& model, const MatrixXd& x_test, const VectorXd& truth);

inline constexpr Index kMiseGrid = 1001;

/// Trapezoid ∫_0^1 (f̂ - f)² on an equispaced grid.
double mise_1d(const std::function<double(double)>& estimate, const std::function<double(double)>& truth,
               Index grid = kMiseGrid);
double mise_1d(const FittedModel& model, const std::function<double(double)>& truth, Index grid = kMiseGrid);

// ---------------------------------------------------------------------------
// CSV

struct CsvTable {
  std::vector<std::string> header;
  MatrixXd values;
};

/// Header row plus numeric rows; throws IoError / BadSchema.
CsvTable read_csv(const std::filesystem::path& path);
void write_csv(const std::filesystem::path& path, const CsvTable& table);

/// Generic layout x1..xd,y (last column is the response).
Dataset load_dataset_csv(const std::filesystem::path& path);
void save_dataset_csv(const std::filesystem::path& path, const MatrixXd& x, const VectorXd& y);

inline constexpr Index kCcppRows = 9568;
inline constexpr Index kCcppTrainRows = 9000;

/// AT,V,AP,RH,PE. First 9000 rows train, the rest test; features min-max
/// scaled with the training range, response unscaled. A row count other
/// than 9568 is kept but recorded in `warnings`.
Dataset load_ccpp(const std::filesystem::path& path);

}  // namespace recon
