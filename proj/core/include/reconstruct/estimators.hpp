#pragma once

#include <limits>
#include <optional>
#include <string_view>
#include <vector>

#include "reconstruct/designs.hpp"
#include "reconstruct/interpolators.hpp"
#include "reconstruct/kernels.hpp"
#include "reconstruct/numerics.hpp"

namespace recon {

enum class InterpolatorKind { lagrange, spline, kernel, gp };

/// Which estimator produced a model.
enum class MethodTag { gprr, krr, fdp, replication, gpr, nystrom, spgp, eb };

struct FitDiagnostics {
  double gcv = std::numeric_limits<double>::quiet_NaN();
  double jitter = 0.0;
  int iterations = 0;
};

/// A fitted surface x ↦ f̂(x).
///
/// lagrange / spline: 1-D interpolation of gamma_hat over the knots.
/// kernel / gp:       f̂(x) = g(x)ᵀ beta + r_A(x)ᵀ weights, where beta is empty
///                    unless g_kind != none. gamma_hat holds f̂ at the knots.
struct FittedModel {
  InterpolatorKind interpolator = InterpolatorKind::gp;
  MethodTag method = MethodTag::gprr;
  KnotSet knots;
  VectorXd gamma_hat;
  double lambda = 0.0;
  std::optional<KernelSpec> kernel;
  RegressionBasis g_kind = RegressionBasis::none;
  SplineBoundary boundary = SplineBoundary::not_a_knot;
  VectorXd beta;
  VectorXd weights;
  FitDiagnostics diagnostics;
};

/// Rows of `xstar` are points; returns one prediction per row.
VectorXd predict(const FittedModel& model, const MatrixXd& xstar);

// ---------------------------------------------------------------------------
// λ selection

/// 50 log-spaced values on [1e-8, 1e2].
std::vector<double> default_lambda_grid();

struct LambdaPolicy {
  enum class Kind { none, fixed, gcv };

  Kind kind = Kind::none;
  double value = 0.0;
  std::vector<double> grid;

  static LambdaPolicy none() { return {}; }
  static LambdaPolicy fixed(double lambda) { return {Kind::fixed, lambda, {}}; }
  static LambdaPolicy gcv(std::vector<double> grid = default_lambda_grid()) {
    return {Kind::gcv, 0.0, std::move(grid)};
  }
};

/// No penalty when m <= n/5, GCV over the default grid otherwise.
LambdaPolicy default_lambda_policy(Index m, Index n);

struct LambdaSelection {
  double lambda = 0.0;
  double gcv = 0.0;
  std::vector<double> grid;
  std::vector<double> curve;
};

/// Ties (relative 1e-12) go to the larger λ.
LambdaSelection select_from_curve(std::vector<double> grid, std::vector<double> curve);

// ---------------------------------------------------------------------------
// Generic penalized reconstruction

/// (BᵀB + nλΣ)⁻¹ Bᵀy. Throws SingularSystem.
VectorXd ridge_reconstruct(const MatrixXd& b, const VectorXd& y, double lambda, const MatrixXd& sigma);

/// ‖y - Hy‖² / (n (1 - tr H / n)²) with H = B(BᵀB + nλΣ)⁻¹Bᵀ; +∞ when the
/// trace ratio reaches 1.
double gcv(const MatrixXd& b, const VectorXd& y, double lambda, const MatrixXd& sigma);

LambdaSelection select_lambda(const MatrixXd& b, const VectorXd& y, const MatrixXd& sigma,
                              const std::vector<double>& grid);

// ---------------------------------------------------------------------------
// Estimators

/// Penalized reconstruction with the GP interpolator and penalty V R_A Vᵀ.
/// When the rows of `x` are exactly the knots, B = I and the fit is
/// γ̂ = (I + nλ V)⁻¹ y.
FittedModel fit_gprr(const MatrixXd& x, const VectorXd& y, const KnotSet& knots, const KernelSpec& spec,
                     RegressionBasis g, const LambdaPolicy& policy);

/// GCV curve of fit_gprr over `grid`.
LambdaSelection gprr_gcv_curve(const MatrixXd& x, const VectorXd& y, const KnotSet& knots, const KernelSpec& spec,
                               RegressionBasis g, const std::vector<double>& grid);

/// f̂(x) = yᵀ(R_X + nλI)⁻¹ r_X(x).
FittedModel fit_krr(const MatrixXd& x, const VectorXd& y, const KernelSpec& spec, double lambda);
FittedModel fit_krr(const MatrixXd& x, const VectorXd& y, const KernelSpec& spec, const LambdaPolicy& policy);

struct FdpFit {
  VectorXd gamma_hat;
  double lambda = 0.0;
  VectorXd design;  // (i - 1)/(n - 1)
  SplineCoefficients spline;
  double gcv = std::numeric_limits<double>::quiet_NaN();
  TraceEstimate trace;
  LambdaSelection selection;  // empty unless λ came from GCV
};

/// Ridge on second differences of the fitted values over an equispaced grid:
/// (nλMᵀM + I)γ = y, solved in O(n). Requires n >= 3.
FdpFit fit_fdp(const VectorXd& y, const LambdaPolicy& policy, SplineBoundary boundary = SplineBoundary::not_a_knot);

/// GCV of the FDP smoother at one λ.
double fdp_gcv(const VectorXd& y, double lambda, TraceEstimate* trace = nullptr);

FittedModel fdp_model(const FdpFit& fit);

/// Per-knot means of replicated responses (y ordered by knot), rebuilt by
/// Lagrange or spline interpolation. Throws LengthMismatch.
FittedModel fit_replication(const ReplicationDesign& design, const VectorXd& y, InterpolatorKind kind,
                            SplineBoundary boundary = SplineBoundary::not_a_knot);

struct KernelParamEstimate {
  VectorXd theta;
  VectorXd gamma_hat;
  std::vector<double> objective;  // ‖y - B(θ)γ‖²/n after each completed iteration
  int iterations = 0;
};

struct KernelParamOptions {
  int max_iter = 20;
  double tol = 1e-6;
  double log10_lower = -2.0;
  double log10_upper = 3.0;
  int line_search_iterations = 40;
};

/// Least-squares Gaussian θ by block coordinate descent: alternate the
/// unpenalized γ-step with per-coordinate golden-section θ-steps on log10 θ.
KernelParamEstimate estimate_kernel_params(const MatrixXd& x, const VectorXd& y, const KnotSet& knots,
                                           RegressionBasis g, const VectorXd& theta0,
                                           const KernelParamOptions& options = {});

/// Candidate row of `x` (not already a knot) with the largest squared residual.
Index next_knot(const MatrixXd& x, const KnotSet& knots, const VectorXd& y, const FittedModel& model);

}  // namespace recon
