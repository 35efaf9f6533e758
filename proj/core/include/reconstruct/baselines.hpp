#pragma once

#include "reconstruct/estimators.hpp"

namespace recon {

/// Prior f ~ GP(0, τ²R) observed with N(0, σ²) noise.
struct VarianceParams {
  double tau2 = 1.0;
  double sigma2 = 1.0;
};

/// Kriging with regression terms on all n points and nugget nλ.
FittedModel fit_gpr(const MatrixXd& x, const VectorXd& y, const KernelSpec& spec, RegressionBasis g,
                    const LambdaPolicy& policy);

/// fit_gpr with R_X replaced by the rank-m surrogate R_XA R_A⁻¹ R_XAᵀ; never
/// forms an n × n matrix.
FittedModel fit_nystrom(const MatrixXd& x, const VectorXd& y, const KnotSet& knots, const KernelSpec& spec,
                        RegressionBasis g, const LambdaPolicy& policy);

/// Sparse pseudo-input GP with diagonal correction Λ = diag(R_X - R̃_X),
/// clamped at 0. Prediction r_A(x)ᵀR_A⁻¹γ̂.
FittedModel fit_spgp(const MatrixXd& x, const VectorXd& y, const KnotSet& knots, const KernelSpec& spec,
                     const VarianceParams& vp);

/// Quasi-posterior mode argmin ‖y - R_XA R_A⁻¹γ‖² + (σ²/τ²) γᵀR_A⁻¹γ.
FittedModel fit_empirical_bayes(const MatrixXd& x, const VectorXd& y, const KnotSet& knots, const KernelSpec& spec,
                                const VarianceParams& vp);

/// Log marginal likelihood of y under the SPGP covariance
/// τ²(R̃_X + Λ) + σ²I, computed by Woodbury in O(m²n).
double spgp_log_likelihood(const MatrixXd& x, const VectorXd& y, const KnotSet& knots, const KernelSpec& spec,
                           const VarianceParams& vp);

inline constexpr int kVarianceGridSize = 20;

/// Coordinate search of the SPGP likelihood over 20-point log grids for τ²
/// and σ² spanning [1e-4, 1e4]·var(y). Throws DegenerateData if var(y) = 0.
VarianceParams estimate_variances(const MatrixXd& x, const VectorXd& y, const KnotSet& knots,
                                  const KernelSpec& spec);

}  // namespace recon
