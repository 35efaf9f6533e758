#pragma once

#include <vector>

#include "reconstruct/numerics.hpp"

namespace recon {

enum class KernelFamily { gaussian, matern };

/// Stationary correlation R(h) with R(0) = 1. Inputs are expected in
/// [0,1]^d already; the kernel never rescales them.
///
/// Gaussian:  R(h) = exp(-Σ θ_j h_j²), one θ_j per coordinate.
/// Matérn:    product over coordinates of the Matérn correlation with
///            smoothness ν ∈ {1/2, 3/2, 5/2} and range φ, evaluated through the
///            half-integer closed forms.
class KernelSpec {
 public:
  static KernelSpec gaussian(VectorXd theta);
  static KernelSpec gaussian(Index d, double theta);
  static KernelSpec matern(double nu, double phi);

  KernelFamily family() const { return family_; }
  const VectorXd& theta() const { return theta_; }
  double nu() const { return nu_; }
  double phi() const { return phi_; }

  /// Dimension the spec is bound to; 0 means "any" (Matérn).
  Index dimension() const { return family_ == KernelFamily::gaussian ? theta_.size() : 0; }

  /// Throws DimensionMismatch if the spec cannot be applied to d-dimensional inputs.
  void check_dimension(Index d) const;

  double operator()(const Eigen::Ref<const VectorXd>& h) const;

  bool operator==(const KernelSpec& other) const = default;

 private:
  KernelSpec() = default;

  KernelFamily family_ = KernelFamily::gaussian;
  VectorXd theta_;
  double nu_ = 0.0;
  double phi_ = 0.0;
};

double kernel_value(const KernelSpec& spec, const Eigen::Ref<const VectorXd>& h);

/// Matérn correlation of one coordinate difference.
double matern_1d(double nu, double phi, double h);

/// Entry (i, j) = R(p_i - q_j); points are rows.
MatrixXd kernel_matrix(const KernelSpec& spec, const MatrixXd& p, const MatrixXd& q);

/// Symmetric correlation matrix of one point set (unit diagonal).
MatrixXd kernel_matrix(const KernelSpec& spec, const MatrixXd& p);

/// r_A(x) = (R(x - a_1), ..., R(x - a_m))ᵀ.
VectorXd kernel_vector(const KernelSpec& spec, const MatrixXd& a, const Eigen::Ref<const VectorXd>& x);

}  // namespace recon

#include "reconstruct/knot_set.hpp"

namespace recon {

/// Cholesky of R_A with the nugget ladder applied.
SpdFactorization correlation_matrix_factored(const KernelSpec& spec, const KnotSet& knots);

}  // namespace recon
