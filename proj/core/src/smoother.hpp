#pragma once

// Shared algebra of the kriging-type smoothers (KRR, GPR, Nyström):
//   ŷ = Gβ + R̃ c,  c = Ψ(y - Gβ),  β = (GᵀΨG)⁻¹GᵀΨy,  Ψ = (R̃ + sI)⁻¹,
// with s = nλ and R̃ given by its nonzero spectrum R̃ = Q diag(e) Qᵀ.
// Then I - H = sP with P = Ψ - ΨG(GᵀΨG)⁻¹GᵀΨ, so GCV = n‖Py‖² / tr(P)².

#include "reconstruct/estimators.hpp"

namespace recon::detail {

class SpectralSmoother {
 public:
  /// q: n × r orthonormal columns, e: r eigenvalues. When r = n the
  /// complement terms are dropped exactly.
  SpectralSmoother(MatrixXd q, VectorXd e, MatrixXd g, VectorXd y);

  /// Smoother of a full symmetric kernel matrix.
  static SpectralSmoother from_kernel_matrix(const MatrixXd& r, MatrixXd g, VectorXd y);

  double gcv(double s) const;

  /// β and c at s > 0 (or s = 0 when the spectrum is full and positive).
  void solve(double s, VectorXd& beta, VectorXd& c) const;

  Index size() const { return y_.size(); }
  Index rank() const { return e_.size(); }

 private:
  // β and the pieces of GᵀΨG needed by gcv().
  VectorXd beta(double s, const VectorXd& d, Eigen::LLT<MatrixXd>* m_out) const;

  MatrixXd q_;
  VectorXd e_;
  MatrixXd g_;
  VectorXd y_;
  bool full_;
  VectorXd qy_;   // Qᵀy
  MatrixXd qg_;   // QᵀG
  MatrixXd gg_;   // GᵀG
  VectorXd gy_;   // Gᵀy
  double yy_;
};

/// λ from the policy; the curve is filled only for GCV.
LambdaSelection choose_lambda(const LambdaPolicy& policy, const auto& gcv_at_lambda) {
  switch (policy.kind) {
    case LambdaPolicy::Kind::none: return {0.0, gcv_at_lambda(0.0), {}, {}};
    case LambdaPolicy::Kind::fixed: return {policy.value, gcv_at_lambda(policy.value), {}, {}};
    case LambdaPolicy::Kind::gcv: {
      std::vector<double> curve;
      curve.reserve(policy.grid.size());
      for (double lambda : policy.grid) curve.push_back(gcv_at_lambda(lambda));
      return select_from_curve(policy.grid, std::move(curve));
    }
  }
  return {};
}

/// Universal kriging with nugget nλ on all training points (A = X):
/// β̂ by GLS with R_X + nλI, f̂(x) = g(x)ᵀβ̂ + r_X(x)ᵀ(R_X + nλI)⁻¹(y - G_Xβ̂).
FittedModel fit_full_kriging(const MatrixXd& x, const VectorXd& y, const KernelSpec& spec, RegressionBasis g,
                             const LambdaPolicy& policy, MethodTag tag);

void check_training_data(const MatrixXd& x, const VectorXd& y);

}  // namespace recon::detail
