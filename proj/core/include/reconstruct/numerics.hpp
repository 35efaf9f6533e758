#pragma once

#include <array>
#include <cstdint>

#include <Eigen/Cholesky>
#include <Eigen/Core>

namespace recon {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Relative nugget ladder tried in order; each rung is scaled by the mean
/// diagonal of the matrix being factored.
inline constexpr std::array<double, 3> kJitterLadder = {0.0, 1e-10, 1e-8};

/// Cholesky factorization of a symmetric positive definite matrix, with the
/// nugget that had to be added to the diagonal to make it succeed.
class SpdFactorization {
 public:
  /// Factors `a + jitter * I`, walking kJitterLadder until the Cholesky
  /// succeeds. Throws NotPositiveDefinite when every rung fails.
  static SpdFactorization factor(const MatrixXd& a);

  Index dimension() const { return llt_.rows(); }
  double jitter_applied() const { return jitter_; }

  /// Lower-triangular L with L Lᵀ = a + jitter * I.
  MatrixXd lower() const { return llt_.matrixL(); }

  MatrixXd solve(const MatrixXd& rhs) const;
  VectorXd solve(const VectorXd& rhs) const;

  /// L⁻¹ rhs (half solve), used to whiten cross-covariances.
  MatrixXd solve_lower(const MatrixXd& rhs) const;

  MatrixXd inverse() const;
  double log_determinant() const;

 private:
  SpdFactorization(Eigen::LLT<MatrixXd> llt, double jitter)
      : llt_(std::move(llt)), jitter_(jitter) {}

  Eigen::LLT<MatrixXd> llt_;
  double jitter_ = 0.0;
};

struct SpdSolveResult {
  MatrixXd solution;
  double jitter_applied = 0.0;
};

/// Solves (a + jitter I) X = rhs for symmetric positive definite `a`.
SpdSolveResult spd_solve(const MatrixXd& a, const MatrixXd& rhs);

/// Symmetric matrix with bandwidth 2, stored by diagonals.
class BandedSpdMatrix {
 public:
  explicit BandedSpdMatrix(Index n);

  static BandedSpdMatrix identity(Index n);

  /// n λ MᵀM + I where M is the (n-2)×n second-difference operator.
  static BandedSpdMatrix second_difference_system(Index n, double lambda);

  Index size() const { return main_.size(); }

  /// Entry (i, i - offset), offset in {0, 1, 2}.
  double& at(Index i, int offset);
  double at(Index i, int offset) const;

  MatrixXd to_dense() const;
  VectorXd multiply(const VectorXd& x) const;

 private:
  VectorXd main_;
  VectorXd first_;   // (i, i-1), index i in [1, n)
  VectorXd second_;  // (i, i-2), index i in [2, n)
};

/// O(n) LDLᵀ factorization of a BandedSpdMatrix.
class BandedLdlt {
 public:
  explicit BandedLdlt(const BandedSpdMatrix& a);

  Index size() const { return d_.size(); }
  VectorXd solve(const VectorXd& rhs) const;

  /// Diagonal of a⁻¹ via the Takahashi recurrences, O(n).
  VectorXd inverse_diagonal() const;

 private:
  VectorXd d_;
  VectorXd l1_;  // L(i, i-1)
  VectorXd l2_;  // L(i, i-2)
};

VectorXd banded_spd_solve(const BandedSpdMatrix& a, const VectorXd& rhs);

inline constexpr Index kHutchinsonThreshold = 10000;
inline constexpr int kHutchinsonProbes = 64;
inline constexpr std::uint64_t kHutchinsonSeed = 20190611;

/// A trace value; `stochastic` marks Hutchinson estimates.
struct TraceEstimate {
  double value = 0.0;
  bool stochastic = false;
  int probes = 0;
  std::uint64_t seed = 0;
};

/// trace(B (BᵀB + nλΣ)⁻¹ Bᵀ) with n = rows(B). Throws SingularSystem when the
/// inner matrix cannot be factored even with jitter.
TraceEstimate hat_trace(const MatrixXd& b, const MatrixXd& sigma, double lambda);

/// trace(a⁻¹) for a banded system. Exact for n <= kHutchinsonThreshold,
/// Hutchinson with kHutchinsonProbes Rademacher probes above it.
TraceEstimate hat_trace(const BandedSpdMatrix& a);

}  // namespace recon
