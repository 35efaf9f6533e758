#pragma once

#include <cstdint>

#include <Eigen/LU>
#include <reconstruct/reconstruct.hpp>

namespace testing {

using recon::Index;
using recon::MatrixXd;
using recon::VectorXd;

inline MatrixXd random_matrix(Index rows, Index cols, std::uint64_t seed) {
  recon::Rng rng(recon::mix_seed(seed));
  MatrixXd a(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) a(i, j) = rng.normal();
  }
  return a;
}

inline VectorXd random_vector(Index n, std::uint64_t seed) { return random_matrix(n, 1, seed).col(0); }

inline MatrixXd random_spd(Index n, std::uint64_t seed) {
  const MatrixXd a = random_matrix(n, n, seed);
  return a * a.transpose() + static_cast<double>(n) * MatrixXd::Identity(n, n);
}

inline double max_abs(const MatrixXd& a) { return a.size() ? a.cwiseAbs().maxCoeff() : 0.0; }

// Explicit H = B (BᵀB + nλΣ)⁻¹ Bᵀ through a full-pivot LU.
inline MatrixXd dense_hat(const MatrixXd& b, const MatrixXd& sigma, double lambda) {
  const double n = static_cast<double>(b.rows());
  const MatrixXd inner = b.transpose() * b + n * lambda * sigma;
  return b * inner.fullPivLu().solve(b.transpose());
}

inline double dense_gcv(const MatrixXd& b, const VectorXd& y, const MatrixXd& sigma, double lambda) {
  const MatrixXd h = dense_hat(b, sigma, lambda);
  const double n = static_cast<double>(y.size());
  const double ratio = 1.0 - h.trace() / n;
  return (y - h * y).squaredNorm() / (n * ratio * ratio);
}

// yᵀ(R_X + nλI)⁻¹ r_X(x) at the rows of xt, by a dense LU solve.
inline VectorXd dense_krr(const recon::KernelSpec& spec, const MatrixXd& x, const VectorXd& y, double lambda,
                          const MatrixXd& xt) {
  MatrixXd k = recon::kernel_matrix(spec, x);
  k.diagonal().array() += static_cast<double>(x.rows()) * lambda;
  return recon::kernel_matrix(spec, xt, x) * k.fullPivLu().solve(y);
}

}  // namespace testing
