#include "reconstruct/numerics.hpp"

#include <cmath>
#include <sstream>

#include "reconstruct/error.hpp"
#include "reconstruct/random.hpp"

namespace recon {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::UnsupportedNu: return "UnsupportedNu";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DuplicateKnots: return "DuplicateKnots";
    case ErrorCode::UnsortedKnots: return "UnsortedKnots";
    case ErrorCode::KnotOutOfRange: return "KnotOutOfRange";
    case ErrorCode::RankDeficientRegression: return "RankDeficientRegression";
    case ErrorCode::NoCandidatesLeft: return "NoCandidatesLeft";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::DegenerateData: return "DegenerateData";
    case ErrorCode::UnknownFunction: return "UnknownFunction";
    case ErrorCode::BadSchema: return "BadSchema";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

SpdFactorization SpdFactorization::factor(const MatrixXd& a) {
  if (a.rows() != a.cols()) {
    std::ostringstream msg;
    msg << "expected a square matrix, got " << a.rows() << "x" << a.cols();
    throw Error(ErrorCode::DimensionMismatch, msg.str());
  }
  const Index n = a.rows();
  if (n == 0) return SpdFactorization(Eigen::LLT<MatrixXd>(a), 0.0);
  if (!a.allFinite()) throw Error(ErrorCode::NotPositiveDefinite, "matrix has non-finite entries");

  const double mean_diag = a.diagonal().mean();
  if (!(mean_diag > 0.0)) throw Error(ErrorCode::NotPositiveDefinite, "non-positive mean diagonal");

  for (double rung : kJitterLadder) {
    const double jitter = rung * mean_diag;
    MatrixXd shifted = a;
    shifted.diagonal().array() += jitter;
    Eigen::LLT<MatrixXd> llt(shifted);
    if (llt.info() == Eigen::Success && llt.matrixLLT().diagonal().allFinite() &&
        (llt.matrixLLT().diagonal().array() > 0.0).all()) {
      return SpdFactorization(std::move(llt), jitter);
    }
  }
  std::ostringstream msg;
  msg << "Cholesky failed for a " << n << "x" << n << " matrix after maximal jitter "
      << kJitterLadder.back() * mean_diag;
  throw Error(ErrorCode::NotPositiveDefinite, msg.str());
}

MatrixXd SpdFactorization::solve(const MatrixXd& rhs) const {
  if (rhs.rows() != dimension()) throw Error(ErrorCode::DimensionMismatch, "rhs rows differ from factor");
  return llt_.solve(rhs);
}

VectorXd SpdFactorization::solve(const VectorXd& rhs) const {
  if (rhs.size() != dimension()) throw Error(ErrorCode::DimensionMismatch, "rhs length differs from factor");
  return llt_.solve(rhs);
}

MatrixXd SpdFactorization::solve_lower(const MatrixXd& rhs) const {
  if (rhs.rows() != dimension()) throw Error(ErrorCode::DimensionMismatch, "rhs rows differ from factor");
  return llt_.matrixL().solve(rhs);
}

MatrixXd SpdFactorization::inverse() const {
  MatrixXd inv = llt_.solve(MatrixXd::Identity(dimension(), dimension()));
  return 0.5 * (inv + inv.transpose());
}

double SpdFactorization::log_determinant() const {
  return 2.0 * llt_.matrixLLT().diagonal().array().log().sum();
}

SpdSolveResult spd_solve(const MatrixXd& a, const MatrixXd& rhs) {
  if (a.rows() != rhs.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "matrix and rhs row counts differ");
  }
  const auto f = SpdFactorization::factor(a);
  return {f.solve(rhs), f.jitter_applied()};
}

// ---------------------------------------------------------------------------
// Banded (pentadiagonal) storage and solver.

BandedSpdMatrix::BandedSpdMatrix(Index n)
    : main_(VectorXd::Zero(n)),
      first_(VectorXd::Zero(std::max<Index>(n, 1))),
      second_(VectorXd::Zero(std::max<Index>(n, 2))) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "banded matrix needs n >= 1");
}

BandedSpdMatrix BandedSpdMatrix::identity(Index n) {
  BandedSpdMatrix m(n);
  m.main_.setOnes();
  return m;
}

BandedSpdMatrix BandedSpdMatrix::second_difference_system(Index n, double lambda) {
  if (lambda < 0.0) throw Error(ErrorCode::InvalidArgument, "lambda must be nonnegative");
  BandedSpdMatrix m = identity(n);
  if (n < 3 || lambda == 0.0) return m;
  const double s = static_cast<double>(n) * lambda;
  // Each row k of M is (1, -2, 1) on columns k, k+1, k+2; accumulate s * rowᵀ row.
  constexpr double c[3] = {1.0, -2.0, 1.0};
  for (Index k = 0; k + 2 < n; ++k) {
    for (int p = 0; p < 3; ++p) {
      for (int q = 0; q <= p; ++q) {
        m.at(k + p, p - q) += s * c[p] * c[q];
      }
    }
  }
  return m;
}

double& BandedSpdMatrix::at(Index i, int offset) {
  switch (offset) {
    case 0: return main_[i];
    case 1: return first_[i];
    case 2: return second_[i];
    default: throw Error(ErrorCode::InvalidArgument, "bandwidth is 2");
  }
}

double BandedSpdMatrix::at(Index i, int offset) const {
  return const_cast<BandedSpdMatrix*>(this)->at(i, offset);
}

MatrixXd BandedSpdMatrix::to_dense() const {
  const Index n = size();
  MatrixXd a = MatrixXd::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    a(i, i) = main_[i];
    if (i >= 1) a(i, i - 1) = a(i - 1, i) = first_[i];
    if (i >= 2) a(i, i - 2) = a(i - 2, i) = second_[i];
  }
  return a;
}

VectorXd BandedSpdMatrix::multiply(const VectorXd& x) const {
  const Index n = size();
  if (x.size() != n) throw Error(ErrorCode::DimensionMismatch, "vector length differs from matrix size");
  VectorXd y = main_.cwiseProduct(x);
  for (Index i = 1; i < n; ++i) {
    y[i] += first_[i] * x[i - 1];
    y[i - 1] += first_[i] * x[i];
  }
  for (Index i = 2; i < n; ++i) {
    y[i] += second_[i] * x[i - 2];
    y[i - 2] += second_[i] * x[i];
  }
  return y;
}

BandedLdlt::BandedLdlt(const BandedSpdMatrix& a)
    : d_(a.size()), l1_(VectorXd::Zero(a.size())), l2_(VectorXd::Zero(a.size())) {
  const Index n = a.size();
  for (Index i = 0; i < n; ++i) {
    double diag = a.at(i, 0);
    if (i >= 2) {
      l2_[i] = a.at(i, 2) / d_[i - 2];
      diag -= l2_[i] * l2_[i] * d_[i - 2];
    }
    if (i >= 1) {
      double off = a.at(i, 1);
      if (i >= 2) off -= l2_[i] * d_[i - 2] * l1_[i - 1];
      l1_[i] = off / d_[i - 1];
      diag -= l1_[i] * l1_[i] * d_[i - 1];
    }
    if (!(diag > 0.0) || !std::isfinite(diag)) {
      std::ostringstream msg;
      msg << "banded LDLt pivot " << i << " is " << diag;
      throw Error(ErrorCode::NotPositiveDefinite, msg.str());
    }
    d_[i] = diag;
  }
}

VectorXd BandedLdlt::solve(const VectorXd& rhs) const {
  const Index n = size();
  if (rhs.size() != n) throw Error(ErrorCode::DimensionMismatch, "rhs length differs from matrix size");
  VectorXd x = rhs;
  for (Index i = 1; i < n; ++i) {
    x[i] -= l1_[i] * x[i - 1];
    if (i >= 2) x[i] -= l2_[i] * x[i - 2];
  }
  x.array() /= d_.array();
  for (Index i = n - 2; i >= 0; --i) {
    x[i] -= l1_[i + 1] * x[i + 1];
    if (i + 2 < n) x[i] -= l2_[i + 2] * x[i + 2];
  }
  return x;
}

VectorXd BandedLdlt::inverse_diagonal() const {
  const Index n = size();
  VectorXd z0(n);
  VectorXd z1 = VectorXd::Zero(n);  // Z(i, i+1)
  VectorXd z2 = VectorXd::Zero(n);  // Z(i, i+2)
  for (Index i = n - 1; i >= 0; --i) {
    const double a = (i + 1 < n) ? l1_[i + 1] : 0.0;
    const double b = (i + 2 < n) ? l2_[i + 2] : 0.0;
    const double zi1i1 = (i + 1 < n) ? z0[i + 1] : 0.0;
    const double zi1i2 = (i + 2 < n) ? z1[i + 1] : 0.0;
    const double zi2i2 = (i + 2 < n) ? z0[i + 2] : 0.0;
    z2[i] = -(a * zi1i2 + b * zi2i2);
    z1[i] = -(a * zi1i1 + b * zi1i2);
    z0[i] = 1.0 / d_[i] - (a * z1[i] + b * z2[i]);
  }
  return z0;
}

VectorXd banded_spd_solve(const BandedSpdMatrix& a, const VectorXd& rhs) {
  return BandedLdlt(a).solve(rhs);
}

TraceEstimate hat_trace(const MatrixXd& b, const MatrixXd& sigma, double lambda) {
  if (sigma.rows() != b.cols() || sigma.cols() != b.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "Sigma must be m x m with m = cols(B)");
  }
  if (lambda < 0.0) throw Error(ErrorCode::InvalidArgument, "lambda must be nonnegative");
  const double n = static_cast<double>(b.rows());
  const MatrixXd gram = b.transpose() * b;
  MatrixXd system = gram + n * lambda * sigma;
  try {
    const auto f = SpdFactorization::factor(system);
    return {f.solve(gram).trace(), false, 0, 0};
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NotPositiveDefinite) throw Error(ErrorCode::SingularSystem, e.what());
    throw;
  }
}

TraceEstimate hat_trace(const BandedSpdMatrix& a) {
  const BandedLdlt ldlt(a);
  const Index n = a.size();
  if (n <= kHutchinsonThreshold) return {ldlt.inverse_diagonal().sum(), false, 0, 0};

  Rng rng(kHutchinsonSeed);
  VectorXd probe(n);
  double total = 0.0;
  for (int p = 0; p < kHutchinsonProbes; ++p) {
    for (Index i = 0; i < n; ++i) probe[i] = rng.rademacher();
    total += probe.dot(ldlt.solve(probe));
  }
  return {total / kHutchinsonProbes, true, kHutchinsonProbes, kHutchinsonSeed};
}

}  // namespace recon
