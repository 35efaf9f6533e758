#include "smoother.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "reconstruct/error.hpp"

namespace recon::detail {

void check_training_data(const MatrixXd& x, const VectorXd& y) {
  if (x.rows() != y.size()) throw Error(ErrorCode::DimensionMismatch, "X rows and y length differ");
  if (x.rows() == 0) throw Error(ErrorCode::InvalidArgument, "no training data");
  if (!x.allFinite() || !y.allFinite()) throw Error(ErrorCode::InvalidArgument, "training data must be finite");
}

SpectralSmoother::SpectralSmoother(MatrixXd q, VectorXd e, MatrixXd g, VectorXd y)
    : q_(std::move(q)), e_(std::move(e)), g_(std::move(g)), y_(std::move(y)) {
  full_ = q_.cols() == y_.size();
  qy_ = q_.transpose() * y_;
  qg_ = q_.transpose() * g_;
  gg_ = g_.transpose() * g_;
  gy_ = g_.transpose() * y_;
  yy_ = y_.squaredNorm();
}

SpectralSmoother SpectralSmoother::from_kernel_matrix(const MatrixXd& r, MatrixXd g, VectorXd y) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(r);
  if (eig.info() != Eigen::Success) throw Error(ErrorCode::NotPositiveDefinite, "kernel eigendecomposition failed");
  // Round-off can leave tiny negative eigenvalues on a PSD kernel matrix.
  VectorXd e = eig.eigenvalues().cwiseMax(0.0);
  return SpectralSmoother(eig.eigenvectors(), std::move(e), std::move(g), std::move(y));
}

VectorXd SpectralSmoother::beta(double s, const VectorXd& d, Eigen::LLT<MatrixXd>* m_out) const {
  const Index q = g_.cols();
  if (q == 0) return VectorXd(0);
  MatrixXd m = qg_.transpose() * d.asDiagonal() * qg_;
  VectorXd rhs = qg_.transpose() * d.cwiseProduct(qy_);
  if (!full_) {
    m += (gg_ - qg_.transpose() * qg_) / s;
    rhs += (gy_ - qg_.transpose() * qy_) / s;
  }
  m = 0.5 * (m + m.transpose());
  Eigen::LLT<MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::RankDeficientRegression, "G' Psi G is singular");
  VectorXd b = llt.solve(rhs);
  if (m_out) *m_out = std::move(llt);
  return b;
}

double SpectralSmoother::gcv(double s) const {
  const double n = static_cast<double>(size());
  if (!(s > 0.0)) return std::numeric_limits<double>::infinity();
  const VectorXd d = (e_.array() + s).inverse().matrix();
  Eigen::LLT<MatrixXd> m;
  const VectorXd b = beta(s, d, &m);

  const VectorXd zq = b.size() ? VectorXd(qy_ - qg_ * b) : qy_;
  double py2 = d.cwiseProduct(zq).squaredNorm();
  double trace_p = d.sum();
  if (!full_) {
    double zz = yy_;
    if (b.size()) zz += -2.0 * b.dot(gy_) + b.dot(gg_ * b);
    py2 += std::max(zz - zq.squaredNorm(), 0.0) / (s * s);
    trace_p += (n - static_cast<double>(rank())) / s;
  }
  if (b.size()) {
    MatrixXd nmat = qg_.transpose() * d.cwiseAbs2().asDiagonal() * qg_;
    if (!full_) nmat += (gg_ - qg_.transpose() * qg_) / (s * s);
    trace_p -= m.solve(nmat).trace();
  }
  if (!(s * trace_p / n > 1e-12)) return std::numeric_limits<double>::infinity();
  return n * py2 / (trace_p * trace_p);
}

void SpectralSmoother::solve(double s, VectorXd& beta_out, VectorXd& c) const {
  if (!(s > 0.0)) {
    if (!full_ || !(e_.minCoeff() > 0.0)) {
      throw Error(ErrorCode::SingularSystem, "unpenalized fit needs a full-rank kernel matrix");
    }
  }
  const VectorXd d = (e_.array() + s).inverse().matrix();
  beta_out = beta(s, d, nullptr);
  const VectorXd z = beta_out.size() ? VectorXd(y_ - g_ * beta_out) : y_;
  const VectorXd zq = q_.transpose() * z;
  c = q_ * d.cwiseProduct(zq);
  if (!full_) c += (z - q_ * zq) / s;
}

FittedModel fit_full_kriging(const MatrixXd& x, const VectorXd& y, const KernelSpec& spec, RegressionBasis g,
                             const LambdaPolicy& policy, MethodTag tag) {
  check_training_data(x, y);
  spec.check_dimension(x.cols());
  KnotSet knots(x);
  const Index n = x.rows();
  const MatrixXd r = kernel_matrix(spec, x);
  const MatrixXd gx = regression_matrix(g, x);
  const Index q = gx.cols();
  if (q > 0 && n <= q) throw Error(ErrorCode::RankDeficientRegression, "need more points than regression functions");

  const double nd = static_cast<double>(n);
  LambdaSelection sel;
  if (policy.kind == LambdaPolicy::Kind::gcv) {
    const SpectralSmoother smoother = SpectralSmoother::from_kernel_matrix(r, gx, y);
    sel = choose_lambda(policy, [&](double lambda) { return smoother.gcv(nd * lambda); });
  } else {
    sel.lambda = policy.kind == LambdaPolicy::Kind::fixed ? policy.value : 0.0;
  }
  if (sel.lambda < 0.0) throw Error(ErrorCode::InvalidArgument, "lambda must be nonnegative");
  const double s = nd * sel.lambda;

  MatrixXd k = r;
  k.diagonal().array() += s;
  const SpdFactorization factor = SpdFactorization::factor(k);
  VectorXd beta(q);
  VectorXd w = factor.solve(y);
  if (q > 0) {
    const MatrixXd kg = factor.solve(gx);
    MatrixXd m = gx.transpose() * kg;
    m = 0.5 * (m + m.transpose());
    Eigen::LLT<MatrixXd> llt(m);
    if (llt.info() != Eigen::Success) throw Error(ErrorCode::RankDeficientRegression, "G' K^-1 G is singular");
    beta = llt.solve(gx.transpose() * w);
    w -= kg * beta;
  }

  FittedModel model{.interpolator = tag == MethodTag::krr ? InterpolatorKind::kernel : InterpolatorKind::gp,
                    .method = tag,
                    .knots = std::move(knots),
                    .gamma_hat = r * w,
                    .lambda = sel.lambda,
                    .kernel = spec,
                    .g_kind = g,
                    .boundary = SplineBoundary::not_a_knot,
                    .beta = beta,
                    .weights = w,
                    .diagnostics = {}};
  if (q > 0) model.gamma_hat += gx * beta;
  model.diagnostics.jitter = factor.jitter_applied();
  if (policy.kind == LambdaPolicy::Kind::gcv) {
    model.diagnostics.gcv = sel.gcv;
  } else if (s > 0.0) {
    model.diagnostics.gcv = SpectralSmoother::from_kernel_matrix(r, gx, y).gcv(s);
  } else {
    model.diagnostics.gcv = std::numeric_limits<double>::infinity();
  }
  return model;
}

}  // namespace recon::detail
