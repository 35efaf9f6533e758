#include "reconstruct/baselines.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/SVD>

#include "reconstruct/error.hpp"
#include "smoother.hpp"

namespace recon {

namespace {

// Whitened cross-correlation Φ = R_XA L⁻ᵀ with L Lᵀ = R_A, so that the
// low-rank surrogate is R̃_X = ΦΦᵀ.
struct LowRankFeatures {
  MatrixXd cross;  // R_XA
  SpdFactorization factor;
  MatrixXd phi;
};

LowRankFeatures low_rank_features(const MatrixXd& x, const KnotSet& knots, const KernelSpec& spec) {
  if (x.cols() != knots.dimension()) throw Error(ErrorCode::DimensionMismatch, "data and knots differ in dimension");
  spec.check_dimension(x.cols());
  MatrixXd cross = kernel_matrix(spec, x, knots.points());
  SpdFactorization factor = correlation_matrix_factored(spec, knots);
  MatrixXd phi = factor.solve_lower(cross.transpose()).transpose();
  return {std::move(cross), std::move(factor), std::move(phi)};
}

void check_variances(const VarianceParams& vp) {
  if (!(vp.tau2 > 0.0) || !(vp.sigma2 > 0.0)) throw Error(ErrorCode::InvalidArgument, "variances must be positive");
}

// Minimizer of (y - Φv)ᵀW(y - Φv) + vᵀv/τ² with W diagonal, returned as the
// kernel weights w = L⁻ᵀv (so that f̂(x) = r_A(x)ᵀw).
VectorXd weighted_low_rank_weights(const LowRankFeatures& f, const VectorXd& y, const VectorXd& w_diag, double tau2) {
  MatrixXd system = f.phi.transpose() * w_diag.asDiagonal() * f.phi;
  system.diagonal().array() += 1.0 / tau2;
  const VectorXd rhs = f.phi.transpose() * w_diag.cwiseProduct(y);
  Eigen::LLT<MatrixXd> llt(system);
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::NotPositiveDefinite, "posterior precision is not SPD");
  const VectorXd v = llt.solve(rhs);
  // L⁻ᵀv = (LLᵀ)⁻¹ L v.
  return f.factor.solve(VectorXd(f.factor.lower() * v));
}

FittedModel kernel_model(MethodTag tag, const KnotSet& knots, const KernelSpec& spec, const VectorXd& weights,
                         const LowRankFeatures& f, double lambda) {
  FittedModel model{.interpolator = InterpolatorKind::kernel,
                    .method = tag,
                    .knots = knots,
                    .gamma_hat = kernel_matrix(spec, knots.points()) * weights,
                    .lambda = lambda,
                    .kernel = spec,
                    .g_kind = RegressionBasis::none,
                    .boundary = SplineBoundary::not_a_knot,
                    .beta = {},
                    .weights = weights,
                    .diagnostics = {}};
  model.diagnostics.jitter = f.factor.jitter_applied();
  return model;
}

VectorXd spgp_lambda(const MatrixXd& phi) {
  return (1.0 - phi.rowwise().squaredNorm().array()).cwiseMax(0.0).matrix();
}

// Woodbury evaluation of the SPGP marginal likelihood for fixed Φ and Λ.
class SpgpLikelihood {
 public:
  SpgpLikelihood(const MatrixXd& phi, const VectorXd& y) : phi_(phi), y_(y), lambda_(spgp_lambda(phi)) {}

  double operator()(double tau2, double sigma2) const {
    const Index n = y_.size();
    const VectorXd dinv = (tau2 * lambda_.array() + sigma2).inverse().matrix();
    MatrixXd inner = tau2 * (phi_.transpose() * dinv.asDiagonal() * phi_);
    inner.diagonal().array() += 1.0;
    Eigen::LLT<MatrixXd> llt(inner);
    if (llt.info() != Eigen::Success) return -std::numeric_limits<double>::infinity();
    const VectorXd b = phi_.transpose() * dinv.cwiseProduct(y_);
    const double quad = y_.dot(dinv.cwiseProduct(y_)) - tau2 * b.dot(llt.solve(b));
    const double logdet =
        -dinv.array().log().sum() + 2.0 * MatrixXd(llt.matrixL()).diagonal().array().log().sum();
    return -0.5 * (logdet + quad + static_cast<double>(n) * std::log(2.0 * std::numbers::pi));
  }

 private:
  const MatrixXd& phi_;
  const VectorXd& y_;
  VectorXd lambda_;
};

}  // namespace

FittedModel fit_gpr(const MatrixXd& x, const VectorXd& y, const KernelSpec& spec, RegressionBasis g,
                    const LambdaPolicy& policy) {
  return detail::fit_full_kriging(x, y, spec, g, policy, MethodTag::gpr);
}

FittedModel fit_nystrom(const MatrixXd& x, const VectorXd& y, const KnotSet& knots, const KernelSpec& spec,
                        RegressionBasis g, const LambdaPolicy& policy) {
  detail::check_training_data(x, y);
  if (knots.size() > x.rows()) throw Error(ErrorCode::InvalidArgument, "need m <= n");
  const Index n = x.rows();
  const LowRankFeatures f = low_rank_features(x, knots, spec);
  const MatrixXd gx = regression_matrix(g, x);
  if (gx.cols() > 0 && n <= gx.cols()) throw Error(ErrorCode::RankDeficientRegression, "need more points than regression functions");

  Eigen::BDCSVD<MatrixXd> svd(f.phi, Eigen::ComputeThinU);
  const VectorXd sv = svd.singularValues();
  Index rank = 0;
  const double cutoff = sv.size() ? 1e-12 * sv[0] * sv[0] : 0.0;
  while (rank < sv.size() && sv[rank] * sv[rank] > cutoff) ++rank;
  const detail::SpectralSmoother smoother(svd.matrixU().leftCols(rank), sv.head(rank).cwiseAbs2(), gx, y);

  const double nd = static_cast<double>(n);
  const LambdaSelection sel = detail::choose_lambda(policy, [&](double lambda) { return smoother.gcv(nd * lambda); });
  if (sel.lambda < 0.0) throw Error(ErrorCode::InvalidArgument, "lambda must be nonnegative");
  VectorXd beta;
  VectorXd c;
  smoother.solve(nd * sel.lambda, beta, c);
  const VectorXd w = f.factor.solve(VectorXd(f.cross.transpose() * c));

  FittedModel model{.interpolator = InterpolatorKind::gp,
                    .method = MethodTag::nystrom,
                    .knots = knots,
                    .gamma_hat = kernel_matrix(spec, knots.points()) * w,
                    .lambda = sel.lambda,
                    .kernel = spec,
                    .g_kind = g,
                    .boundary = SplineBoundary::not_a_knot,
                    .beta = beta,
                    .weights = w,
                    .diagnostics = {}};
  if (beta.size() > 0) model.gamma_hat += regression_matrix(g, knots.points()) * beta;
  model.diagnostics.gcv = sel.gcv;
  model.diagnostics.jitter = f.factor.jitter_applied();
  return model;
}

FittedModel fit_spgp(const MatrixXd& x, const VectorXd& y, const KnotSet& knots, const KernelSpec& spec,
                     const VarianceParams& vp) {
  detail::check_training_data(x, y);
  check_variances(vp);
  const LowRankFeatures f = low_rank_features(x, knots, spec);
  const VectorXd w_diag = (vp.tau2 * spgp_lambda(f.phi).array() + vp.sigma2).inverse().matrix();
  const VectorXd weights = weighted_low_rank_weights(f, y, w_diag, vp.tau2);
  return kernel_model(MethodTag::spgp, knots, spec, weights, f,
                      vp.sigma2 / (static_cast<double>(x.rows()) * vp.tau2));
}

FittedModel fit_empirical_bayes(const MatrixXd& x, const VectorXd& y, const KnotSet& knots, const KernelSpec& spec,
                                const VarianceParams& vp) {
  detail::check_training_data(x, y);
  check_variances(vp);
  const LowRankFeatures f = low_rank_features(x, knots, spec);
  const VectorXd w_diag = VectorXd::Constant(x.rows(), 1.0 / vp.sigma2);
  const VectorXd weights = weighted_low_rank_weights(f, y, w_diag, vp.tau2);
  return kernel_model(MethodTag::eb, knots, spec, weights, f, vp.sigma2 / (static_cast<double>(x.rows()) * vp.tau2));
}

double spgp_log_likelihood(const MatrixXd& x, const VectorXd& y, const KnotSet& knots, const KernelSpec& spec,
                           const VarianceParams& vp) {
  detail::check_training_data(x, y);
  check_variances(vp);
  const LowRankFeatures f = low_rank_features(x, knots, spec);
  return SpgpLikelihood(f.phi, y)(vp.tau2, vp.sigma2);
}

VarianceParams estimate_variances(const MatrixXd& x, const VectorXd& y, const KnotSet& knots,
                                  const KernelSpec& spec) {
  detail::check_training_data(x, y);
  if (x.rows() <= knots.size()) throw Error(ErrorCode::InvalidArgument, "need n > m");
  const double mean = y.mean();
  const double var = (y.array() - mean).square().sum() / static_cast<double>(y.size() - 1);
  if (!(var > 0.0)) throw Error(ErrorCode::DegenerateData, "responses have zero variance");

  const LowRankFeatures f = low_rank_features(x, knots, spec);
  const SpgpLikelihood loglik(f.phi, y);
  std::vector<double> grid(kVarianceGridSize);
  for (int k = 0; k < kVarianceGridSize; ++k) {
    grid[static_cast<std::size_t>(k)] = var * std::pow(10.0, -4.0 + 8.0 * k / (kVarianceGridSize - 1));
  }

  std::size_t it = kVarianceGridSize / 2 - 1;
  std::size_t is = kVarianceGridSize / 2 - 1;
  double best = loglik(grid[it], grid[is]);
  for (int cycle = 0; cycle < 4 * kVarianceGridSize; ++cycle) {
    bool moved = false;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const double v = loglik(grid[k], grid[is]);
      if (v > best) {
        best = v;
        it = k;
        moved = true;
      }
    }
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const double v = loglik(grid[it], grid[k]);
      if (v > best) {
        best = v;
        is = k;
        moved = true;
      }
    }
    if (!moved) break;
  }
  return {grid[it], grid[is]};
}

}  // namespace recon
