#include "reconstruct/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>


#include <Eigen/QR>

#include "reconstruct/error.hpp"
#include "smoother.hpp"

namespace recon {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Solves with the jitter ladder, reporting factorization failure as a
// singular penalized system.
SpdFactorization factor_system(const MatrixXd& s) {
  try {
    return SpdFactorization::factor(s);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NotPositiveDefinite) throw Error(ErrorCode::SingularSystem, e.what());
    throw;
  }
}

double gcv_value(double rss, double n, double one_minus_ratio) {
  if (!(one_minus_ratio > 1e-12)) return kInf;
  return rss / (n * one_minus_ratio * one_minus_ratio);
}

// (BᵀB + nλΣ)γ = Bᵀy with BᵀB and Bᵀy formed once.
class RidgeProblem {
 public:
  RidgeProblem(const MatrixXd& b, const VectorXd& y, const MatrixXd& sigma) : b_(b), y_(y), sigma_(sigma) {
    if (b.rows() != y.size()) throw Error(ErrorCode::DimensionMismatch, "B rows and y length differ");
    if (sigma.rows() != b.cols() || sigma.cols() != b.cols()) {
      throw Error(ErrorCode::DimensionMismatch, "Sigma must be m x m with m = cols(B)");
    }
    gram_ = b.transpose() * b;
    bty_ = b.transpose() * y;
  }

  struct Solution {
    VectorXd gamma;
    double trace = 0.0;
    double rss = 0.0;
    double jitter = 0.0;
  };

  Solution solve(double lambda, bool with_trace) const {
    if (lambda < 0.0) throw Error(ErrorCode::InvalidArgument, "lambda must be nonnegative");
    const double n = static_cast<double>(b_.rows());
    MatrixXd s = gram_;
    if (lambda > 0.0) s += (n * lambda) * sigma_;
    const SpdFactorization f = factor_system(s);
    Solution out;
    out.gamma = f.solve(bty_);
    out.jitter = f.jitter_applied();
    out.rss = (y_ - b_ * out.gamma).squaredNorm();
    if (with_trace) out.trace = f.solve(gram_).trace();
    return out;
  }

  double gcv(double lambda) const {
    const Solution sol = solve(lambda, true);
    const double n = static_cast<double>(b_.rows());
    return gcv_value(sol.rss, n, 1.0 - sol.trace / n);
  }

 private:
  const MatrixXd& b_;
  const VectorXd& y_;
  const MatrixXd& sigma_;
  MatrixXd gram_;
  VectorXd bty_;
};

bool same_points(const MatrixXd& x, const KnotSet& knots) {
  return x.rows() == knots.size() && x.cols() == knots.dimension() && x == knots.points();
}

// GPRR at one knot set. With A = X, B = I and (I + sV)γ = y is solved in the
// kriging form: γ̂ = y - s c with c = P y from the spectral smoother of R_X,
// and Vγ̂ = c. This avoids forming R_X⁻¹.
class GprrProblem {
 public:
  struct Fit {
    VectorXd gamma;
    VectorXd weights;  // Vγ
    VectorXd beta;     // Uᵀγ
    double jitter = 0.0;
  };

  GprrProblem(const MatrixXd& x, const VectorXd& y, const KnotSet& knots, const KernelSpec& spec, RegressionBasis g)
      : y_(y), identity_(same_points(x, knots)) {
    detail::check_training_data(x, y);
    if (identity_) {
      spec.check_dimension(x.cols());
      const MatrixXd gx = regression_matrix(g, x);
      if (gx.cols() > 0) {
        if (x.rows() <= gx.cols()) {
          throw Error(ErrorCode::RankDeficientRegression, "need more knots than regression functions");
        }
        Eigen::ColPivHouseholderQR<MatrixXd> qr(gx);
        qr.setThreshold(1e-10);
        if (qr.rank() < gx.cols()) throw Error(ErrorCode::RankDeficientRegression, "G_A does not have full column rank");
      }
      smoother_.emplace(detail::SpectralSmoother::from_kernel_matrix(kernel_matrix(spec, x), gx, y));
    } else {
      basis_.emplace(GPBasis::build(knots, spec, g));
      b_ = basis_->design_matrix(x);
      sigma_ = basis_->penalty();
      ridge_.emplace(b_, y_, sigma_);
    }
  }

  double gcv(double lambda) const {
    if (lambda < 0.0) throw Error(ErrorCode::InvalidArgument, "lambda must be nonnegative");
    if (!identity_) return ridge_->gcv(lambda);
    const double s = static_cast<double>(y_.size()) * lambda;
    if (!(s > 0.0)) return kInf;  // H = I
    return smoother_->gcv(s);
  }

  Fit fit(double lambda) const {
    Fit out;
    if (identity_) {
      const double s = static_cast<double>(y_.size()) * lambda;
      smoother_->solve(s, out.beta, out.weights);
      out.gamma = s > 0.0 ? VectorXd(y_ - s * out.weights) : y_;
      return out;
    }
    const auto sol = ridge_->solve(lambda, false);
    out.gamma = sol.gamma;
    out.weights = basis_->v() * sol.gamma;
    out.beta = basis_->u().transpose() * sol.gamma;
    out.jitter = std::max(sol.jitter, basis_->factor().jitter_applied());
    return out;
  }

 private:
  const VectorXd& y_;
  bool identity_;
  std::optional<detail::SpectralSmoother> smoother_;
  std::optional<GPBasis> basis_;
  MatrixXd b_;
  MatrixXd sigma_;
  std::optional<RidgeProblem> ridge_;
};

}  // namespace

// ---------------------------------------------------------------------------

VectorXd predict(const FittedModel& model, const MatrixXd& xstar) {
  const Index k = xstar.rows();
  if (k == 0) return VectorXd(0);
  if (xstar.cols() != model.knots.dimension()) {
    throw Error(ErrorCode::DimensionMismatch, "prediction points have the wrong dimension");
  }
  VectorXd out(k);
  switch (model.interpolator) {
    case InterpolatorKind::lagrange: {
      const LagrangeInterpolator interp(model.knots.points().col(0));
      for (Index i = 0; i < k; ++i) out[i] = interp(model.gamma_hat, xstar(i, 0));
      return out;
    }
    case InterpolatorKind::spline: {
      const SplineCoefficients spline = fit_cubic_spline(model.knots.points().col(0), model.gamma_hat, model.boundary);
      for (Index i = 0; i < k; ++i) out[i] = spline(xstar(i, 0));
      return out;
    }
    case InterpolatorKind::kernel:
    case InterpolatorKind::gp: {
      if (!model.kernel) throw Error(ErrorCode::InvalidArgument, "kernel model without a kernel spec");
      if (model.weights.size() != model.knots.size()) {
        throw Error(ErrorCode::DimensionMismatch, "kernel weights differ from knot count");
      }
      out = kernel_matrix(*model.kernel, xstar, model.knots.points()) * model.weights;
      if (model.beta.size() > 0) {
        const MatrixXd gx = regression_matrix(model.g_kind, xstar);
        if (gx.cols() != model.beta.size()) throw Error(ErrorCode::DimensionMismatch, "trend coefficients differ from g");
        out.noalias() += gx * model.beta;
      }
      return out;
    }
  }
  return out;
}

std::vector<double> default_lambda_grid() {
  constexpr int count = 50;
  std::vector<double> grid(count);
  for (int i = 0; i < count; ++i) grid[static_cast<std::size_t>(i)] = std::pow(10.0, -8.0 + 10.0 * i / (count - 1));
  return grid;
}

LambdaPolicy default_lambda_policy(Index m, Index n) {
  return 5 * m <= n ? LambdaPolicy::none() : LambdaPolicy::gcv();
}

LambdaSelection select_from_curve(std::vector<double> grid, std::vector<double> curve) {
  if (grid.empty()) throw Error(ErrorCode::InvalidArgument, "lambda grid is empty");
  if (grid.size() != curve.size()) throw Error(ErrorCode::DimensionMismatch, "grid and curve differ in length");
  std::size_t best = 0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double b = curve[best];
    const double c = curve[i];
    const bool tie = (b == c) || (std::isfinite(b) && std::abs(c - b) <= 1e-12 * std::abs(b));
    if (c < b || (tie && grid[i] > grid[best])) best = i;
  }
  LambdaSelection out;
  out.lambda = grid[best];
  out.gcv = curve[best];
  out.grid = std::move(grid);
  out.curve = std::move(curve);
  return out;
}

VectorXd ridge_reconstruct(const MatrixXd& b, const VectorXd& y, double lambda, const MatrixXd& sigma) {
  return RidgeProblem(b, y, sigma).solve(lambda, false).gamma;
}

double gcv(const MatrixXd& b, const VectorXd& y, double lambda, const MatrixXd& sigma) {
  return RidgeProblem(b, y, sigma).gcv(lambda);
}

LambdaSelection select_lambda(const MatrixXd& b, const VectorXd& y, const MatrixXd& sigma,
                              const std::vector<double>& grid) {
  const RidgeProblem problem(b, y, sigma);
  std::vector<double> curve;
  curve.reserve(grid.size());
  for (double lambda : grid) curve.push_back(problem.gcv(lambda));
  return select_from_curve(grid, std::move(curve));
}

// ---------------------------------------------------------------------------

FittedModel fit_gprr(const MatrixXd& x, const VectorXd& y, const KnotSet& knots, const KernelSpec& spec,
                     RegressionBasis g, const LambdaPolicy& policy) {
  const GprrProblem problem(x, y, knots, spec, g);
  const LambdaSelection sel = detail::choose_lambda(policy, [&](double lambda) { return problem.gcv(lambda); });
  if (sel.lambda < 0.0) throw Error(ErrorCode::InvalidArgument, "lambda must be nonnegative");

  GprrProblem::Fit fit = problem.fit(sel.lambda);
  FittedModel model{.interpolator = InterpolatorKind::gp,
                    .method = MethodTag::gprr,
                    .knots = knots,
                    .gamma_hat = std::move(fit.gamma),
                    .lambda = sel.lambda,
                    .kernel = spec,
                    .g_kind = g,
                    .boundary = SplineBoundary::not_a_knot,
                    .beta = std::move(fit.beta),
                    .weights = std::move(fit.weights),
                    .diagnostics = {}};
  model.diagnostics.gcv = sel.gcv;
  model.diagnostics.jitter = fit.jitter;
  return model;
}

LambdaSelection gprr_gcv_curve(const MatrixXd& x, const VectorXd& y, const KnotSet& knots, const KernelSpec& spec,
                               RegressionBasis g, const std::vector<double>& grid) {
  const GprrProblem problem(x, y, knots, spec, g);
  std::vector<double> curve;
  curve.reserve(grid.size());
  for (double lambda : grid) curve.push_back(problem.gcv(lambda));
  return select_from_curve(grid, std::move(curve));
}

FittedModel fit_krr(const MatrixXd& x, const VectorXd& y, const KernelSpec& spec, double lambda) {
  return fit_krr(x, y, spec, LambdaPolicy::fixed(lambda));
}

FittedModel fit_krr(const MatrixXd& x, const VectorXd& y, const KernelSpec& spec, const LambdaPolicy& policy) {
  return detail::fit_full_kriging(x, y, spec, RegressionBasis::none, policy, MethodTag::krr);
}

// ---------------------------------------------------------------------------

namespace {

// Linear sequences lie in the null space of the second-difference penalty, so
// the least-squares line over the index passes through the smoother unchanged.
// Solving for the remainder only keeps large-λ fits from losing the line to
// the system's conditioning.
VectorXd fdp_smooth(const BandedLdlt& ldlt, const VectorXd& y) {
  const Index n = y.size();
  const VectorXd t = VectorXd::LinSpaced(n, 0.0, static_cast<double>(n - 1));
  const double t_mean = 0.5 * static_cast<double>(n - 1);
  const double y_mean = y.mean();
  const VectorXd tc = t.array() - t_mean;
  const double slope = tc.dot(y) / tc.squaredNorm();
  const VectorXd line = (y_mean + slope * tc.array()).matrix();
  return line + ldlt.solve(y - line);
}

}  // namespace

double fdp_gcv(const VectorXd& y, double lambda, TraceEstimate* trace) {
  const Index n = y.size();
  if (n < 3) throw Error(ErrorCode::InvalidArgument, "finite-difference penalization needs n >= 3");
  const BandedSpdMatrix system = BandedSpdMatrix::second_difference_system(n, lambda);
  const VectorXd gamma = fdp_smooth(BandedLdlt(system), y);
  const TraceEstimate tr = hat_trace(system);
  if (trace) *trace = tr;
  const double nd = static_cast<double>(n);
  return gcv_value((y - gamma).squaredNorm(), nd, 1.0 - tr.value / nd);
}

FdpFit fit_fdp(const VectorXd& y, const LambdaPolicy& policy, SplineBoundary boundary) {
  const Index n = y.size();
  if (n < 3) throw Error(ErrorCode::InvalidArgument, "finite-difference penalization needs n >= 3");
  if (!y.allFinite()) throw Error(ErrorCode::InvalidArgument, "responses must be finite");

  FdpFit fit;
  if (policy.kind == LambdaPolicy::Kind::gcv) {
    fit.selection = detail::choose_lambda(policy, [&](double lambda) { return fdp_gcv(y, lambda); });
    fit.lambda = fit.selection.lambda;
  } else {
    fit.lambda = policy.kind == LambdaPolicy::Kind::fixed ? policy.value : 0.0;
  }
  const BandedSpdMatrix system = BandedSpdMatrix::second_difference_system(n, fit.lambda);
  fit.gamma_hat = fdp_smooth(BandedLdlt(system), y);
  fit.trace = hat_trace(system);
  const double nd = static_cast<double>(n);
  fit.gcv = gcv_value((y - fit.gamma_hat).squaredNorm(), nd, 1.0 - fit.trace.value / nd);
  fit.design = equispaced_knots(n);
  fit.spline = fit_cubic_spline(fit.design, fit.gamma_hat, boundary);
  return fit;
}

FittedModel fdp_model(const FdpFit& fit) {
  FittedModel model{.interpolator = InterpolatorKind::spline,
                    .method = MethodTag::fdp,
                    .knots = KnotSet::from_1d(fit.design),
                    .gamma_hat = fit.gamma_hat,
                    .lambda = fit.lambda,
                    .kernel = std::nullopt,
                    .g_kind = RegressionBasis::none,
                    .boundary = fit.spline.boundary,
                    .beta = {},
                    .weights = {},
                    .diagnostics = {}};
  model.diagnostics.gcv = fit.gcv;
  return model;
}

FittedModel fit_replication(const ReplicationDesign& design, const VectorXd& y, InterpolatorKind kind,
                            SplineBoundary boundary) {
  const Index m = design.knots.size();
  const Index l = design.replications;
  if (y.size() != design.size()) throw Error(ErrorCode::LengthMismatch, "y length must equal m * l");
  if (kind != InterpolatorKind::lagrange && kind != InterpolatorKind::spline) {
    throw Error(ErrorCode::InvalidArgument, "replication designs use Lagrange or spline reconstruction");
  }
  VectorXd gamma(m);
  for (Index j = 0; j < m; ++j) gamma[j] = y.segment(j * l, l).mean();
  return FittedModel{.interpolator = kind,
                     .method = MethodTag::replication,
                     .knots = KnotSet::from_1d(design.knots),
                     .gamma_hat = gamma,
                     .lambda = 0.0,
                     .kernel = std::nullopt,
                     .g_kind = RegressionBasis::none,
                     .boundary = boundary,
                     .beta = {},
                     .weights = {},
                     .diagnostics = {}};
}

// ---------------------------------------------------------------------------

namespace {

class KernelParamObjective {
 public:
  KernelParamObjective(const MatrixXd& x, const VectorXd& y, const KnotSet& knots, RegressionBasis g)
      : y_(y), knots_(knots), g_(g), gx_(regression_matrix(g, x)) {
    const Index n = x.rows();
    const Index m = knots.size();
    sq_.reserve(static_cast<std::size_t>(x.cols()));
    for (Index l = 0; l < x.cols(); ++l) {
      MatrixXd d(n, m);
      for (Index k = 0; k < m; ++k) d.col(k) = (x.col(l).array() - knots.points()(k, l)).square().matrix();
      sq_.push_back(std::move(d));
    }
  }

  Index dimension() const { return static_cast<Index>(sq_.size()); }

  MatrixXd exponent(const VectorXd& theta) const {
    MatrixXd e = MatrixXd::Zero(sq_[0].rows(), sq_[0].cols());
    for (std::size_t l = 0; l < sq_.size(); ++l) e += theta[static_cast<Index>(l)] * sq_[l];
    return e;
  }

  const MatrixXd& squared_differences(Index l) const { return sq_[static_cast<std::size_t>(l)]; }

  std::optional<GPBasis> basis(const VectorXd& theta) const {
    try {
      return GPBasis::build(knots_, KernelSpec::gaussian(theta), g_);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::NotPositiveDefinite || e.code() == ErrorCode::RankDeficientRegression) return {};
      throw;
    }
  }

  // ‖y - B(θ)γ‖²/n with exp(-exponent) = R_XA(θ).
  double value(const VectorXd& theta, const MatrixXd& exponent, const VectorXd& gamma) const {
    const auto b = basis(theta);
    if (!b) return kInf;
    VectorXd pred = (-exponent.array()).exp().matrix() * (b->v() * gamma);
    if (gx_.cols() > 0) pred.noalias() += gx_ * (b->u().transpose() * gamma);
    const double v = (y_ - pred).squaredNorm() / static_cast<double>(y_.size());
    return std::isfinite(v) ? v : kInf;
  }

  // Unpenalized least-squares γ at θ.
  VectorXd gamma_step(const VectorXd& theta, const MatrixXd& exponent) const {
    const auto b = basis(theta);
    if (!b) throw Error(ErrorCode::SingularSystem, "kernel matrix of the knots cannot be factored");
    MatrixXd design = (-exponent.array()).exp().matrix() * b->v();
    if (gx_.cols() > 0) design.noalias() += gx_ * b->u().transpose();
    const SpdFactorization f = factor_system(design.transpose() * design);
    return f.solve(VectorXd(design.transpose() * y_));
  }

 private:
  const VectorXd& y_;
  const KnotSet& knots_;
  RegressionBasis g_;
  MatrixXd gx_;
  std::vector<MatrixXd> sq_;
};

}  // namespace

KernelParamEstimate estimate_kernel_params(const MatrixXd& x, const VectorXd& y, const KnotSet& knots,
                                           RegressionBasis g, const VectorXd& theta0,
                                           const KernelParamOptions& options) {
  detail::check_training_data(x, y);
  if (x.cols() != knots.dimension()) throw Error(ErrorCode::DimensionMismatch, "data and knots differ in dimension");
  if (theta0.size() != x.cols()) throw Error(ErrorCode::DimensionMismatch, "theta0 needs one value per coordinate");
  if ((theta0.array() <= 0.0).any()) throw Error(ErrorCode::InvalidArgument, "theta0 must be positive");

  const KernelParamObjective objective(x, y, knots, g);
  VectorXd theta = theta0;
  MatrixXd expo = objective.exponent(theta);
  KernelParamEstimate est;
  est.gamma_hat = objective.gamma_step(theta, expo);
  double current = objective.value(theta, expo, est.gamma_hat);
  est.objective.push_back(current);

  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int iter = 0; iter < options.max_iter && current > 0.0; ++iter) {
    const double previous = current;
    for (Index j = 0; j < objective.dimension(); ++j) {
      const MatrixXd& dj = objective.squared_differences(j);
      const MatrixXd base = expo - theta[j] * dj;
      VectorXd trial = theta;
      double best_u = std::log10(theta[j]);
      double best_f = current;
      auto f = [&](double u) {
        trial[j] = std::pow(10.0, u);
        const double v = objective.value(trial, base + trial[j] * dj, est.gamma_hat);
        if (v < best_f) {
          best_f = v;
          best_u = u;
        }
        return v;
      };
      double a = options.log10_lower;
      double b = options.log10_upper;
      double c = b - ratio * (b - a);
      double d = a + ratio * (b - a);
      double fc = f(c);
      double fd = f(d);
      for (int k = 0; k < options.line_search_iterations; ++k) {
        if (fc < fd) {
          b = d;
          d = c;
          fd = fc;
          c = b - ratio * (b - a);
          fc = f(c);
        } else {
          a = c;
          c = d;
          fc = fd;
          d = a + ratio * (b - a);
          fd = f(d);
        }
      }
      if (best_f < current) {
        theta[j] = std::pow(10.0, best_u);
        expo = base + theta[j] * dj;
        current = best_f;
      }
    }
    VectorXd gamma = objective.gamma_step(theta, expo);
    const double refit = objective.value(theta, expo, gamma);
    if (refit <= current) {
      est.gamma_hat = std::move(gamma);
      current = refit;
    }
    est.objective.push_back(current);
    est.iterations = iter + 1;
    if (previous - current < options.tol * previous) break;
  }
  est.theta = theta;
  return est;
}

Index next_knot(const MatrixXd& x, const KnotSet& knots, const VectorXd& y, const FittedModel& model) {
  if (x.rows() != y.size()) throw Error(ErrorCode::DimensionMismatch, "candidates and responses differ in length");
  return next_knot(y, predict(model, x), rows_in_knot_set(x, knots));
}

}  // namespace recon
