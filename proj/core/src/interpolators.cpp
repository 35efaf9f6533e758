#include "reconstruct/interpolators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include <Eigen/QR>

#include "reconstruct/error.hpp"
#include "reconstruct/random.hpp"

namespace recon {

// ---------------------------------------------------------------------------
// KnotSet

KnotSet::KnotSet(MatrixXd points) : points_(std::move(points)) {
  const Index m = points_.rows();
  const Index d = points_.cols();
  if (m == 0 || d == 0) throw Error(ErrorCode::InvalidArgument, "knot set must be nonempty");
  constexpr double tol = 1e-12;
  if (!points_.allFinite() || points_.minCoeff() < -tol || points_.maxCoeff() > 1.0 + tol) {
    throw Error(ErrorCode::KnotOutOfRange, "knot coordinates must lie in [0,1]");
  }
  std::vector<Index> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), Index{0});
  auto less = [&](Index i, Index j) {
    for (Index c = 0; c < d; ++c) {
      if (points_(i, c) != points_(j, c)) return points_(i, c) < points_(j, c);
    }
    return false;
  };
  std::sort(order.begin(), order.end(), less);
  for (std::size_t k = 1; k < order.size(); ++k) {
    if (!less(order[k - 1], order[k])) {
      std::ostringstream msg;
      msg << "knots " << order[k - 1] << " and " << order[k] << " coincide";
      throw Error(ErrorCode::DuplicateKnots, msg.str());
    }
  }
}

KnotSet KnotSet::from_1d(const VectorXd& knots) { return KnotSet(MatrixXd(knots)); }

// ---------------------------------------------------------------------------
// Regression functions

Index regression_size(RegressionBasis g, Index d) {
  switch (g) {
    case RegressionBasis::none: return 0;
    case RegressionBasis::constant: return 1;
    case RegressionBasis::linear: return 1 + d;
  }
  return 0;
}

MatrixXd regression_matrix(RegressionBasis g, const MatrixXd& x) {
  const Index n = x.rows();
  MatrixXd out(n, regression_size(g, x.cols()));
  if (g == RegressionBasis::none) return out;
  out.col(0).setOnes();
  if (g == RegressionBasis::linear) out.rightCols(x.cols()) = x;
  return out;
}

VectorXd regression_vector(RegressionBasis g, const Eigen::Ref<const VectorXd>& x) {
  VectorXd out(regression_size(g, x.size()));
  if (g == RegressionBasis::none) return out;
  out[0] = 1.0;
  if (g == RegressionBasis::linear) out.tail(x.size()) = x;
  return out;
}

// ---------------------------------------------------------------------------
// Lagrange

LagrangeInterpolator::LagrangeInterpolator(VectorXd knots) : knots_(std::move(knots)) {
  const Index m = knots_.size();
  if (m == 0) throw Error(ErrorCode::InvalidArgument, "Lagrange interpolation needs at least one knot");
  weights_ = VectorXd::Ones(m);
  for (Index j = 0; j < m; ++j) {
    for (Index k = 0; k < m; ++k) {
      if (k == j) continue;
      const double diff = knots_[j] - knots_[k];
      if (diff == 0.0) throw Error(ErrorCode::DuplicateKnots, "Lagrange knots must be distinct");
      weights_[j] /= diff;
    }
  }
}

double LagrangeInterpolator::operator()(const VectorXd& gamma, double x) const {
  if (gamma.size() != knots_.size()) throw Error(ErrorCode::DimensionMismatch, "gamma length differs from knot count");
  double num = 0.0;
  double den = 0.0;
  for (Index j = 0; j < knots_.size(); ++j) {
    const double diff = x - knots_[j];
    if (diff == 0.0) return gamma[j];
    const double t = weights_[j] / diff;
    num += t * gamma[j];
    den += t;
  }
  return num / den;
}

double lagrange_eval(const VectorXd& knots, const VectorXd& gamma, double x) {
  return LagrangeInterpolator(knots)(gamma, x);
}

// ---------------------------------------------------------------------------
// Cubic spline

namespace {

void check_spline_knots(const VectorXd& knots, const VectorXd& gamma) {
  if (knots.size() < 2) throw Error(ErrorCode::InvalidArgument, "spline needs at least two knots");
  if (gamma.size() != knots.size()) throw Error(ErrorCode::DimensionMismatch, "gamma length differs from knot count");
  for (Index i = 1; i < knots.size(); ++i) {
    if (knots[i] == knots[i - 1]) throw Error(ErrorCode::DuplicateKnots, "spline knots must be distinct");
    if (knots[i] < knots[i - 1]) throw Error(ErrorCode::UnsortedKnots, "spline knots must be increasing");
  }
}

// Thomas algorithm for a tridiagonal system; sub[0] and super[n-1] unused.
VectorXd solve_tridiagonal(VectorXd sub, VectorXd diag, VectorXd super, VectorXd rhs) {
  const Index n = diag.size();
  for (Index i = 1; i < n; ++i) {
    const double w = sub[i] / diag[i - 1];
    diag[i] -= w * super[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  VectorXd x(n);
  x[n - 1] = rhs[n - 1] / diag[n - 1];
  for (Index i = n - 2; i >= 0; --i) x[i] = (rhs[i] - super[i] * x[i + 1]) / diag[i];
  return x;
}

// Second derivatives at the knots.
VectorXd spline_moments(const VectorXd& x, const VectorXd& y, SplineBoundary boundary) {
  const Index m = x.size();
  VectorXd moments = VectorXd::Zero(m);
  if (m == 2) return moments;
  const VectorXd h = x.tail(m - 1) - x.head(m - 1);
  const VectorXd slope = (y.tail(m - 1) - y.head(m - 1)).cwiseQuotient(h);

  if (boundary == SplineBoundary::not_a_knot && m == 3) {
    moments.setConstant(2.0 * (slope[1] - slope[0]) / (x[2] - x[0]));
    return moments;
  }

  const Index k = m - 2;  // interior unknowns M_1 .. M_{m-2}
  VectorXd sub = VectorXd::Zero(k), diag(k), super = VectorXd::Zero(k), rhs(k);
  for (Index i = 0; i < k; ++i) {
    sub[i] = h[i];
    diag[i] = 2.0 * (h[i] + h[i + 1]);
    super[i] = h[i + 1];
    rhs[i] = 6.0 * (slope[i + 1] - slope[i]);
  }
  if (boundary == SplineBoundary::not_a_knot) {
    // Third-derivative continuity at x_1 and x_{m-2} eliminates M_0 and M_{m-1}.
    const double r0 = h[0] / h[1];
    diag[0] += h[0] * (1.0 + r0);
    super[0] -= h[0] * r0;
    const double r1 = h[m - 2] / h[m - 3];
    diag[k - 1] += h[m - 2] * (1.0 + r1);
    sub[k - 1] -= h[m - 2] * r1;
  }
  moments.segment(1, k) = solve_tridiagonal(sub, diag, super, rhs);
  if (boundary == SplineBoundary::not_a_knot) {
    const double r0 = h[0] / h[1];
    moments[0] = moments[1] * (1.0 + r0) - r0 * moments[2];
    const double r1 = h[m - 2] / h[m - 3];
    moments[m - 1] = moments[m - 2] * (1.0 + r1) - r1 * moments[m - 3];
  }
  return moments;
}

}  // namespace

SplineCoefficients fit_cubic_spline(const VectorXd& knots, const VectorXd& gamma, SplineBoundary boundary) {
  check_spline_knots(knots, gamma);
  const Index m = knots.size();
  const VectorXd moments = spline_moments(knots, gamma, boundary);

  SplineCoefficients s;
  s.knots = knots;
  s.boundary = boundary;
  s.a.resize(m - 1);
  s.b.resize(m - 1);
  s.c.resize(m - 1);
  s.d.resize(m - 1);
  for (Index i = 0; i + 1 < m; ++i) {
    const double h = knots[i + 1] - knots[i];
    s.a[i] = gamma[i];
    s.b[i] = (gamma[i + 1] - gamma[i]) / h - h * (2.0 * moments[i] + moments[i + 1]) / 6.0;
    s.c[i] = moments[i] / 2.0;
    s.d[i] = (moments[i + 1] - moments[i]) / (6.0 * h);
  }
  return s;
}

SplineCoefficients fit_natural_spline(const VectorXd& knots, const VectorXd& gamma) {
  return fit_cubic_spline(knots, gamma, SplineBoundary::natural);
}

double SplineCoefficients::operator()(double x) const {
  const Index pieces = a.size();
  const double* begin = knots.data();
  const double* end = knots.data() + knots.size();
  Index i = static_cast<Index>(std::upper_bound(begin, end, x) - begin) - 1;
  i = std::clamp<Index>(i, 0, pieces - 1);
  const double t = x - knots[i];
  if (t == 0.0) return a[i];
  return a[i] + t * (b[i] + t * (c[i] + t * d[i]));
}

double spline_eval(const SplineCoefficients& spline, double x) { return spline(x); }

// ---------------------------------------------------------------------------
// Kernel interpolator

KernelInterpolator::KernelInterpolator(KnotSet knots, KernelSpec spec)
    : knots_(std::move(knots)),
      spec_(std::move(spec)),
      factor_(correlation_matrix_factored(spec_, knots_)) {}

VectorXd KernelInterpolator::weights(const VectorXd& gamma) const {
  if (gamma.size() != knots_.size()) throw Error(ErrorCode::DimensionMismatch, "gamma length differs from knot count");
  return factor_.solve(gamma);
}

double KernelInterpolator::operator()(const VectorXd& gamma, const Eigen::Ref<const VectorXd>& x) const {
  return weights(gamma).dot(kernel_vector(spec_, knots_.points(), x));
}

double kernel_interp_eval(const KnotSet& knots, const VectorXd& gamma, const KernelSpec& spec,
                          const Eigen::Ref<const VectorXd>& x) {
  return KernelInterpolator(knots, spec)(gamma, x);
}

// ---------------------------------------------------------------------------
// GP basis

GPBasis GPBasis::build(KnotSet knots, KernelSpec spec, RegressionBasis g) {
  spec.check_dimension(knots.dimension());
  MatrixXd r_a = kernel_matrix(spec, knots.points());
  SpdFactorization factor = SpdFactorization::factor(r_a);
  GPBasis basis(std::move(knots), std::move(spec), g, std::move(r_a), std::move(factor));

  const Index m = basis.knots_.size();
  const Index q = regression_size(g, basis.knots_.dimension());
  basis.g_a_ = regression_matrix(g, basis.knots_.points());
  MatrixXd r_inv = basis.factor_.inverse();
  if (q == 0) {
    basis.u_.resize(m, 0);
    basis.v_ = std::move(r_inv);
    return basis;
  }
  if (m <= q) {
    std::ostringstream msg;
    msg << "need more knots (" << m << ") than regression functions (" << q << ")";
    throw Error(ErrorCode::RankDeficientRegression, msg.str());
  }
  Eigen::ColPivHouseholderQR<MatrixXd> qr(basis.g_a_);
  qr.setThreshold(1e-10);
  if (qr.rank() < q) throw Error(ErrorCode::RankDeficientRegression, "G_A does not have full column rank");

  const MatrixXd f = basis.factor_.solve(basis.g_a_);  // R_A⁻¹ G_A
  MatrixXd w = basis.g_a_.transpose() * f;              // G_Aᵀ R_A⁻¹ G_A
  w = 0.5 * (w + w.transpose());
  Eigen::LLT<MatrixXd> wllt(w);
  if (wllt.info() != Eigen::Success) {
    throw Error(ErrorCode::RankDeficientRegression, "G_A' R_A^-1 G_A is not positive definite");
  }
  basis.u_ = wllt.solve(f.transpose()).transpose();  // F W⁻¹
  MatrixXd v = r_inv - basis.u_ * f.transpose();
  basis.v_ = 0.5 * (v + v.transpose());
  return basis;
}

VectorXd GPBasis::eval(const Eigen::Ref<const VectorXd>& x) const {
  VectorXd b = v_ * kernel_vector(spec_, knots_.points(), x);
  if (u_.cols() > 0) b += u_ * regression_vector(g_, x);
  return b;
}

MatrixXd GPBasis::design_matrix(const MatrixXd& x) const {
  if (x.cols() != knots_.dimension()) throw Error(ErrorCode::DimensionMismatch, "points have the wrong dimension");
  if (x.rows() == 0) return MatrixXd(0, knots_.size());
  MatrixXd b = kernel_matrix(spec_, x, knots_.points()) * v_;
  if (u_.cols() > 0) b.noalias() += regression_matrix(g_, x) * u_.transpose();
  return b;
}

double GPBasis::interpolate(const VectorXd& gamma, const Eigen::Ref<const VectorXd>& x) const {
  if (gamma.size() != knots_.size()) throw Error(ErrorCode::DimensionMismatch, "gamma length differs from knot count");
  return gamma.dot(eval(x));
}

// V R_A Vᵀ = V exactly (V R_A V = V follows from V G_A = 0), so the
// product is never formed.
MatrixXd GPBasis::penalty() const { return v_; }

GPBasis gp_basis_build(const KnotSet& knots, const KernelSpec& spec, RegressionBasis g) {
  return GPBasis::build(knots, spec, g);
}

VectorXd gp_basis_eval(const GPBasis& basis, const Eigen::Ref<const VectorXd>& x) { return basis.eval(x); }

MatrixXd design_matrix(const GPBasis& basis, const MatrixXd& x) { return basis.design_matrix(x); }

// ---------------------------------------------------------------------------
// δ_m

InterpolationError interpolation_error(const PointFunction& interp, const PointFunction& truth, Index d,
                                       Index grid_size, std::uint64_t seed) {
  if (d < 1) throw Error(ErrorCode::InvalidArgument, "dimension must be positive");
  InterpolationError result;
  VectorXd x(d);
  auto visit = [&](const VectorXd& p) {
    result.sup_error = std::max(result.sup_error, std::abs(interp(p) - truth(p)));
    ++result.points;
  };
  if (d <= 2) {
    if (grid_size < 2) throw Error(ErrorCode::InvalidArgument, "grid needs at least two points per axis");
    const double step = 1.0 / static_cast<double>(grid_size - 1);
    if (d == 1) {
      for (Index i = 0; i < grid_size; ++i) {
        x[0] = static_cast<double>(i) * step;
        visit(x);
      }
    } else {
      for (Index i = 0; i < grid_size; ++i) {
        for (Index j = 0; j < grid_size; ++j) {
          x[0] = static_cast<double>(i) * step;
          x[1] = static_cast<double>(j) * step;
          visit(x);
        }
      }
    }
    return result;
  }
  result.monte_carlo = true;
  result.seed = seed;
  Rng rng(seed);
  for (Index k = 0; k < kMonteCarloPoints; ++k) {
    for (Index c = 0; c < d; ++c) x[c] = rng.uniform();
    visit(x);
  }
  return result;
}

}  // namespace recon
