#pragma once

#include <cstdint>
#include <functional>

#include "reconstruct/kernels.hpp"
#include "reconstruct/knot_set.hpp"
#include "reconstruct/numerics.hpp"

namespace recon {

// ---------------------------------------------------------------------------
// Regression functions g(x) of the Gaussian-process interpolator.

enum class RegressionBasis { none, constant, linear };

/// q = number of regression functions: 0, 1 or 1 + d.
Index regression_size(RegressionBasis g, Index d);

/// Rows g(x_i)ᵀ for the rows x_i of `x`; n × q.
MatrixXd regression_matrix(RegressionBasis g, const MatrixXd& x);

VectorXd regression_vector(RegressionBasis g, const Eigen::Ref<const VectorXd>& x);

// ---------------------------------------------------------------------------
// 1-D polynomial interpolation in barycentric (second) form.

class LagrangeInterpolator {
 public:
  /// Throws DuplicateKnots when two knots coincide.
  explicit LagrangeInterpolator(VectorXd knots);

  double operator()(const VectorXd& gamma, double x) const;

  const VectorXd& knots() const { return knots_; }
  const VectorXd& weights() const { return weights_; }

 private:
  VectorXd knots_;
  VectorXd weights_;
};

double lagrange_eval(const VectorXd& knots, const VectorXd& gamma, double x);

// ---------------------------------------------------------------------------
// 1-D cubic spline interpolation.

enum class SplineBoundary { not_a_knot, natural };

/// Piecewise cubic s(x) = a_i + b_i t + c_i t² + d_i t³, t = x - knots_i, on
/// [knots_i, knots_{i+1}]. Outside [knots_0, knots_{m-1}] the end pieces are
/// extended.
struct SplineCoefficients {
  VectorXd knots;
  VectorXd a, b, c, d;
  SplineBoundary boundary = SplineBoundary::not_a_knot;

  double operator()(double x) const;
};

/// O(m) tridiagonal construction. Requires m >= 2 strictly increasing knots;
/// throws UnsortedKnots / DuplicateKnots otherwise. With not-a-knot and m = 3
/// the result is the interpolating parabola; with m = 2 it is the chord.
SplineCoefficients fit_cubic_spline(const VectorXd& knots, const VectorXd& gamma,
                                    SplineBoundary boundary = SplineBoundary::not_a_knot);

SplineCoefficients fit_natural_spline(const VectorXd& knots, const VectorXd& gamma);

double spline_eval(const SplineCoefficients& spline, double x);

// ---------------------------------------------------------------------------
// Kernel (RKHS) interpolator γᵀ R_A⁻¹ r_A(x).

class KernelInterpolator {
 public:
  KernelInterpolator(KnotSet knots, KernelSpec spec);

  /// R_A⁻¹ γ.
  VectorXd weights(const VectorXd& gamma) const;
  double operator()(const VectorXd& gamma, const Eigen::Ref<const VectorXd>& x) const;

  const KnotSet& knots() const { return knots_; }
  const KernelSpec& spec() const { return spec_; }
  const SpdFactorization& factor() const { return factor_; }

 private:
  KnotSet knots_;
  KernelSpec spec_;
  SpdFactorization factor_;
};

double kernel_interp_eval(const KnotSet& knots, const VectorXd& gamma, const KernelSpec& spec,
                          const Eigen::Ref<const VectorXd>& x);

// ---------------------------------------------------------------------------
// Gaussian-process (BLUP) interpolator γᵀ b(x) with b(x) = U g(x) + V r_A(x).

class GPBasis {
 public:
  /// Requires m > q and G_A of full column rank (RankDeficientRegression
  /// otherwise). With RegressionBasis::none, U is empty and V = R_A⁻¹.
  static GPBasis build(KnotSet knots, KernelSpec spec, RegressionBasis g);

  /// b(x), length m.
  VectorXd eval(const Eigen::Ref<const VectorXd>& x) const;

  /// B = G_X Uᵀ + R_XA V; row i equals eval(x_i).
  MatrixXd design_matrix(const MatrixXd& x) const;

  double interpolate(const VectorXd& gamma, const Eigen::Ref<const VectorXd>& x) const;

  /// The roughness penalty matrix V R_A Vᵀ, which equals V.
  MatrixXd penalty() const;

  const KnotSet& knots() const { return knots_; }
  const KernelSpec& spec() const { return spec_; }
  RegressionBasis regression() const { return g_; }
  const MatrixXd& u() const { return u_; }
  const MatrixXd& v() const { return v_; }
  const MatrixXd& g_a() const { return g_a_; }
  const MatrixXd& r_a() const { return r_a_; }
  const SpdFactorization& factor() const { return factor_; }

 private:
  GPBasis(KnotSet knots, KernelSpec spec, RegressionBasis g, MatrixXd r_a, SpdFactorization factor)
      : knots_(std::move(knots)), spec_(std::move(spec)), g_(g), r_a_(std::move(r_a)),
        factor_(std::move(factor)) {}

  KnotSet knots_;
  KernelSpec spec_;
  RegressionBasis g_;
  MatrixXd r_a_;
  SpdFactorization factor_;
  MatrixXd g_a_;
  MatrixXd u_;
  MatrixXd v_;
};

GPBasis gp_basis_build(const KnotSet& knots, const KernelSpec& spec, RegressionBasis g);
VectorXd gp_basis_eval(const GPBasis& basis, const Eigen::Ref<const VectorXd>& x);
MatrixXd design_matrix(const GPBasis& basis, const MatrixXd& x);

// ---------------------------------------------------------------------------
// Interpolation error diagnostic δ_m.

using PointFunction = std::function<double(const VectorXd&)>;

struct InterpolationError {
  double sup_error = 0.0;
  bool monte_carlo = false;
  Index points = 0;
  std::uint64_t seed = 0;
};

inline constexpr Index kMonteCarloPoints = 100000;

/// sup |interp - truth| over a tensor grid with `grid_size` points per axis
/// (d <= 2) or the max over kMonteCarloPoints seeded uniform points (d > 2).
InterpolationError interpolation_error(const PointFunction& interp, const PointFunction& truth, Index d,
                                       Index grid_size, std::uint64_t seed = 0);

}  // namespace recon
