#include "reconstruct/kernels.hpp"

#include <cmath>
#include <sstream>

#include "reconstruct/error.hpp"

namespace recon {

KernelSpec KernelSpec::gaussian(VectorXd theta) {
  if (theta.size() == 0) throw Error(ErrorCode::InvalidArgument, "Gaussian kernel needs at least one theta");
  if (!(theta.array() > 0.0).all() || !theta.allFinite()) {
    throw Error(ErrorCode::InvalidArgument, "Gaussian theta must be strictly positive");
  }
  KernelSpec spec;
  spec.family_ = KernelFamily::gaussian;
  spec.theta_ = std::move(theta);
  return spec;
}

KernelSpec KernelSpec::gaussian(Index d, double theta) {
  return gaussian(VectorXd::Constant(d, theta));
}

KernelSpec KernelSpec::matern(double nu, double phi) {
  if (nu != 0.5 && nu != 1.5 && nu != 2.5) {
    std::ostringstream msg;
    msg << "Matern nu must be 0.5, 1.5 or 2.5, got " << nu;
    throw Error(ErrorCode::UnsupportedNu, msg.str());
  }
  if (!(phi > 0.0) || !std::isfinite(phi)) throw Error(ErrorCode::InvalidArgument, "Matern phi must be positive");
  KernelSpec spec;
  spec.family_ = KernelFamily::matern;
  spec.nu_ = nu;
  spec.phi_ = phi;
  return spec;
}

void KernelSpec::check_dimension(Index d) const {
  if (family_ == KernelFamily::gaussian && theta_.size() != d) {
    std::ostringstream msg;
    msg << "kernel has " << theta_.size() << " theta values but inputs have dimension " << d;
    throw Error(ErrorCode::DimensionMismatch, msg.str());
  }
}

double matern_1d(double nu, double phi, double h) {
  const double z = 2.0 * std::sqrt(nu) * std::abs(h) / phi;
  if (nu == 0.5) return std::exp(-z);
  if (nu == 1.5) return (1.0 + z) * std::exp(-z);
  if (nu == 2.5) return (1.0 + z + z * z / 3.0) * std::exp(-z);
  throw Error(ErrorCode::UnsupportedNu, "Matern nu must be 0.5, 1.5 or 2.5");
}

double KernelSpec::operator()(const Eigen::Ref<const VectorXd>& h) const {
  check_dimension(h.size());
  if (family_ == KernelFamily::gaussian) {
    return std::exp(-(theta_.array() * h.array().square()).sum());
  }
  double value = 1.0;
  for (Index j = 0; j < h.size(); ++j) value *= matern_1d(nu_, phi_, h[j]);
  return value;
}

double kernel_value(const KernelSpec& spec, const Eigen::Ref<const VectorXd>& h) { return spec(h); }

namespace {

void check_points(const KernelSpec& spec, const MatrixXd& p, const MatrixXd& q) {
  if (p.cols() != q.cols()) throw Error(ErrorCode::DimensionMismatch, "point sets have different dimensions");
  if (p.rows() == 0 || q.rows() == 0) throw Error(ErrorCode::DimensionMismatch, "point sets must be nonempty");
  spec.check_dimension(p.cols());
}

}  // namespace

MatrixXd kernel_matrix(const KernelSpec& spec, const MatrixXd& p, const MatrixXd& q) {
  check_points(spec, p, q);
  const Index k = p.rows();
  const Index l = q.rows();
  const Index d = p.cols();
  MatrixXd out(k, l);
  if (spec.family() == KernelFamily::gaussian) {
    // Accumulate the exponent coordinate by coordinate (column-major friendly).
    MatrixXd expo = MatrixXd::Zero(k, l);
    for (Index c = 0; c < d; ++c) {
      const double th = spec.theta()[c];
      for (Index j = 0; j < l; ++j) {
        const double qj = q(j, c);
        expo.col(j).array() += th * (p.col(c).array() - qj).square();
      }
    }
    out = (-expo.array()).exp().matrix();
  } else {
    for (Index j = 0; j < l; ++j) {
      for (Index i = 0; i < k; ++i) out(i, j) = spec((p.row(i) - q.row(j)).transpose());
    }
  }
  return out;
}

MatrixXd kernel_matrix(const KernelSpec& spec, const MatrixXd& p) {
  MatrixXd out = kernel_matrix(spec, p, p);
  // Enforce exact symmetry and unit diagonal.
  out = 0.5 * (out + out.transpose());
  out.diagonal().setOnes();
  return out;
}

VectorXd kernel_vector(const KernelSpec& spec, const MatrixXd& a, const Eigen::Ref<const VectorXd>& x) {
  if (x.size() != a.cols()) throw Error(ErrorCode::DimensionMismatch, "point dimension differs from knots");
  spec.check_dimension(x.size());
  VectorXd r(a.rows());
  VectorXd h(x.size());
  for (Index i = 0; i < a.rows(); ++i) {
    h = x - a.row(i).transpose();
    r[i] = spec(h);
  }
  return r;
}

}  // namespace recon

namespace recon {

SpdFactorization correlation_matrix_factored(const KernelSpec& spec, const KnotSet& knots) {
  return SpdFactorization::factor(kernel_matrix(spec, knots.points()));
}

}  // namespace recon
