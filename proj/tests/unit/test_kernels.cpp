#include <doctest.h>

#include <cmath>

#include <Eigen/Eigenvalues>

#include "support.hpp"

using namespace recon;
using testing::max_abs;

TEST_CASE("kernel values") {
  VectorXd h(1);
  h << 0.2;
  CHECK(kernel_value(KernelSpec::gaussian(1, 12.5), h) == doctest::Approx(0.60653065971263342).epsilon(1e-14));

  h << 0.5;
  CHECK(kernel_value(KernelSpec::matern(0.5, 1.0), h) == doctest::Approx(0.49306869139523979).epsilon(1e-14));

  const VectorXd zero = VectorXd::Zero(3);
  CHECK(kernel_value(KernelSpec::gaussian(3, 4.0), zero) == 1.0);
  CHECK(kernel_value(KernelSpec::matern(1.5, 0.3), zero) == 1.0);
  CHECK(kernel_value(KernelSpec::matern(2.5, 0.3), zero) == 1.0);

  MatrixXd p(1, 2);
  MatrixXd q(1, 2);
  p << 0, 0;
  q << 1, 1;
  const MatrixXd k = kernel_matrix(KernelSpec::gaussian(2, 1.0), p, q);
  CHECK(k(0, 0) == doctest::Approx(0.1353352832366127).epsilon(1e-14));
}

TEST_CASE("Matérn closed forms") {
  const double phi = 0.7;
  const double h = 0.3;
  SUBCASE("nu = 3/2") {
    const double z = 2.0 * std::sqrt(1.5) * h / phi;
    CHECK(matern_1d(1.5, phi, h) == doctest::Approx((1.0 + z) * std::exp(-z)).epsilon(1e-14));
  }
  SUBCASE("nu = 5/2") {
    const double z = 2.0 * std::sqrt(2.5) * h / phi;
    CHECK(matern_1d(2.5, phi, h) == doctest::Approx((1.0 + z + z * z / 3.0) * std::exp(-z)).epsilon(1e-14));
  }
  SUBCASE("unsupported smoothness") {
    try {
      KernelSpec::matern(1.0, 1.0);
      FAIL("expected UnsupportedNu");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::UnsupportedNu);
    }
  }
}

TEST_CASE("kernel matrix shapes") {
  MatrixXd one(1, 2);
  one << 0.3, 0.4;
  CHECK(kernel_matrix(KernelSpec::gaussian(2, 3.0), one)(0, 0) == 1.0);

  const MatrixXd p = uniform_points(3, 2, 5);
  const MatrixXd k = kernel_matrix(KernelSpec::gaussian(2, 3.0), p);
  CHECK(max_abs(k - k.transpose()) == 0.0);
  CHECK(max_abs(k.diagonal() - VectorXd::Ones(3)) == 0.0);

  const KernelSpec g3 = KernelSpec::gaussian(3, 1.0);
  CHECK_THROWS_AS(kernel_matrix(g3, p), Error);
}

TEST_CASE("kernel invariants on random lags") {
  Rng rng(mix_seed(42));
  const KernelSpec specs[] = {
      KernelSpec::gaussian(VectorXd::LinSpaced(3, 0.5, 20.0)),
      KernelSpec::matern(0.5, 0.4),
      KernelSpec::matern(1.5, 0.4),
      KernelSpec::matern(2.5, 0.4),
  };
  for (int trial = 0; trial < 200; ++trial) {
    VectorXd h(3);
    for (Index j = 0; j < 3; ++j) h(j) = rng.uniform() - 0.5;
    for (const KernelSpec& spec : specs) {
      const double value = kernel_value(spec, h);
      CHECK(value == kernel_value(spec, -h));
      CHECK(value > 0.0);
      CHECK(value < 1.0);
    }
    const KernelSpec& g = specs[0];
    double product = 1.0;
    for (Index j = 0; j < 3; ++j) {
      VectorXd hj = VectorXd::Zero(3);
      hj(j) = h(j);
      product *= kernel_value(g, hj);
    }
    CHECK(kernel_value(g, h) == doctest::Approx(product).epsilon(1e-13));
  }
}

TEST_CASE("correlation matrices are numerically PSD") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Index m = 5 + static_cast<Index>(seed % 26);
    const Index d = 1 + static_cast<Index>(seed % 4);
    const MatrixXd a = uniform_points(m, d, seed);
    for (const KernelSpec& spec : {KernelSpec::gaussian(d, 12.5), KernelSpec::matern(1.5, 0.5)}) {
      const MatrixXd r = kernel_matrix(spec, a);
      Eigen::SelfAdjointEigenSolver<MatrixXd> eig(r, Eigen::EigenvaluesOnly);
      CHECK(eig.eigenvalues().minCoeff() > -1e-10);
    }
  }
}

TEST_CASE("correlation_matrix_factored") {
  SUBCASE("m = 1") {
    MatrixXd a(1, 1);
    a << 0.5;
    const SpdFactorization f = correlation_matrix_factored(KernelSpec::gaussian(1, 1.0), KnotSet(a));
    CHECK(f.lower()(0, 0) == 1.0);
    CHECK(f.jitter_applied() == 0.0);
  }
  SUBCASE("m = 2 at 0 and 1") {
    MatrixXd a(2, 1);
    a << 0.0, 1.0;
    const SpdFactorization f = correlation_matrix_factored(KernelSpec::gaussian(1, 1.0), KnotSet(a));
    MatrixXd r(2, 2);
    r << 1.0, std::exp(-1.0), std::exp(-1.0), 1.0;
    const MatrixXd l = f.lower();
    CHECK(max_abs(l * l.transpose() - r) < 1e-15);
  }
  SUBCASE("clustered knots need a nugget") {
    MatrixXd a(40, 1);
    for (Index i = 0; i < 40; ++i) a(i, 0) = 0.5 + 1e-4 * static_cast<double>(i);
    const SpdFactorization f = correlation_matrix_factored(KernelSpec::gaussian(1, 12.5), KnotSet(a));
    CHECK(f.jitter_applied() > 0.0);
  }
}

TEST_CASE("kernel_vector matches the cross matrix") {
  const MatrixXd a = uniform_points(6, 2, 1);
  const MatrixXd x = uniform_points(4, 2, 2);
  const KernelSpec spec = KernelSpec::gaussian(2, 7.0);
  const MatrixXd k = kernel_matrix(spec, x, a);
  for (Index i = 0; i < 4; ++i) {
    CHECK(max_abs(kernel_vector(spec, a, x.row(i).transpose()) - k.row(i).transpose()) < 1e-15);
  }
}
