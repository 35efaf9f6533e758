#pragma once

#include "reconstruct/numerics.hpp"

namespace recon {

/// m distinct points of [0,1]^d (rows) carrying the reconstruction parameters.
class KnotSet {
 public:
  /// Validates: at least one row, coordinates within [0,1], rows pairwise
  /// distinct. Throws KnotOutOfRange / DuplicateKnots.
  explicit KnotSet(MatrixXd points);

  static KnotSet from_1d(const VectorXd& knots);

  const MatrixXd& points() const { return points_; }
  Index size() const { return points_.rows(); }
  Index dimension() const { return points_.cols(); }

 private:
  MatrixXd points_;
};

}  // namespace recon
