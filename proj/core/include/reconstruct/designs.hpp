#pragma once

#include <cstdint>
#include <vector>

#include "reconstruct/knot_set.hpp"
#include "reconstruct/numerics.hpp"

namespace recon {

/// a_j = 1/2 - cos((2j - 1)π / 2m) / 2, j = 1..m, ascending.
VectorXd chebyshev_knots(Index m);

/// a_j = (j - 1)/(m - 1), j = 1..m; m >= 2.
VectorXd equispaced_knots(Index m);

/// m = 10 d.
inline Index default_knot_count(Index d) { return 10 * d; }

inline constexpr Index kDefaultSubsetTrials = 20000;

/// Coordinate gaps below this are clamped in knot_criterion.
inline constexpr double kCriterionGapFloor = 1e-12;

/// c(A) = max over pairs i < j of Σ_l 1/|a_il - a_jl|. Requires m >= 2.
double knot_criterion(const MatrixXd& points);
double knot_criterion(const KnotSet& knots);

struct KnotSelection {
  KnotSet knots;
  std::vector<Index> indices;  // ascending row indices into the candidates
  double criterion = 0.0;
};

/// Best of `trials` random m-subsets of the rows of `x` under knot_criterion.
/// Subsets are drawn sequentially from the seed; scoring may use `jobs`
/// threads and the result does not depend on it (ties go to the earliest
/// trial).
KnotSelection select_knots(const MatrixXd& x, Index m, Index trials, std::uint64_t seed, int jobs = 1);

/// argmax over i not in `excluded` of (y_i - fitted_i)², lowest index on ties.
/// Throws NoCandidatesLeft when every row is excluded.
Index next_knot(const VectorXd& y, const VectorXd& fitted, const std::vector<bool>& excluded);

/// Marks the rows of `x` that coincide with a knot of `knots`.
std::vector<bool> rows_in_knot_set(const MatrixXd& x, const KnotSet& knots);

struct ReplicationDesign {
  VectorXd knots;
  Index replications = 1;

  Index size() const { return knots.size() * replications; }

  /// l copies of each knot, ordered by knot.
  VectorXd points() const;
};

ReplicationDesign replication_design(const VectorXd& knots, Index l);

/// Stopping rule for sequential knot addition: stop after `patience`
/// consecutive additions that fail to lower the best GCV by at least
/// `min_relative_improvement`, or after `max_iterations` additions.
struct SequentialStopRule {
  double min_relative_improvement = 1e-3;
  int patience = 3;
  int max_iterations = 15;
  bool early_stop = true;
};

class SequentialStopper {
 public:
  explicit SequentialStopper(SequentialStopRule rule, double initial_gcv);

  /// Records the GCV after one more addition; returns true when the run
  /// should stop.
  bool update(double gcv);

  int iterations() const { return iterations_; }

 private:
  SequentialStopRule rule_;
  double best_;
  int stalled_ = 0;
  int iterations_ = 0;
};

}  // namespace recon
