#include "reconstruct/designs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <thread>

#include "reconstruct/error.hpp"
#include "reconstruct/random.hpp"

namespace recon {

VectorXd chebyshev_knots(Index m) {
  if (m < 1) throw Error(ErrorCode::InvalidArgument, "need m >= 1 Chebyshev knots");
  VectorXd a(m);
  for (Index j = 1; j <= m; ++j) {
    const double angle = static_cast<double>(2 * j - 1) * std::numbers::pi / static_cast<double>(2 * m);
    a[j - 1] = 0.5 - 0.5 * std::cos(angle);
  }
  if (m % 2 == 1) a[m / 2] = 0.5;
  return a;
}

VectorXd equispaced_knots(Index m) {
  if (m < 2) throw Error(ErrorCode::InvalidArgument, "need m >= 2 equispaced knots");
  VectorXd a(m);
  for (Index j = 0; j < m; ++j) a[j] = static_cast<double>(j) / static_cast<double>(m - 1);
  a[m - 1] = 1.0;
  return a;
}

namespace {

double pair_score(const MatrixXd& p, Index i, Index j) {
  double s = 0.0;
  for (Index l = 0; l < p.cols(); ++l) s += 1.0 / std::max(std::abs(p(i, l) - p(j, l)), kCriterionGapFloor);
  return s;
}

double subset_criterion(const MatrixXd& x, const std::vector<Index>& rows) {
  double worst = 0.0;
  const Index d = x.cols();
  for (std::size_t a = 0; a < rows.size(); ++a) {
    for (std::size_t b = a + 1; b < rows.size(); ++b) {
      double s = 0.0;
      for (Index l = 0; l < d; ++l) {
        s += 1.0 / std::max(std::abs(x(rows[a], l) - x(rows[b], l)), kCriterionGapFloor);
      }
      worst = std::max(worst, s);
    }
  }
  return worst;
}

}  // namespace

double knot_criterion(const MatrixXd& points) {
  const Index m = points.rows();
  if (m < 2) throw Error(ErrorCode::InvalidArgument, "criterion needs at least two knots");
  double worst = 0.0;
  for (Index i = 0; i < m; ++i) {
    for (Index j = i + 1; j < m; ++j) worst = std::max(worst, pair_score(points, i, j));
  }
  return worst;
}

double knot_criterion(const KnotSet& knots) { return knot_criterion(knots.points()); }

KnotSelection select_knots(const MatrixXd& x, Index m, Index trials, std::uint64_t seed, int jobs) {
  const Index n = x.rows();
  if (m < 1 || m > n) throw Error(ErrorCode::InvalidArgument, "need 1 <= m <= number of candidates");
  if (trials < 1) throw Error(ErrorCode::InvalidArgument, "need at least one trial");

  if (m == n) {
    std::vector<Index> all(static_cast<std::size_t>(n));
    std::iota(all.begin(), all.end(), Index{0});
    const double c = m >= 2 ? subset_criterion(x, all) : 0.0;
    return {KnotSet(x), std::move(all), c};
  }

  // Draw every subset first (partial Fisher-Yates, undone after each draw)
  // so the stream is the same however the scoring is split.
  Rng rng(mix_seed(seed));
  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  std::vector<std::vector<Index>> subsets(static_cast<std::size_t>(trials));
  std::vector<std::size_t> swaps(static_cast<std::size_t>(m));
  for (auto& subset : subsets) {
    for (Index k = 0; k < m; ++k) {
      const std::size_t pick = static_cast<std::size_t>(k) + rng.index(static_cast<std::size_t>(n - k));
      swaps[static_cast<std::size_t>(k)] = pick;
      std::swap(perm[static_cast<std::size_t>(k)], perm[pick]);
    }
    subset.assign(perm.begin(), perm.begin() + m);
    std::sort(subset.begin(), subset.end());
    for (Index k = m - 1; k >= 0; --k) std::swap(perm[static_cast<std::size_t>(k)], perm[swaps[static_cast<std::size_t>(k)]]);
  }

  std::vector<double> scores(subsets.size(), 0.0);
  auto score_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t t = begin; t < end; ++t) scores[t] = m >= 2 ? subset_criterion(x, subsets[t]) : 0.0;
  };
  const std::size_t workers = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), 1, subsets.size());
  if (workers == 1) {
    score_range(0, subsets.size());
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (subsets.size() + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t begin = w * chunk;
      const std::size_t end = std::min(subsets.size(), begin + chunk);
      if (begin < end) pool.emplace_back(score_range, begin, end);
    }
    for (auto& t : pool) t.join();
  }

  std::size_t best = 0;
  for (std::size_t t = 1; t < scores.size(); ++t) {
    if (scores[t] < scores[best]) best = t;
  }
  MatrixXd points(m, x.cols());
  for (Index k = 0; k < m; ++k) points.row(k) = x.row(subsets[best][static_cast<std::size_t>(k)]);
  return {KnotSet(std::move(points)), std::move(subsets[best]), scores[best]};
}

Index next_knot(const VectorXd& y, const VectorXd& fitted, const std::vector<bool>& excluded) {
  if (y.size() != fitted.size() || static_cast<std::size_t>(y.size()) != excluded.size()) {
    throw Error(ErrorCode::DimensionMismatch, "responses, fitted values and exclusion mask differ in length");
  }
  Index best = -1;
  double best_sq = -1.0;
  for (Index i = 0; i < y.size(); ++i) {
    if (excluded[static_cast<std::size_t>(i)]) continue;
    const double r = y[i] - fitted[i];
    const double sq = r * r;
    if (sq > best_sq) {
      best_sq = sq;
      best = i;
    }
  }
  if (best < 0) throw Error(ErrorCode::NoCandidatesLeft, "every candidate is already a knot");
  return best;
}

std::vector<bool> rows_in_knot_set(const MatrixXd& x, const KnotSet& knots) {
  if (x.cols() != knots.dimension()) throw Error(ErrorCode::DimensionMismatch, "candidates and knots differ in dimension");
  std::vector<bool> mask(static_cast<std::size_t>(x.rows()), false);
  const MatrixXd& a = knots.points();
  for (Index i = 0; i < x.rows(); ++i) {
    for (Index k = 0; k < a.rows(); ++k) {
      if (x.row(i) == a.row(k)) {
        mask[static_cast<std::size_t>(i)] = true;
        break;
      }
    }
  }
  return mask;
}

VectorXd ReplicationDesign::points() const {
  VectorXd out(size());
  for (Index j = 0; j < knots.size(); ++j) out.segment(j * replications, replications).setConstant(knots[j]);
  return out;
}

ReplicationDesign replication_design(const VectorXd& knots, Index l) {
  if (l < 1) throw Error(ErrorCode::InvalidArgument, "need at least one replication per knot");
  if (knots.size() < 1) throw Error(ErrorCode::InvalidArgument, "need at least one knot");
  return {knots, l};
}

SequentialStopper::SequentialStopper(SequentialStopRule rule, double initial_gcv)
    : rule_(rule), best_(initial_gcv) {}

bool SequentialStopper::update(double gcv) {
  ++iterations_;
  if (gcv < best_ * (1.0 - rule_.min_relative_improvement)) {
    stalled_ = 0;
  } else {
    ++stalled_;
  }
  best_ = std::min(best_, gcv);
  if (iterations_ >= rule_.max_iterations) return true;
  return rule_.early_stop && stalled_ >= rule_.patience;
}

}  // namespace recon
