#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "lrmc/types.hpp"

namespace lrmc {

// Row-stochastic matrix over a finite state space.  Construction validates
// shape and row sums (1 within 1e-9) and clamps harmless negative dust
// (>= -1e-12) to zero; anything worse throws.
class TransitionMatrix {
 public:
  explicit TransitionMatrix(Matrix entries);

  Index size() const { return entries_.rows(); }
  const Matrix& entries() const { return entries_; }
  double operator()(Index i, Index j) const { return entries_(i, j); }

 private:
  Matrix entries_;
};

// Probability vector, validated to be nonnegative and sum to 1 within 1e-9.
class StationaryDistribution {
 public:
  explicit StationaryDistribution(Vector weights);

  Index size() const { return weights_.size(); }
  const Vector& weights() const { return weights_; }
  double operator[](Index i) const { return weights_[i]; }

 private:
  Vector weights_;
};

enum class TrajectoryMode { chain, iid_pairs };

// Observed data: either a single chain path (states, length n+1 for n
// transitions) or n independent (from, to) pairs.
struct Trajectory {
  TrajectoryMode mode = TrajectoryMode::chain;
  Index num_states = 0;
  std::vector<std::int32_t> states;
  std::vector<std::pair<std::int32_t, std::int32_t>> pairs;

  std::int64_t num_transitions() const {
    if (mode == TrajectoryMode::chain)
      return states.empty() ? 0 : static_cast<std::int64_t>(states.size()) - 1;
    return static_cast<std::int64_t>(pairs.size());
  }
};

// Transition frequency table n_ij with cached row totals and grand total.
struct TransitionCounts {
  CountMatrix counts;
  Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1> row_totals;
  std::int64_t total = 0;

  explicit TransitionCounts(CountMatrix c);
  Index size() const { return counts.rows(); }
};

// Random rank-r chain built from row-stochastic factors U (p x r), mid (r x r)
// and V^T (r x p), each row drawn from a flat Dirichlet.  `floor_eps` mixes the
// result with the uniform row: P <- (1 - eps) P + eps/p.
TransitionMatrix generate_latent_lowrank(Index p, Index r, std::uint64_t seed,
                                         double floor_eps = 0.0);

// State-aggregation chain: states are partitioned into r nonempty clusters and
// states in a cluster share a row, so the matrix has r distinct rows.
TransitionMatrix generate_aggregated(Index p, Index r, std::uint64_t seed,
                                     double floor_eps = 0.0);

// Stationary distribution via power iteration on P^T from the uniform vector.
// Convergence requires the fixed point to be unique; reducible or periodic
// chains make the iteration stall or land on ambiguous fixed points, and both
// cases throw.
StationaryDistribution stationary_distribution(const TransitionMatrix& P);

// Draws n transitions.  Chain mode starts from X0 ~ mu and walks the chain
// (n+1 states); pair mode draws n independent pairs (i ~ mu, j ~ P(i,.)).
Trajectory simulate(const TransitionMatrix& P, std::int64_t n,
                    TrajectoryMode mode, std::uint64_t seed);

// Keeps the pairs (X_{m*skip}, X_{m*skip + 1}) of a chain trajectory, m = 0,
// 1, ...; skip = 1 keeps every consecutive pair.  The result is in pair mode.
Trajectory downsample(const Trajectory& traj, std::int64_t skip);

TransitionCounts count_transitions(const Trajectory& traj);

}  // namespace lrmc
