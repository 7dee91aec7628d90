#include "lrmc/markov.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "lrmc/rng.hpp"

namespace lrmc {

namespace {

constexpr double kEntryDust = 1e-12;   // negative dust clamped on construction
constexpr double kRowSumTol = 1e-9;

void check_dimensions(Index p, Index r) {
  if (p < 1) throw std::invalid_argument("state count p must be positive");
  if (r < 1 || r > p)
    throw std::invalid_argument("rank r must satisfy 1 <= r <= p");
}

}  // namespace

TransitionMatrix::TransitionMatrix(Matrix entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols() || entries_.rows() < 1)
    throw std::invalid_argument("transition matrix must be square and nonempty");
  if (!entries_.allFinite())
    throw std::invalid_argument("transition matrix has non-finite entries");
  for (Index i = 0; i < entries_.rows(); ++i) {
    for (Index j = 0; j < entries_.cols(); ++j) {
      double v = entries_(i, j);
      if (v < 0.0) {
        if (v < -kEntryDust)
          throw std::invalid_argument("transition matrix entry is negative: " +
                                      std::to_string(v));
        entries_(i, j) = 0.0;
      }
    }
    double s = entries_.row(i).sum();
    if (std::abs(s - 1.0) > kRowSumTol)
      throw std::invalid_argument("transition matrix row " + std::to_string(i) +
                                  " sums to " + std::to_string(s));
  }
}

StationaryDistribution::StationaryDistribution(Vector weights)
    : weights_(std::move(weights)) {
  if (weights_.size() < 1)
    throw std::invalid_argument("distribution must be nonempty");
  if (!weights_.allFinite())
    throw std::invalid_argument("distribution has non-finite entries");
  for (Index i = 0; i < weights_.size(); ++i) {
    double v = weights_[i];
    if (v < 0.0) {
      if (v < -kEntryDust)
        throw std::invalid_argument("distribution entry is negative");
      weights_[i] = 0.0;
    }
  }
  if (std::abs(weights_.sum() - 1.0) > kRowSumTol)
    throw std::invalid_argument("distribution does not sum to 1");
}

TransitionCounts::TransitionCounts(CountMatrix c) : counts(std::move(c)) {
  if (counts.rows() != counts.cols() || counts.rows() < 1)
    throw std::invalid_argument("count matrix must be square and nonempty");
  if ((counts.array() < 0).any())
    throw std::invalid_argument("counts must be nonnegative");
  row_totals = counts.rowwise().sum();
  total = row_totals.sum();
}

TransitionMatrix generate_latent_lowrank(Index p, Index r, std::uint64_t seed,
                                         double floor_eps) {
  check_dimensions(p, r);
  if (floor_eps < 0.0 || floor_eps > 1.0)
    throw std::invalid_argument("floor_eps must lie in [0, 1]");
  Rng rng(seed);
  Matrix U(p, r), mid(r, r), Vt(r, p);
  for (Index i = 0; i < p; ++i) U.row(i) = dirichlet_flat(rng, r).transpose();
  for (Index i = 0; i < r; ++i) mid.row(i) = dirichlet_flat(rng, r).transpose();
  for (Index i = 0; i < r; ++i) Vt.row(i) = dirichlet_flat(rng, p).transpose();
  Matrix P = U * mid * Vt;
  if (floor_eps > 0.0)
    P = (1.0 - floor_eps) * P +
        Matrix::Constant(p, p, floor_eps / static_cast<double>(p));
  return TransitionMatrix(std::move(P));
}

TransitionMatrix generate_aggregated(Index p, Index r, std::uint64_t seed,
                                     double floor_eps) {
  check_dimensions(p, r);
  if (floor_eps < 0.0 || floor_eps > 1.0)
    throw std::invalid_argument("floor_eps must lie in [0, 1]");
  Rng rng(seed);
  // First r states seed the clusters so none is empty; the rest land uniformly.
  std::vector<Index> cluster(p);
  for (Index i = 0; i < r; ++i) cluster[i] = i;
  for (Index i = r; i < p; ++i)
    cluster[i] = static_cast<Index>(rng() % static_cast<std::uint64_t>(r));
  Matrix rows(r, p);
  for (Index k = 0; k < r; ++k) rows.row(k) = dirichlet_flat(rng, p).transpose();
  Matrix P(p, p);
  for (Index i = 0; i < p; ++i) P.row(i) = rows.row(cluster[i]);
  if (floor_eps > 0.0)
    P = (1.0 - floor_eps) * P +
        Matrix::Constant(p, p, floor_eps / static_cast<double>(p));
  return TransitionMatrix(std::move(P));
}

namespace {

// Power iteration on P^T.  Returns true and writes the limit into mu when the
// per-step l1 change drops below tol before the cap.
bool power_iterate(const Matrix& Pt, Vector& mu, double tol, Index cap) {
  for (Index it = 0; it < cap; ++it) {
    Vector next = Pt * mu;
    double s = next.sum();
    if (s <= 0.0) return false;
    next /= s;
    double change = (next - mu).cwiseAbs().sum();
    mu = next;
    if (change <= tol) return true;
  }
  return false;
}

}  // namespace

StationaryDistribution stationary_distribution(const TransitionMatrix& P) {
  const Index p = P.size();
  const Matrix Pt = P.entries().transpose();
  const double tol = 1e-12;
  const Index cap = std::max<Index>(
      100, static_cast<Index>(std::ceil(100.0 * static_cast<double>(p) *
                                        std::log(static_cast<double>(p)))));

  Vector mu = Vector::Constant(p, 1.0 / static_cast<double>(p));
  if (!power_iterate(Pt, mu, tol, cap))
    throw ConvergenceError(
        "stationary_distribution: power iteration did not converge "
        "(chain may be periodic or reducible)");

  // A second start distinguishes chains with many fixed points (reducible, or
  // the identity) from ergodic ones: both starts must land on the same limit.
  if (p > 1) {
    Vector probe = Vector::Constant(p, 0.5 / static_cast<double>(p));
    probe[0] += 0.5;
    if (!power_iterate(Pt, probe, tol, cap))
      throw ConvergenceError(
          "stationary_distribution: power iteration did not converge "
          "(chain may be periodic or reducible)");
    if ((probe - mu).cwiseAbs().sum() > 1e-8)
      throw ConvergenceError(
          "stationary_distribution: stationary distribution is not unique");
  }

  double residual = ((mu.transpose() * P.entries()).transpose() - mu)
                        .cwiseAbs()
                        .sum();
  if (residual > 1e-10)
    throw ConvergenceError(
        "stationary_distribution: fixed-point residual " +
        std::to_string(residual) + " exceeds 1e-10");
  return StationaryDistribution(std::move(mu));
}

Trajectory simulate(const TransitionMatrix& P, std::int64_t n,
                    TrajectoryMode mode, std::uint64_t seed) {
  if (n < 0) throw std::invalid_argument("simulate: n must be nonnegative");
  const StationaryDistribution mu = stationary_distribution(P);
  Rng rng(seed);
  Trajectory traj;
  traj.mode = mode;
  traj.num_states = P.size();
  if (mode == TrajectoryMode::chain) {
    traj.states.reserve(static_cast<std::size_t>(n) + 1);
    Index state = sample_categorical(rng, mu.weights());
    traj.states.push_back(static_cast<std::int32_t>(state));
    for (std::int64_t t = 0; t < n; ++t) {
      state = sample_categorical(rng, P.entries().row(state).transpose());
      traj.states.push_back(static_cast<std::int32_t>(state));
    }
  } else {
    traj.pairs.reserve(static_cast<std::size_t>(n));
    for (std::int64_t t = 0; t < n; ++t) {
      Index i = sample_categorical(rng, mu.weights());
      Index j = sample_categorical(rng, P.entries().row(i).transpose());
      traj.pairs.emplace_back(static_cast<std::int32_t>(i),
                              static_cast<std::int32_t>(j));
    }
  }
  return traj;
}

Trajectory downsample(const Trajectory& traj, std::int64_t skip) {
  if (traj.mode != TrajectoryMode::chain)
    throw std::invalid_argument("downsample: input must be a chain trajectory");
  if (skip < 1) throw std::invalid_argument("downsample: skip must be >= 1");
  const std::int64_t last = static_cast<std::int64_t>(traj.states.size()) - 1;
  Trajectory out;
  out.mode = TrajectoryMode::iid_pairs;
  out.num_states = traj.num_states;
  for (std::int64_t m = 0; m * skip + 1 <= last; ++m) {
    out.pairs.emplace_back(traj.states[static_cast<std::size_t>(m * skip)],
                           traj.states[static_cast<std::size_t>(m * skip + 1)]);
  }
  if (out.pairs.empty())
    throw std::invalid_argument("downsample: skip exceeds trajectory length");
  return out;
}

TransitionCounts count_transitions(const Trajectory& traj) {
  if (traj.num_states < 1)
    throw std::invalid_argument("count_transitions: empty state space");
  const Index p = traj.num_states;
  CountMatrix counts = CountMatrix::Zero(p, p);
  auto tally = [&](std::int32_t a, std::int32_t b) {
    if (a < 0 || a >= p || b < 0 || b >= p)
      throw std::invalid_argument("count_transitions: state index out of range");
    counts(a, b) += 1;
  };
  if (traj.mode == TrajectoryMode::chain) {
    for (std::size_t t = 0; t + 1 < traj.states.size(); ++t)
      tally(traj.states[t], traj.states[t + 1]);
  } else {
    for (const auto& [a, b] : traj.pairs) tally(a, b);
  }
  return TransitionCounts(std::move(counts));
}

}  // namespace lrmc
