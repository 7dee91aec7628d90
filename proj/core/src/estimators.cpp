#include "lrmc/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "lrmc/likelihood.hpp"
#include "lrmc/rng.hpp"
#include "lrmc/spectral.hpp"

namespace lrmc {

namespace {

constexpr double kPredictionFloor = 1e-12;

// Solver output is row-stochastic only to its tolerance; clamp the dust and
// renormalize so the result passes TransitionMatrix validation exactly.
TransitionMatrix tidy_rows(Matrix X) {
  X = X.cwiseMax(0.0);
  for (Index i = 0; i < X.rows(); ++i) {
    double s = X.row(i).sum();
    if (s > 0.0)
      X.row(i) /= s;
    else
      X.row(i).setConstant(1.0 / static_cast<double>(X.cols()));
  }
  return TransitionMatrix(std::move(X));
}

std::pair<TransitionMatrix, EstimateReport> fit_nu(const EstimatorSpec& spec,
                                                   const TransitionCounts& counts,
                                                   double lambda) {
  if (lambda <= 0.0)
    throw std::invalid_argument("nu estimator: lambda must be positive");
  const Index p = counts.size();
  SubproblemSpec sub{LikelihoodData(counts), Matrix::Zero(p, p), lambda, 0.0};
  DualState start =
      DualState::from_primal(dc_default_start(sub.data), spec.admm.sigma0);
  SubproblemSolution sol = solve_subproblem(sub, start, spec.admm);

  EstimateReport report;
  report.kind = EstimatorKind::nu;
  report.lambda = lambda;
  report.solver_converged = sol.report.converged;
  report.inner_iterations = sol.report.iterations;
  report.admm_report = std::move(sol.report);
  return {tidy_rows(std::move(sol.X)), std::move(report)};
}

std::vector<std::pair<std::int32_t, std::int32_t>> transition_pairs(
    const Trajectory& traj) {
  std::vector<std::pair<std::int32_t, std::int32_t>> pairs;
  if (traj.mode == TrajectoryMode::iid_pairs) {
    pairs = traj.pairs;
  } else {
    for (std::size_t t = 0; t + 1 < traj.states.size(); ++t)
      pairs.emplace_back(traj.states[t], traj.states[t + 1]);
  }
  return pairs;
}

}  // namespace

const char* estimator_name(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::mle: return "mle";
    case EstimatorKind::svd: return "svd";
    case EstimatorKind::nu: return "nu";
    case EstimatorKind::rank: return "rank";
  }
  throw std::invalid_argument("unknown estimator kind");
}

EstimatorKind estimator_from_name(const std::string& name) {
  if (name == "mle") return EstimatorKind::mle;
  if (name == "svd") return EstimatorKind::svd;
  if (name == "nu") return EstimatorKind::nu;
  if (name == "rank") return EstimatorKind::rank;
  throw std::invalid_argument("unknown estimator name: " + name);
}

std::pair<TransitionMatrix, EstimateReport> estimate(
    const EstimatorSpec& spec, const TransitionCounts& counts) {
  EstimateReport report;
  report.kind = spec.kind;
  switch (spec.kind) {
    case EstimatorKind::mle:
      return {empirical_mle(counts), std::move(report)};

    case EstimatorKind::svd: {
      if (spec.rank < 1 || spec.rank > counts.size())
        throw std::invalid_argument("svd estimator: rank out of range");
      TransitionMatrix mle = empirical_mle(counts);
      SvdFactors f = svd_truncate(mle.entries(), spec.rank);
      Matrix low_rank =
          f.left * f.singular_values.asDiagonal() * f.right.transpose();
      return {simplex_project_rows(low_rank), std::move(report)};
    }

    case EstimatorKind::nu: {
      if (!spec.lambda)
        throw std::invalid_argument(
            "nu estimator: lambda is required when fitting from counts; "
            "cross-validation needs a trajectory");
      return fit_nu(spec, counts, *spec.lambda);
    }

    case EstimatorKind::rank: {
      if (spec.rank < 1 || spec.rank > counts.size())
        throw std::invalid_argument("rank estimator: rank out of range");
      LikelihoodData data(counts);
      DcOptions dc = spec.dc;
      dc.inner = spec.admm;
      ContinuationResult res = penalty_continuation(data, spec.rank,
                                                    spec.dc_prox_weight,
                                                    spec.continuation, dc);
      report.rank_feasible = res.rank_feasible;
      report.solver_converged = res.rank_feasible && res.trace.converged;
      for (const DcIterate& it : res.trace.history)
        report.inner_iterations += it.inner_iterations;
      report.dc_trace = std::move(res.trace);
      return {tidy_rows(std::move(res.X)), std::move(report)};
    }
  }
  throw std::invalid_argument("unknown estimator kind");
}

std::pair<TransitionMatrix, EstimateReport> estimate(const EstimatorSpec& spec,
                                                     const Trajectory& traj) {
  TransitionCounts counts = count_transitions(traj);
  if (spec.kind == EstimatorKind::nu && !spec.lambda) {
    LikelihoodData data(counts);
    std::vector<double> grid =
        spec.lambda_grid.empty() ? default_lambda_grid(data) : spec.lambda_grid;
    double lambda = cross_validate_lambda(traj, grid, spec.cv_folds,
                                          spec.cv_seed, spec.admm);
    EstimatorSpec chosen = spec;
    chosen.lambda = lambda;
    return estimate(chosen, counts);
  }
  return estimate(spec, counts);
}

double cross_validate_lambda(const Trajectory& traj,
                             const std::vector<double>& grid, Index folds,
                             std::uint64_t seed, const AdmmOptions& admm) {
  if (grid.empty())
    throw std::invalid_argument("cross_validate_lambda: empty grid");
  for (double l : grid)
    if (l <= 0.0)
      throw std::invalid_argument("cross_validate_lambda: grid must be positive");
  auto pairs = transition_pairs(traj);
  const Index n = static_cast<Index>(pairs.size());
  if (folds < 2 || folds > n)
    throw std::invalid_argument(
        "cross_validate_lambda: folds must lie in [2, #pairs]");
  const Index p = traj.num_states;

  // Seeded Fisher-Yates, then round-robin fold labels over the shuffled order.
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  Rng rng(mix_seed(seed, 0x666f6c64 /* "fold" */));
  for (Index i = n - 1; i > 0; --i) {
    Index j = static_cast<Index>(
        uniform_below(rng, static_cast<std::uint64_t>(i) + 1));
    std::swap(order[static_cast<std::size_t>(i)],
              order[static_cast<std::size_t>(j)]);
  }

  std::vector<double> grid_sorted = grid;
  std::sort(grid_sorted.begin(), grid_sorted.end());
  std::vector<double> score(grid_sorted.size(), 0.0);

  for (Index f = 0; f < folds; ++f) {
    CountMatrix train = CountMatrix::Zero(p, p);
    std::vector<std::pair<std::int32_t, std::int32_t>> held_out;
    for (Index k = 0; k < n; ++k) {
      const auto& pr = pairs[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])];
      if (k % folds == f)
        held_out.push_back(pr);
      else
        train(pr.first, pr.second) += 1;
    }
    TransitionCounts train_counts(std::move(train));
    LikelihoodData data(train_counts);
    // Walk the grid from small to large, warm-starting each solve with the
    // previous solution's dual state.
    std::optional<DualState> warm =
        DualState::from_primal(dc_default_start(data), admm.sigma0);
    for (std::size_t g = 0; g < grid_sorted.size(); ++g) {
      SubproblemSpec sub{data, Matrix::Zero(p, p), grid_sorted[g], 0.0};
      SubproblemSolution sol = solve_subproblem(sub, warm, admm);
      warm = sol.state;
      Matrix fitted = sol.X.cwiseMax(kPredictionFloor);
      double fold_score = 0.0;
      for (const auto& [a, b] : held_out) fold_score -= std::log(fitted(a, b));
      score[g] += fold_score / static_cast<double>(held_out.size());
    }
  }

  std::size_t best = 0;
  for (std::size_t g = 1; g < score.size(); ++g)
    if (score[g] < score[best]) best = g;  // ties keep the smaller lambda
  return grid_sorted[best];
}

std::vector<double> default_lambda_grid(const LikelihoodData& data) {
  const double top = default_c0(data);
  const int points = 8;
  std::vector<double> grid;
  grid.reserve(points);
  for (int k = 0; k < points; ++k) {
    double exponent = -4.0 + 4.0 * static_cast<double>(k) /
                                  static_cast<double>(points - 1);
    grid.push_back(top * std::pow(10.0, exponent));
  }
  return grid;
}

}  // namespace lrmc
