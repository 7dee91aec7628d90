#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lrmc/dc.hpp"
#include "lrmc/markov.hpp"
#include "lrmc/types.hpp"

namespace lrmc {

// The four transition-matrix estimators benchmarked against each other:
//   mle   row-normalized counts (empty rows fall back to uniform),
//   svd   rank-r truncated SVD of the mle, rows projected back to the simplex,
//   nu    nuclear-norm penalized likelihood, one convex solve at penalty
//         lambda (chosen by cross-validation when unset),
//   rank  rank-constrained likelihood via the penalty continuation.
enum class EstimatorKind { mle, svd, nu, rank };

const char* estimator_name(EstimatorKind kind);
EstimatorKind estimator_from_name(const std::string& name);

struct EstimatorSpec {
  EstimatorKind kind = EstimatorKind::mle;
  Index rank = 1;                    // r for svd and rank
  std::optional<double> lambda;      // nu penalty; unset selects by CV
  std::vector<double> lambda_grid;   // CV grid override; empty uses the default
  Index cv_folds = 5;
  std::uint64_t cv_seed = 1;
  AdmmOptions admm;                  // inner solver settings (nu and rank)
  DcOptions dc;                      // outer loop settings (rank)
  double dc_prox_weight = 1e-3;      // proximal damping of the outer loop
  ContinuationSchedule continuation; // penalty schedule (rank)
};

struct EstimateReport {
  EstimatorKind kind = EstimatorKind::mle;
  bool solver_converged = true;
  bool rank_feasible = true;        // rank estimator: continuation outcome
  double lambda = 0.0;              // nu: penalty actually used
  Index inner_iterations = 0;       // total inner-solver sweeps
  DcReport dc_trace;                // rank estimator
  SolverReport admm_report;         // nu estimator
};

// Fits the estimator to a transition count table.  The nu estimator requires
// lambda to be set here; cross-validation needs the pair-level data of the
// trajectory overload below.
std::pair<TransitionMatrix, EstimateReport> estimate(
    const EstimatorSpec& spec, const TransitionCounts& counts);

// Same, from raw observations; nu without lambda cross-validates on the
// trajectory's transition pairs first.
std::pair<TransitionMatrix, EstimateReport> estimate(const EstimatorSpec& spec,
                                                     const Trajectory& traj);

// K-fold cross-validation for the nu penalty: transition pairs are shuffled
// into folds by a dedicated seeded stream, each lambda is scored by the mean
// held-out negative log-likelihood (predictions floored at 1e-12), and the
// best score wins with ties broken toward the smaller lambda.
double cross_validate_lambda(const Trajectory& traj,
                             const std::vector<double>& grid, Index folds,
                             std::uint64_t seed, const AdmmOptions& admm);

// Default CV grid: 8 logarithmically spaced values spanning four decades
// below default_c0(data), the loss-gradient scale.
std::vector<double> default_lambda_grid(const LikelihoodData& data);

}  // namespace lrmc
