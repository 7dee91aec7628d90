#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lrmc/admm.hpp"
#include "lrmc/likelihood.hpp"
#include "lrmc/types.hpp"

namespace lrmc {

// Penalized surrogate of the rank-constrained likelihood problem:
//   F(X) = L(X) + penalty_weight (||X||_* - kyfan_norm(X, target_rank)),
// over row-stochastic X.  The penalty vanishes exactly on matrices of rank at
// most target_rank, and a minimizer of F that reaches zero penalty solves the
// rank-constrained problem itself.
struct PenalizedProblem {
  LikelihoodData data;
  double penalty_weight = 1.0;  // c
  double prox_weight = 1e-3;    // alpha, the proximal damping between iterates
  Index target_rank = 1;        // r
};

struct DcOptions {
  // Step tolerance eta; nonpositive means the scaled default
  // inner.tol sqrt(p) (1 + ||X0||_F), which holds each row's movement to
  // roughly the accuracy the inner solver can resolve.
  double step_tol = 0.0;
  // Large penalty weights contract the step sequence slowly and unevenly
  // (step norms can plateau near 1e-4 for over a thousand iterations before
  // settling), so the cap leaves room for that tail.
  Index max_iterations = 3000;
  AdmmOptions inner;
};

struct DcIterate {
  Index iteration;
  Index stage;  // continuation stage, 0 for a single pdc_solve
  double objective;
  double step_norm;
  Index rank;
  Index inner_iterations;
  bool inner_converged;
};

struct DcReport {
  std::vector<DcIterate> history;
  bool converged = false;
  std::string termination;  // "step_tolerance" or "iteration_cap"
};

struct DcResult {
  Matrix X;
  DcReport report;
  DualState state;  // final inner-solver state, reusable as a warm start
};

// F(X) as above; +infinity outside the nonnegative orthant or when X vanishes
// on the support of the data.
double penalized_objective(const PenalizedProblem& prob, const Matrix& X);

// Majorize-minimize loop on F: each iteration linearizes the Ky Fan term at
// the current iterate and solves the convex subproblem
//   min L(X) + c ||X||_* - c <W_k, X> + (alpha/2) ||X - X_k||_F^2,  X 1 = 1,
// through solve_subproblem (the linear and proximal parts fold into the
// subproblem's linear term).  Stops when ||X_{k+1} - X_k||_F <= eta.  Each
// iteration decreases F by at least (alpha/2) ||X_{k+1} - X_k||_F^2 up to the
// inner-solver accuracy.
DcResult pdc_solve(const PenalizedProblem& prob, const Matrix& X0,
                   const DcOptions& opts,
                   const std::optional<DualState>& warm = std::nullopt);

struct ContinuationSchedule {
  double c0 = 0.0;            // nonpositive means default_c0(data)
  double growth = 3.1622776601683795;  // sqrt(10)
  Index max_stages = 8;
};

struct ContinuationResult {
  Matrix X;
  bool rank_feasible = false;
  DcReport trace;     // all stages, stage field set per pdc_solve call
  Index stages_run = 0;
  double final_c = 0.0;
};

// Runs pdc_solve at c = c0, c0 g, c0 g^2, ... warm-starting each stage from
// the previous one, until the iterate's numerical rank drops to target_rank
// or the stage cap is hit (then flagged rank-infeasible, never thrown).  Rank
// is counted at a relative tolerance of 10x the inner solver tolerance (at
// least 1e-8), since the inner solves leave singular-value noise at that
// scale even when the penalty has fully collapsed the spectrum.
ContinuationResult penalty_continuation(const LikelihoodData& data,
                                        Index target_rank, double prox_weight,
                                        const ContinuationSchedule& schedule,
                                        const DcOptions& opts);

// Default starting point: row-normalized counts floored at 1e-8 and
// renormalized, so the loss and its conjugate stay finite from the start.
Matrix dc_default_start(const LikelihoodData& data);

// Default initial penalty 0.1 p max_ij w_ij, the scale of the loss gradient.
double default_c0(const LikelihoodData& data);

// Step norm of one extra majorize-minimize iteration started at X; near zero
// exactly at the loop's fixed points.
double stationarity_gap(const PenalizedProblem& prob, const Matrix& X,
                        const DcOptions& opts);

}  // namespace lrmc
