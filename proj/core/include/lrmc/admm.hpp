#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lrmc/likelihood.hpp"
#include "lrmc/types.hpp"

namespace lrmc {

// Convex subproblem
//   min_X  L(X) + <linear_term, X> + nuclear_weight ||X||_*
//          + (prox_weight / 2) ||X||_F^2
//   s.t.   X 1 = 1,  X >= 0 (through the domain of L),
// where L is the sample negative log-likelihood of `data`.  Solved through its
// dual
//   min  conj(-Xi) - <1, y> + (prox_weight / 2) ||Z||_F^2
//   s.t. Xi + y 1^T + S + prox_weight Z = linear_term,  ||S||_2 <= nuclear_weight,
// by a symmetric Gauss-Seidel ADMM; X reappears as the multiplier of the dual
// constraint.  conj is the convex conjugate of L (see conjugate_value), so the
// Xi block stays entrywise nonnegative and strictly positive on the support.
struct SubproblemSpec {
  LikelihoodData data;
  Matrix linear_term;
  double nuclear_weight = 1.0;
  double prox_weight = 0.0;
};

enum class SweepOrder {
  symmetric_gs,  // y, Xi, y, Z, S, Z; the order with a convergence guarantee
  plain_gs,      // y, Xi, Z, S; diagnostic only
};

struct AdmmOptions {
  double tol = 1e-6;
  Index max_iterations = 5000;
  double step_length = 1.618;  // multiplier step, must lie in (0, (1+sqrt 5)/2)
  double sigma0 = 1.0;
  bool adapt_sigma = true;     // rebalance penalty while residuals are lopsided
  bool record_history = false;
  SweepOrder sweep = SweepOrder::symmetric_gs;
};

// All dual blocks plus the multiplier X and the current penalty parameter.
struct DualState {
  Matrix Xi, S, Z, X;
  Vector y;
  double sigma = 1.0;

  // Cold start: zero dual blocks, uniform row-stochastic multiplier.
  static DualState initial(Index p, double sigma0);
  // Cold dual blocks around a caller-supplied multiplier start.
  static DualState from_primal(Matrix X0, double sigma0);
};

struct KktResiduals {
  double primal_feas = 0.0;  // || X 1 - 1 ||_2 / (1 + sqrt p)
  double dual_feas = 0.0;    // constraint residual of the dual, relative
  double gap_proxy = 0.0;    // relative change of X across the last sweep

  double max() const;
};

struct SolverIterate {
  Index iteration;
  double lagrangian;
  double primal_feas;
  double dual_feas;
  double sigma;
};

struct SolverReport {
  std::vector<SolverIterate> history;  // filled when record_history is set
  Index iterations = 0;
  bool converged = false;
  std::string termination;  // "kkt_tolerance" or "iteration_cap"
  KktResiduals final_residuals;
};

struct SubproblemSolution {
  Matrix X;
  DualState state;
  SolverReport report;
};

// One closed-form block update each, evaluated at the given state.  These are
// the exact minimizers of the augmented Lagrangian in their block.
Vector update_y(const DualState& state, const SubproblemSpec& spec);
Matrix update_xi(const DualState& state, const SubproblemSpec& spec);
Matrix update_z(const DualState& state, const SubproblemSpec& spec);
Matrix update_s(const DualState& state, const SubproblemSpec& spec);

KktResiduals kkt_residuals(const DualState& state, const SubproblemSpec& spec,
                           const Matrix* prev_x = nullptr);

// Augmented Lagrangian of the dual at the given state (lower values better).
double augmented_lagrangian(const DualState& state, const SubproblemSpec& spec);

// Dual objective (min form); at an optimum it equals minus the primal value.
double dual_objective(const DualState& state, const SubproblemSpec& spec);

// Primal objective; +infinity outside the nonnegative orthant or when X
// vanishes on the support of the data.
double primal_objective(const SubproblemSpec& spec, const Matrix& X);

SubproblemSolution solve_subproblem(const SubproblemSpec& spec,
                                    const std::optional<DualState>& warm,
                                    const AdmmOptions& opts);

}  // namespace lrmc
