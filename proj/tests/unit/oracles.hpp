// Reference implementations used to cross-check the production solvers.
// Everything here favours transparency over speed: brute-force searches,
// textbook iterations, and closed-form case analysis on tiny problems.
#pragma once

#include <cstdint>
#include <functional>

#include "lrmc/types.hpp"

namespace lrmc::oracle {

// Minimizes a unimodal function on [lo, hi] by golden-section search and
// returns the argmin. `iters` halves the bracket enough times that the
// result is accurate to roughly (hi - lo) * 0.618^iters.
double golden_section_minimize(const std::function<double(double)>& f, double lo, double hi,
                               int iters = 200);

// Exact Frobenius projection of a 2x2 matrix onto {S : ||S||_2 <= c}.
// Works in the rotation/reflection coordinates where the projection
// reduces to a two-variable quadratic program over {t1 + t2 <= 2c, t >= 0},
// which is solved by case enumeration rather than an SVD.
Matrix spectral_ball_project_2x2(const Matrix& m, double c);

// Objective of the row-stochastic subproblem
//   sum_ij -w_ij log x_ij + <linear, x> + nuclear_weight * ||x||_*
//     + prox_weight / 2 * ||x||_F^2
// evaluated with Jacobi SVD. Returns +inf when x has a nonpositive entry on
// the support of w or a negative entry anywhere.
double subproblem_objective(const Matrix& weights, const Matrix& linear, double nuclear_weight,
                            double prox_weight, const Matrix& x);

struct SubgradientResult {
  Matrix x;
  double objective = 0.0;
  // Objective of the last iterate, mostly for diagnostics.
  double last_objective = 0.0;
  long iterations_used = 0;
};

// Projected subgradient descent on the subproblem above, restricted to
// row-stochastic matrices. Each iteration takes the subgradient step with a
// backtracked step length (accepted on the standard proximal sufficient
// decrease test, so the objective is monotone); where backtracking stalls at
// a nonsmooth point it falls back to the classic 2 / (mu (k+2)) schedule for
// strongly convex objectives. `mu` should lower-bound the strong convexity
// modulus (alpha + min positive weight works when all weights are positive).
// The starting point is nudged slightly into the interior so the logarithmic
// terms are defined. Tracks the best objective seen and stops early once
// progress stalls at machine precision. Slow but independent of the ADMM
// code path.
SubgradientResult projected_subgradient(const Matrix& weights, const Matrix& linear,
                                        double nuclear_weight, double prox_weight, double mu,
                                        long iterations, const Matrix& x0);

// Douglas-Rachford splitting on the same subproblem, written as the sum of
//   g1(x) = -sum w log x + <linear, x> + (prox_weight/2)||x||^2 + {rows on simplex}
//   g2(x) = nuclear_weight ||x||_*.
// prox of g2 is singular value soft-thresholding (Jacobi SVD); prox of g1 is
// solved row by row with a bisection on the simplex multiplier, each
// coordinate a scalar quadratic with a log term. Handles the nonsmooth
// low-rank optima where subgradient descent stalls; converges linearly and is
// entirely primal, so it shares nothing with the dual ADMM under test.
SubgradientResult douglas_rachford_minimize(const Matrix& weights, const Matrix& linear,
                                            double nuclear_weight, double prox_weight,
                                            long iterations, const Matrix& x0);

// Row-stochastic matrix with independent flat-Dirichlet rows.
Matrix random_stochastic(Index p, std::uint64_t seed);

// Haar-ish random orthogonal matrix (QR of a Gaussian sample).
Matrix random_orthogonal(Index p, std::uint64_t seed);

// Sum of the top-k singular values computed from the eigenvalues of m^T m
// with a self-adjoint eigensolver; independent of the SVD-based code path.
double kyfan_norm_by_gram(const Matrix& m, Index k);

}  // namespace lrmc::oracle
