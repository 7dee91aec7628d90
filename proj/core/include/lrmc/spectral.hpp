#pragma once

#include "lrmc/markov.hpp"
#include "lrmc/types.hpp"

namespace lrmc {

// Top-k singular triplets: left is m x k, right is n x k, singular_values is
// sorted in decreasing order.
struct SvdFactors {
  Matrix left;
  Vector singular_values;
  Matrix right;
};

SvdFactors svd_truncate(const Matrix& M, Index k);

// Sum of all singular values.
double nuclear_norm(const Matrix& M);

// Sum of the r largest singular values.
double kyfan_norm(const Matrix& M, Index r);

// A subgradient of the Ky Fan norm above: U_r V_r^T from the top-r singular
// triplets.  Satisfies <W, M> = kyfan_norm(M, r) and ||W||_2 <= 1.
Matrix kyfan_subgradient(const Matrix& M, Index r);

// Frobenius projection onto { S : ||S||_2 <= c }: singular values clipped
// at c, singular vectors kept.
Matrix project_spectral_ball(const Matrix& M, double c);

// Frobenius distance between the column spaces of two orthonormal p x r
// frames: sqrt(r - ||Uhat^T U||_F^2), the Frobenius norm of the sine of the
// principal angles.  Invariant under right-multiplication by orthogonal r x r
// matrices.
double sin_theta(const Matrix& U, const Matrix& Uhat);

// Euclidean projection onto the probability simplex.
Vector simplex_project(const Vector& v);

// Projects every row onto the probability simplex.
TransitionMatrix simplex_project_rows(const Matrix& M);

// Number of singular values exceeding rel_tol times the largest one.
Index numerical_rank(const Matrix& M, double rel_tol = 1e-8);

}  // namespace lrmc
