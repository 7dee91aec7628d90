#pragma once

#include "lrmc/markov.hpp"
#include "lrmc/types.hpp"

namespace lrmc {

// Normalized transition frequencies w_ij = n_ij / n and their support
// Omega = { (i,j) : w_ij > 0 }.  This is the data entering the sample loss
//   L(Q) = -sum_ij w_ij log Q_ij,
// its convex conjugate, and the solvers downstream.
class LikelihoodData {
 public:
  explicit LikelihoodData(const TransitionCounts& counts);

  // Test entry point: accepts any nonnegative weight matrix with positive sum
  // and normalizes it to total 1.
  static LikelihoodData from_weights(Matrix w);

  Index size() const { return weights_.rows(); }
  const Matrix& weights() const { return weights_; }
  bool in_support(Index i, Index j) const { return weights_(i, j) > 0.0; }
  Index support_size() const { return support_size_; }

 private:
  explicit LikelihoodData(Matrix w, bool normalize);

  Matrix weights_;
  Index support_size_ = 0;
};

// Sample negative log-likelihood -sum_Omega w_ij log Q_ij.  Q must be
// entrywise nonnegative; a zero on the support gives +infinity.
double neg_loglik(const LikelihoodData& data, const Matrix& Q);

// Convex conjugate of the loss above:
//   sum_Omega w_ij (log w_ij - 1 - log(-Xi_ij))   if Xi < 0 on Omega and
//                                                    Xi <= 0 off Omega,
//   +infinity otherwise.
double conjugate_value(const LikelihoodData& data, const Matrix& Xi);

// Closed-form minimizer of  -w log(xi) + (sigma/2) (xi - g)^2  over xi >= 0:
// the positive root (g + sqrt(g^2 + 4 w / sigma)) / 2 for w > 0, and the
// projection max(g, 0) for w = 0.
double prox_conjugate_entry(double g, double w, double sigma);

// Row-normalized counts; rows with no observations fall back to uniform.
TransitionMatrix empirical_mle(const TransitionCounts& counts);

}  // namespace lrmc
