#include "lrmc/likelihood.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace lrmc {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

LikelihoodData::LikelihoodData(Matrix w, bool normalize) : weights_(std::move(w)) {
  if (weights_.rows() != weights_.cols() || weights_.rows() < 1)
    throw std::invalid_argument("likelihood weights must be square and nonempty");
  if (!weights_.allFinite() || (weights_.array() < 0.0).any())
    throw std::invalid_argument("likelihood weights must be finite and nonnegative");
  double total = weights_.sum();
  if (total <= 0.0)
    throw std::invalid_argument("likelihood weights must have positive total");
  if (normalize) weights_ /= total;
  support_size_ = (weights_.array() > 0.0).count();
}

LikelihoodData::LikelihoodData(const TransitionCounts& counts)
    : LikelihoodData(counts.counts.cast<double>() /
                         static_cast<double>(counts.total > 0 ? counts.total : 1),
                     false) {
  if (counts.total <= 0)
    throw std::invalid_argument("likelihood data needs at least one transition");
}

LikelihoodData LikelihoodData::from_weights(Matrix w) {
  return LikelihoodData(std::move(w), true);
}

double neg_loglik(const LikelihoodData& data, const Matrix& Q) {
  const Matrix& w = data.weights();
  if (Q.rows() != w.rows() || Q.cols() != w.cols())
    throw std::invalid_argument("neg_loglik: dimension mismatch");
  double value = 0.0;
  for (Index i = 0; i < Q.rows(); ++i) {
    for (Index j = 0; j < Q.cols(); ++j) {
      double wij = w(i, j);
      double q = Q(i, j);
      if (q < 0.0) throw std::invalid_argument("neg_loglik: negative entry in Q");
      if (wij == 0.0) continue;
      if (q == 0.0) return kInf;
      value -= wij * std::log(q);
    }
  }
  return value;
}

double conjugate_value(const LikelihoodData& data, const Matrix& Xi) {
  const Matrix& w = data.weights();
  if (Xi.rows() != w.rows() || Xi.cols() != w.cols())
    throw std::invalid_argument("conjugate_value: dimension mismatch");
  double value = 0.0;
  for (Index i = 0; i < Xi.rows(); ++i) {
    for (Index j = 0; j < Xi.cols(); ++j) {
      double wij = w(i, j);
      double x = Xi(i, j);
      if (wij == 0.0) {
        if (x > 0.0) return kInf;
        continue;
      }
      if (x >= 0.0) return kInf;
      value += wij * (std::log(wij) - 1.0 - std::log(-x));
    }
  }
  return value;
}

double prox_conjugate_entry(double g, double w, double sigma) {
  if (w < 0.0) throw std::invalid_argument("prox_conjugate_entry: w must be >= 0");
  if (sigma <= 0.0)
    throw std::invalid_argument("prox_conjugate_entry: sigma must be positive");
  if (w == 0.0) return g > 0.0 ? g : 0.0;
  // Positive root of sigma x^2 - sigma g x - w = 0, written to avoid
  // cancellation when g is large and negative.
  double disc = std::sqrt(g * g + 4.0 * w / sigma);
  if (g >= 0.0) return (g + disc) / 2.0;
  return (2.0 * w / sigma) / (disc - g);
}

TransitionMatrix empirical_mle(const TransitionCounts& counts) {
  const Index p = counts.size();
  Matrix Q(p, p);
  for (Index i = 0; i < p; ++i) {
    std::int64_t rowsum = counts.row_totals[i];
    if (rowsum > 0) {
      for (Index j = 0; j < p; ++j)
        Q(i, j) = static_cast<double>(counts.counts(i, j)) /
                  static_cast<double>(rowsum);
    } else {
      Q.row(i).setConstant(1.0 / static_cast<double>(p));
    }
  }
  return TransitionMatrix(std::move(Q));
}

}  // namespace lrmc
