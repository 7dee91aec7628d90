#pragma once

#include "lrmc/markov.hpp"
#include "lrmc/types.hpp"

namespace lrmc {

struct KlDetail {
  double value = 0.0;
  Index clipped = 0;  // entries of Q that hit the 1e-12 floor with P_ij > 0
};

// Stationary-weighted Kullback-Leibler divergence between row distributions:
//   sum_i mu_i sum_j P_ij log(P_ij / max(Q_ij, 1e-12)),
// with P_ij = 0 terms contributing zero.
KlDetail kl_divergence_detail(const TransitionMatrix& P,
                              const StationaryDistribution& mu,
                              const TransitionMatrix& Q);
double kl_divergence(const TransitionMatrix& P, const StationaryDistribution& mu,
                     const TransitionMatrix& Q);

// Total squared l2 distance between rows, sum_i ||P_i. - Q_i.||_2^2, which
// equals the squared Frobenius distance.
double l2_row_risk(const TransitionMatrix& P, const TransitionMatrix& Q);

// Normalized estimation errors: eta_f = ||P - Phat||_F / sqrt(p); eta_u and
// eta_v are the sin-theta distances between the rank-r left (right) singular
// subspaces of P and Phat.
struct EtaMetrics {
  double eta_f = 0.0;
  double eta_u = 0.0;
  double eta_v = 0.0;
};
EtaMetrics eta_metrics(const TransitionMatrix& P, const TransitionMatrix& Phat,
                       Index r);

struct EvalResult {
  double kl = 0.0;
  double l2_risk = 0.0;
  double eta_f = 0.0;
  double eta_u = 0.0;
  double eta_v = 0.0;
  Index kl_clipped = 0;
};

EvalResult evaluate_estimate(const TransitionMatrix& P,
                             const StationaryDistribution& mu,
                             const TransitionMatrix& Phat, Index r);

}  // namespace lrmc
