#include "lrmc/metrics.hpp"

#include <cmath>
#include <stdexcept>

#include "lrmc/spectral.hpp"

namespace lrmc {

namespace {
constexpr double kKlFloor = 1e-12;

void check_same_size(Index a, Index b, const char* who) {
  if (a != b) throw std::invalid_argument(std::string(who) + ": size mismatch");
}
}  // namespace

KlDetail kl_divergence_detail(const TransitionMatrix& P,
                              const StationaryDistribution& mu,
                              const TransitionMatrix& Q) {
  check_same_size(P.size(), Q.size(), "kl_divergence");
  check_same_size(P.size(), mu.size(), "kl_divergence");
  KlDetail out;
  for (Index i = 0; i < P.size(); ++i) {
    double row = 0.0;
    for (Index j = 0; j < P.size(); ++j) {
      double pij = P(i, j);
      if (pij <= 0.0) continue;
      double qij = Q(i, j);
      if (qij < kKlFloor) {
        qij = kKlFloor;
        ++out.clipped;
      }
      row += pij * std::log(pij / qij);
    }
    out.value += mu[i] * row;
  }
  return out;
}

double kl_divergence(const TransitionMatrix& P, const StationaryDistribution& mu,
                     const TransitionMatrix& Q) {
  return kl_divergence_detail(P, mu, Q).value;
}

double l2_row_risk(const TransitionMatrix& P, const TransitionMatrix& Q) {
  check_same_size(P.size(), Q.size(), "l2_row_risk");
  return (P.entries() - Q.entries()).squaredNorm();
}

EtaMetrics eta_metrics(const TransitionMatrix& P, const TransitionMatrix& Phat,
                       Index r) {
  check_same_size(P.size(), Phat.size(), "eta_metrics");
  if (r < 1 || r > P.size())
    throw std::invalid_argument("eta_metrics: r out of range");
  EtaMetrics out;
  out.eta_f = (P.entries() - Phat.entries()).norm() /
              std::sqrt(static_cast<double>(P.size()));
  SvdFactors truth = svd_truncate(P.entries(), r);
  SvdFactors est = svd_truncate(Phat.entries(), r);
  out.eta_u = sin_theta(truth.left, est.left);
  out.eta_v = sin_theta(truth.right, est.right);
  return out;
}

EvalResult evaluate_estimate(const TransitionMatrix& P,
                             const StationaryDistribution& mu,
                             const TransitionMatrix& Phat, Index r) {
  EvalResult out;
  KlDetail kl = kl_divergence_detail(P, mu, Phat);
  EtaMetrics eta = eta_metrics(P, Phat, r);
  out.kl = kl.value;
  out.kl_clipped = kl.clipped;
  out.l2_risk = l2_row_risk(P, Phat);
  out.eta_f = eta.eta_f;
  out.eta_u = eta.eta_u;
  out.eta_v = eta.eta_v;
  return out;
}

}  // namespace lrmc
