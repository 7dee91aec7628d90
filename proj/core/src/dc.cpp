#include "lrmc/dc.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "lrmc/spectral.hpp"

namespace lrmc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kStartFloor = 1e-8;
constexpr double kRankTol = 1e-8;

void check_problem(const PenalizedProblem& prob) {
  if (prob.penalty_weight <= 0.0)
    throw std::invalid_argument("penalized problem: penalty weight must be positive");
  if (prob.prox_weight < 0.0)
    throw std::invalid_argument("penalized problem: prox weight must be nonnegative");
  if (prob.target_rank < 1 || prob.target_rank > prob.data.size())
    throw std::invalid_argument("penalized problem: target rank out of range");
}

// One SVD worth of facts about a DC iterate.
struct IterateSpectrum {
  Matrix subgradient;  // U_r V_r^T
  double penalty;      // ||X||_* - ||X||_(r)
  Index rank;
};

IterateSpectrum analyze(const Matrix& X, Index r) {
  Eigen::BDCSVD<Matrix> svd(X, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  IterateSpectrum out;
  out.subgradient =
      svd.matrixU().leftCols(r) * svd.matrixV().leftCols(r).transpose();
  out.penalty = s.sum() - s.head(r).sum();
  out.rank = (s.size() > 0 && s[0] > 0.0)
                 ? static_cast<Index>((s.array() > kRankTol * s[0]).count())
                 : 0;
  return out;
}

// Validates the start and renormalizes row sums that are off by solver dust;
// inner solves meet the row constraint only to their tolerance, so chaining
// pdc_solve calls (as the continuation does) hands in slightly off rows.
void sanitize_start(const PenalizedProblem& prob, Matrix& X0) {
  const Index p = prob.data.size();
  if (X0.rows() != p || X0.cols() != p)
    throw std::invalid_argument("pdc_solve: X0 has wrong shape");
  if (!X0.allFinite() || (X0.array() < 0.0).any())
    throw std::invalid_argument("pdc_solve: X0 must be nonnegative");
  for (Index i = 0; i < p; ++i) {
    const double sum = X0.row(i).sum();
    if (std::abs(sum - 1.0) > 1e-3)
      throw std::invalid_argument("pdc_solve: X0 rows must sum to 1 within 1e-3");
    X0.row(i) /= sum;
    for (Index j = 0; j < p; ++j)
      if (prob.data.in_support(i, j) && X0(i, j) <= 0.0)
        throw std::invalid_argument(
            "pdc_solve: X0 must be strictly positive on the support");
  }
}

}  // namespace

double penalized_objective(const PenalizedProblem& prob, const Matrix& X) {
  check_problem(prob);
  const Index p = prob.data.size();
  if (X.rows() != p || X.cols() != p)
    throw std::invalid_argument("penalized_objective: X has wrong shape");
  if (!X.allFinite() || (X.array() < 0.0).any()) return kInf;
  double loss = neg_loglik(prob.data, X);
  if (!std::isfinite(loss)) return loss;
  double penalty = nuclear_norm(X) - kyfan_norm(X, prob.target_rank);
  return loss + prob.penalty_weight * penalty;
}

DcResult pdc_solve(const PenalizedProblem& prob, const Matrix& X0,
                   const DcOptions& opts,
                   const std::optional<DualState>& warm) {
  check_problem(prob);
  if (opts.max_iterations < 1)
    throw std::invalid_argument("pdc_solve: needs at least one iteration");

  const double c = prob.penalty_weight;
  const double alpha = prob.prox_weight;

  Matrix X = X0;
  sanitize_start(prob, X);
  // Default step tolerance: sqrt(p) rows each resolved to the inner solver's
  // accuracy.  A p-independent tolerance would demand per-entry accuracy the
  // inner solves cannot deliver at larger p.
  const double eta =
      opts.step_tol > 0.0
          ? opts.step_tol
          : opts.inner.tol * std::sqrt(static_cast<double>(prob.data.size())) *
                (1.0 + X.norm());

  IterateSpectrum spectrum = analyze(X, prob.target_rank);
  std::optional<DualState> inner_state = warm;
  if (inner_state) inner_state->X = X;

  DcResult result;
  result.report.termination = "iteration_cap";
  for (Index k = 1; k <= opts.max_iterations; ++k) {
    SubproblemSpec sub{prob.data, -(c * spectrum.subgradient), c, alpha};
    if (alpha > 0.0) sub.linear_term -= alpha * X;
    if (!inner_state)
      inner_state = DualState::from_primal(X, opts.inner.sigma0);

    SubproblemSolution sol = solve_subproblem(sub, inner_state, opts.inner);
    inner_state = sol.state;
    // The inner solver meets the row-sum constraint only to its tolerance, so
    // returned iterates can carry dust below zero; drop it before evaluating.
    Matrix Xnext = sol.X.cwiseMax(0.0);
    double step = (Xnext - X).norm();
    X = std::move(Xnext);
    spectrum = analyze(X, prob.target_rank);
    double objective =
        neg_loglik(prob.data, X) + prob.penalty_weight * spectrum.penalty;
    result.report.history.push_back({k, 0, objective, step, spectrum.rank,
                                     sol.report.iterations,
                                     sol.report.converged});
    if (step <= eta) {
      result.report.converged = true;
      result.report.termination = "step_tolerance";
      break;
    }
  }
  result.X = std::move(X);
  result.state = std::move(*inner_state);
  return result;
}

ContinuationResult penalty_continuation(const LikelihoodData& data,
                                        Index target_rank, double prox_weight,
                                        const ContinuationSchedule& schedule,
                                        const DcOptions& opts) {
  if (schedule.growth <= 1.0)
    throw std::invalid_argument("penalty_continuation: growth must exceed 1");
  if (schedule.max_stages < 1)
    throw std::invalid_argument("penalty_continuation: needs at least one stage");

  double c = schedule.c0 > 0.0 ? schedule.c0 : default_c0(data);
  ContinuationResult result;
  result.X = dc_default_start(data);
  std::optional<DualState> carried;

  // The penalty vanishes exactly at the target rank only in exact arithmetic;
  // the inner solver leaves trailing singular values at its own noise level,
  // so the stop rule counts rank at a tolerance matched to that accuracy.
  const double feas_tol = std::max(kRankTol, 10.0 * opts.inner.tol);

  for (Index s = 0; s < schedule.max_stages; ++s) {
    PenalizedProblem prob{data, c, prox_weight, target_rank};
    DcResult stage = pdc_solve(prob, result.X, opts, carried);
    for (DcIterate it : stage.report.history) {
      it.stage = s;
      result.trace.history.push_back(it);
    }
    result.trace.converged = stage.report.converged;
    result.trace.termination = stage.report.termination;
    result.X = stage.X;
    carried = std::move(stage.state);
    result.stages_run = s + 1;
    result.final_c = c;
    if (numerical_rank(result.X, feas_tol) <= target_rank) {
      result.rank_feasible = true;
      break;
    }
    c *= schedule.growth;
  }
  return result;
}

Matrix dc_default_start(const LikelihoodData& data) {
  const Index p = data.size();
  Matrix X(p, p);
  const Matrix& w = data.weights();
  for (Index i = 0; i < p; ++i) {
    double rowsum = w.row(i).sum();
    if (rowsum > 0.0)
      X.row(i) = w.row(i) / rowsum;
    else
      X.row(i).setConstant(1.0 / static_cast<double>(p));
  }
  X = X.cwiseMax(kStartFloor);
  for (Index i = 0; i < p; ++i) X.row(i) /= X.row(i).sum();
  return X;
}

double default_c0(const LikelihoodData& data) {
  return 0.1 * static_cast<double>(data.size()) * data.weights().maxCoeff();
}

double stationarity_gap(const PenalizedProblem& prob, const Matrix& X,
                        const DcOptions& opts) {
  DcOptions one_step = opts;
  one_step.max_iterations = 1;
  one_step.step_tol = std::numeric_limits<double>::min();
  DcResult res = pdc_solve(prob, X, one_step);
  return res.report.history.front().step_norm;
}

}  // namespace lrmc
