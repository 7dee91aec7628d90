#include "lrmc/admm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "lrmc/spectral.hpp"

namespace lrmc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kMaxStep = (1.0 + std::sqrt(5.0)) / 2.0;

void check_spec(const SubproblemSpec& spec) {
  const Index p = spec.data.size();
  if (spec.linear_term.rows() != p || spec.linear_term.cols() != p)
    throw std::invalid_argument("subproblem: linear term has wrong shape");
  if (!spec.linear_term.allFinite())
    throw std::invalid_argument("subproblem: linear term is not finite");
  if (spec.nuclear_weight <= 0.0)
    throw std::invalid_argument("subproblem: nuclear weight must be positive");
  if (spec.prox_weight < 0.0)
    throw std::invalid_argument("subproblem: prox weight must be nonnegative");
}

void check_state(const DualState& state, Index p) {
  auto shaped = [p](const Matrix& M) { return M.rows() == p && M.cols() == p; };
  if (!shaped(state.Xi) || !shaped(state.S) || !shaped(state.Z) ||
      !shaped(state.X) || state.y.size() != p)
    throw std::invalid_argument("dual state has wrong shape");
  if (state.sigma <= 0.0)
    throw std::invalid_argument("dual state: sigma must be positive");
}

// Constraint residual of the dual: Xi + y 1^T + S + alpha Z - W.
Matrix dual_residual(const DualState& state, const SubproblemSpec& spec) {
  Matrix R = state.Xi + state.S - spec.linear_term;
  if (spec.prox_weight > 0.0) R += spec.prox_weight * state.Z;
  R.colwise() += state.y;
  return R;
}

}  // namespace

DualState DualState::initial(Index p, double sigma0) {
  return from_primal(Matrix::Constant(p, p, 1.0 / static_cast<double>(p)),
                     sigma0);
}

DualState DualState::from_primal(Matrix X0, double sigma0) {
  if (X0.rows() != X0.cols() || X0.rows() < 1)
    throw std::invalid_argument("dual state: X0 must be square");
  if (sigma0 <= 0.0)
    throw std::invalid_argument("dual state: sigma0 must be positive");
  DualState s;
  const Index p = X0.rows();
  s.Xi = Matrix::Zero(p, p);
  s.S = Matrix::Zero(p, p);
  s.Z = Matrix::Zero(p, p);
  s.X = std::move(X0);
  s.y = Vector::Zero(p);
  s.sigma = sigma0;
  return s;
}

double KktResiduals::max() const {
  return std::max({primal_feas, dual_feas, gap_proxy});
}

Vector update_y(const DualState& state, const SubproblemSpec& spec) {
  check_spec(spec);
  const Index p = spec.data.size();
  check_state(state, p);
  // Stationarity in y:  -1 + sigma (p y + A(Xi + S + alpha Z - W + X/sigma)) = 0
  // with A(M) = M 1; A A* = p I makes this a scalar solve per row.
  Matrix M = spec.linear_term - state.Xi - state.S - state.X / state.sigma;
  if (spec.prox_weight > 0.0) M -= spec.prox_weight * state.Z;
  Vector y = M.rowwise().sum();
  y.array() += 1.0 / state.sigma;
  return y / static_cast<double>(p);
}

Matrix update_xi(const DualState& state, const SubproblemSpec& spec) {
  check_spec(spec);
  const Index p = spec.data.size();
  check_state(state, p);
  Matrix G = spec.linear_term - state.S - state.X / state.sigma;
  if (spec.prox_weight > 0.0) G -= spec.prox_weight * state.Z;
  G.colwise() -= state.y;
  const Matrix& w = spec.data.weights();
  Matrix Xi(p, p);
  for (Index i = 0; i < p; ++i)
    for (Index j = 0; j < p; ++j)
      Xi(i, j) = prox_conjugate_entry(G(i, j), w(i, j), state.sigma);
  return Xi;
}

Matrix update_z(const DualState& state, const SubproblemSpec& spec) {
  check_spec(spec);
  const Index p = spec.data.size();
  check_state(state, p);
  if (spec.prox_weight <= 0.0)
    throw std::invalid_argument("update_z: prox weight is zero, Z is unused");
  Matrix R = state.Xi + state.S - spec.linear_term + state.X / state.sigma;
  R.colwise() += state.y;
  return -(state.sigma / (1.0 + state.sigma * spec.prox_weight)) * R;
}

Matrix update_s(const DualState& state, const SubproblemSpec& spec) {
  check_spec(spec);
  const Index p = spec.data.size();
  check_state(state, p);
  Matrix R = state.Xi - spec.linear_term + state.X / state.sigma;
  if (spec.prox_weight > 0.0) R += spec.prox_weight * state.Z;
  R.colwise() += state.y;
  return project_spectral_ball(-R, spec.nuclear_weight);
}

KktResiduals kkt_residuals(const DualState& state, const SubproblemSpec& spec,
                           const Matrix* prev_x) {
  check_spec(spec);
  const Index p = spec.data.size();
  check_state(state, p);
  KktResiduals r;
  Vector rowsum = state.X.rowwise().sum();
  r.primal_feas = (rowsum.array() - 1.0).matrix().norm() /
                  (1.0 + std::sqrt(static_cast<double>(p)));
  r.dual_feas = dual_residual(state, spec).norm() /
                (1.0 + spec.linear_term.norm());
  if (prev_x != nullptr)
    r.gap_proxy = (state.X - *prev_x).norm() / (1.0 + prev_x->norm());
  return r;
}

double augmented_lagrangian(const DualState& state, const SubproblemSpec& spec) {
  double value = dual_objective(state, spec);
  if (!std::isfinite(value)) return value;
  Matrix R = dual_residual(state, spec) + state.X / state.sigma;
  value += 0.5 * state.sigma * R.squaredNorm();
  value -= state.X.squaredNorm() / (2.0 * state.sigma);
  return value;
}

double dual_objective(const DualState& state, const SubproblemSpec& spec) {
  check_spec(spec);
  check_state(state, spec.data.size());
  double value = conjugate_value(spec.data, -state.Xi) - state.y.sum();
  if (spec.prox_weight > 0.0)
    value += 0.5 * spec.prox_weight * state.Z.squaredNorm();
  return value;
}

double primal_objective(const SubproblemSpec& spec, const Matrix& X) {
  check_spec(spec);
  if ((X.array() < 0.0).any()) return kInf;
  double value = neg_loglik(spec.data, X);
  if (!std::isfinite(value)) return value;
  value += spec.linear_term.cwiseProduct(X).sum();
  value += spec.nuclear_weight * nuclear_norm(X);
  if (spec.prox_weight > 0.0)
    value += 0.5 * spec.prox_weight * X.squaredNorm();
  return value;
}

SubproblemSolution solve_subproblem(const SubproblemSpec& spec,
                                    const std::optional<DualState>& warm,
                                    const AdmmOptions& opts) {
  check_spec(spec);
  const Index p = spec.data.size();
  if (opts.step_length <= 0.0 || opts.step_length >= kMaxStep)
    throw std::invalid_argument(
        "solve_subproblem: step length must lie in (0, (1+sqrt 5)/2)");
  if (opts.tol <= 0.0)
    throw std::invalid_argument("solve_subproblem: tol must be positive");
  if (opts.max_iterations < 0)
    throw std::invalid_argument("solve_subproblem: negative iteration cap");
  if (opts.sigma0 <= 0.0)
    throw std::invalid_argument("solve_subproblem: sigma0 must be positive");

  DualState state = warm ? *warm : DualState::initial(p, opts.sigma0);
  check_state(state, p);
  const bool with_z = spec.prox_weight > 0.0;
  if (!with_z) state.Z.setZero();

  SolverReport report;
  report.termination = "iteration_cap";
  // Penalty rebalancing stops near the end of the budget so the multiplier
  // sequence settles under a fixed sigma.
  const Index freeze_after =
      static_cast<Index>(0.8 * static_cast<double>(opts.max_iterations));
  Matrix prev_x = state.X;

  for (Index it = 1; it <= opts.max_iterations; ++it) {
    prev_x = state.X;
    state.y = update_y(state, spec);
    state.Xi = update_xi(state, spec);
    if (opts.sweep == SweepOrder::symmetric_gs)
      state.y = update_y(state, spec);
    if (with_z) state.Z = update_z(state, spec);
    state.S = update_s(state, spec);
    if (with_z && opts.sweep == SweepOrder::symmetric_gs)
      state.Z = update_z(state, spec);
    state.X += (opts.step_length * state.sigma) * dual_residual(state, spec);

    KktResiduals res = kkt_residuals(state, spec, &prev_x);
    report.iterations = it;
    report.final_residuals = res;
    if (opts.record_history)
      report.history.push_back({it, augmented_lagrangian(state, spec),
                                res.primal_feas, res.dual_feas, state.sigma});
    if (res.max() <= opts.tol) {
      report.converged = true;
      report.termination = "kkt_tolerance";
      break;
    }
    if (opts.adapt_sigma && it < freeze_after) {
      if (std::max(res.primal_feas, res.dual_feas) <= 0.1 * opts.tol) {
        // Feasibility has settled; the multiplier step gamma sigma R is the
        // only thing still moving X, and its noise floor scales with sigma.
        if (res.gap_proxy > opts.tol) state.sigma /= 1.3;
      } else if (res.dual_feas > 10.0 * res.primal_feas) {
        state.sigma *= 1.3;
      } else if (res.primal_feas > 10.0 * res.dual_feas) {
        state.sigma /= 1.3;
      }
    }
  }
  if (opts.max_iterations == 0)
    report.final_residuals = kkt_residuals(state, spec, &state.X);

  SubproblemSolution out;
  out.X = state.X;
  out.state = std::move(state);
  out.report = std::move(report);
  return out;
}

}  // namespace lrmc
