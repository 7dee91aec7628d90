#include "lrmc/spectral.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace lrmc {

namespace {

Eigen::BDCSVD<Matrix> full_svd(const Matrix& M, unsigned options) {
  if (M.size() == 0) throw std::invalid_argument("svd of an empty matrix");
  if (!M.allFinite()) throw std::invalid_argument("svd of a non-finite matrix");
  return Eigen::BDCSVD<Matrix>(M, options);
}

void check_orthonormal(const Matrix& U, const char* who) {
  if (U.rows() < U.cols() || U.cols() < 1)
    throw std::invalid_argument(std::string(who) + ": frame must be tall");
  Matrix gram = U.transpose() * U;
  double err = (gram - Matrix::Identity(U.cols(), U.cols()))
                   .cwiseAbs()
                   .maxCoeff();
  if (err > 1e-8)
    throw std::invalid_argument(std::string(who) +
                                ": columns are not orthonormal");
}

}  // namespace

SvdFactors svd_truncate(const Matrix& M, Index k) {
  if (k < 1 || k > std::min(M.rows(), M.cols()))
    throw std::invalid_argument("svd_truncate: k out of range");
  auto svd = full_svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  SvdFactors f;
  f.left = svd.matrixU().leftCols(k);
  f.singular_values = svd.singularValues().head(k);
  f.right = svd.matrixV().leftCols(k);
  return f;
}

double nuclear_norm(const Matrix& M) {
  return full_svd(M, 0).singularValues().sum();
}

double kyfan_norm(const Matrix& M, Index r) {
  if (r < 1 || r > std::min(M.rows(), M.cols()))
    throw std::invalid_argument("kyfan_norm: r out of range");
  return full_svd(M, 0).singularValues().head(r).sum();
}

Matrix kyfan_subgradient(const Matrix& M, Index r) {
  SvdFactors f = svd_truncate(M, r);
  return f.left * f.right.transpose();
}

Matrix project_spectral_ball(const Matrix& M, double c) {
  if (c < 0.0)
    throw std::invalid_argument("project_spectral_ball: c must be >= 0");
  auto svd = full_svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Vector s = svd.singularValues();
  if (s.size() == 0 || s[0] <= c) return M;  // already inside the ball
  s = s.cwiseMin(c);
  return svd.matrixU() * s.asDiagonal() * svd.matrixV().transpose();
}

double sin_theta(const Matrix& U, const Matrix& Uhat) {
  if (U.rows() != Uhat.rows() || U.cols() != Uhat.cols())
    throw std::invalid_argument("sin_theta: frames must have equal shape");
  check_orthonormal(U, "sin_theta");
  check_orthonormal(Uhat, "sin_theta");
  double overlap = (Uhat.transpose() * U).squaredNorm();
  double arg = static_cast<double>(U.cols()) - overlap;
  return std::sqrt(std::max(arg, 0.0));  // overlap can exceed r by rounding
}

Vector simplex_project(const Vector& v) {
  if (v.size() < 1) throw std::invalid_argument("simplex_project: empty vector");
  if (!v.allFinite())
    throw std::invalid_argument("simplex_project: non-finite entries");
  std::vector<double> u(v.data(), v.data() + v.size());
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cum = 0.0, tau = 0.0;
  Index rho = 0;
  for (Index j = 0; j < static_cast<Index>(u.size()); ++j) {
    cum += u[static_cast<std::size_t>(j)];
    double t = (cum - 1.0) / static_cast<double>(j + 1);
    if (u[static_cast<std::size_t>(j)] - t > 0.0) {
      rho = j + 1;
      tau = t;
    }
  }
  (void)rho;
  return (v.array() - tau).max(0.0);
}

TransitionMatrix simplex_project_rows(const Matrix& M) {
  Matrix out(M.rows(), M.cols());
  for (Index i = 0; i < M.rows(); ++i)
    out.row(i) = simplex_project(M.row(i).transpose()).transpose();
  return TransitionMatrix(std::move(out));
}

Index numerical_rank(const Matrix& M, double rel_tol) {
  Vector s = full_svd(M, 0).singularValues();
  if (s.size() == 0 || s[0] <= 0.0) return 0;
  return (s.array() > rel_tol * s[0]).count();
}

}  // namespace lrmc
