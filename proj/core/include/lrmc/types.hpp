#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace lrmc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using CountMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;
using Index = Eigen::Index;

// An iterative routine ran out of budget or hit an ill-posed instance, as
// opposed to a malformed input (std::invalid_argument).
class ConvergenceError : public std::runtime_error {
 public:
  explicit ConvergenceError(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace lrmc
