#include "hsisr/nnls.h"

#include <algorithm>
#include <limits>
#include <vector>

#include "hsisr/error.h"

namespace hsisr {
namespace {

// Unconstrained least squares restricted to the passive columns.
Eigen::VectorXd solve_passive(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                              const std::vector<bool>& passive) {
  std::vector<Eigen::Index> cols;
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    if (passive[j]) cols.push_back(j);
  }
  Eigen::MatrixXd sub(a.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) sub.col(k) = a.col(cols[k]);
  const Eigen::VectorXd z = sub.colPivHouseholderQr().solve(b);
  Eigen::VectorXd s = Eigen::VectorXd::Zero(a.cols());
  for (std::size_t k = 0; k < cols.size(); ++k) s(cols[k]) = z(k);
  return s;
}

}  // namespace

NnlsResult nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                int max_iterations) {
  if (a.rows() != b.size()) {
    throw InvalidArgument("nnls: matrix rows and right-hand side differ");
  }
  const Eigen::Index n = a.cols();
  if (max_iterations <= 0) max_iterations = static_cast<int>(3 * n);

  const double tol = 10.0 * std::numeric_limits<double>::epsilon() *
                     a.cwiseAbs().colwise().sum().maxCoeff() *
                     static_cast<double>(std::max(a.rows(), n));

  NnlsResult result;
  result.x = Eigen::VectorXd::Zero(n);
  std::vector<bool> passive(n, false);
  Eigen::VectorXd w = a.transpose() * b;

  while (true) {
    Eigen::Index best = -1;
    double best_w = tol;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!passive[j] && w(j) > best_w) {
        best_w = w(j);
        best = j;
      }
    }
    if (best < 0) {
      result.converged = true;
      break;
    }
    if (result.iterations >= max_iterations) break;
    passive[best] = true;

    while (true) {
      ++result.iterations;
      Eigen::VectorXd s = solve_passive(a, b, passive);
      bool feasible = true;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[j] && s(j) <= 0.0) feasible = false;
      }
      if (feasible) {
        result.x = s;
        break;
      }
      double alpha = std::numeric_limits<double>::infinity();
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[j] && s(j) <= 0.0) {
          alpha = std::min(alpha, result.x(j) / (result.x(j) - s(j)));
        }
      }
      result.x += alpha * (s - result.x);
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[j] && result.x(j) <= tol) {
          passive[j] = false;
          result.x(j) = 0.0;
        }
      }
      if (result.iterations >= max_iterations) break;
    }
    w = a.transpose() * (b - a * result.x);
  }
  result.residual_norm = (a * result.x - b).norm();
  return result;
}

}  // namespace hsisr
