#ifndef HSISR_NNLS_H_
#define HSISR_NNLS_H_

#include <Eigen/Dense>

namespace hsisr {

struct NnlsResult {
  Eigen::VectorXd x;
  double residual_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

// min ||A x - b||_2 subject to x >= 0, Lawson-Hanson active set.
// max_iterations <= 0 selects 3 * cols.
NnlsResult nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                int max_iterations = 0);

}  // namespace hsisr

#endif  // HSISR_NNLS_H_
