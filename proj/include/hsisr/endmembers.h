#ifndef HSISR_ENDMEMBERS_H_
#define HSISR_ENDMEMBERS_H_

#include <Eigen/Dense>

#include "hsisr/raster.h"

namespace hsisr {

// M pure-material spectra (rows, length L) and their cached L x M
// Moore-Penrose pseudo-inverse. Construction rejects zero rows, M > L and
// numerically rank-deficient matrices.
class EndmemberMatrix {
 public:
  explicit EndmemberMatrix(Eigen::MatrixXd spectra);

  int materials() const { return static_cast<int>(spectra_.rows()); }
  int bands() const { return static_cast<int>(spectra_.cols()); }

  const Eigen::MatrixXd& spectra() const { return spectra_; }
  const Eigen::MatrixXd& pinv() const { return pinv_; }

 private:
  Eigen::MatrixXd spectra_;
  Eigen::MatrixXd pinv_;
};

// Pseudo-inverse of a full-row-rank M x L matrix, S+ = S^T (S S^T)^-1.
// Uses a Cholesky solve of the normal equations unless cond(S S^T) exceeds
// 1e8, in which case it switches to an SVD. Throws NumericalError when the
// smallest singular value is below 1e-10 times the largest.
Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& spectra);

// Linear mixing: out(i,j,l) = sum_m A(i,j,m) S(m,l).
SpectralCube reconstruct(const AbundanceMap& abundances,
                         const EndmemberMatrix& endmembers);

// Same product against an arbitrary M x L basis (PCA components, for one).
SpectralCube reconstruct(const AbundanceMap& abundances,
                         const Eigen::MatrixXd& basis);

}  // namespace hsisr

#endif  // HSISR_ENDMEMBERS_H_
