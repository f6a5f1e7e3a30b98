#include "hsisr/endmembers.h"

#include <cmath>
#include <string>

#include "hsisr/error.h"

namespace hsisr {
namespace {

using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

constexpr double kRankTolerance = 1e-10;
constexpr double kCholeskyConditionLimit = 1e8;

}  // namespace

EndmemberMatrix::EndmemberMatrix(Eigen::MatrixXd spectra)
    : spectra_(std::move(spectra)) {
  if (spectra_.rows() < 1 || spectra_.cols() < 1) {
    throw InvalidArgument("endmember matrix must have at least one row and column");
  }
  if (spectra_.rows() > spectra_.cols()) {
    throw InvalidArgument("endmember count " + std::to_string(spectra_.rows()) +
                          " exceeds band count " +
                          std::to_string(spectra_.cols()));
  }
  if (!spectra_.allFinite()) {
    throw InvalidArgument("endmember matrix contains non-finite values");
  }
  for (Eigen::Index m = 0; m < spectra_.rows(); ++m) {
    if (spectra_.row(m).norm() == 0.0) {
      throw InvalidArgument("endmember row " + std::to_string(m) +
                            " has zero norm");
    }
  }
  pinv_ = pseudo_inverse(spectra_);
}

Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& spectra) {
  const Eigen::Index rows = spectra.rows();
  if (rows < 1 || rows > spectra.cols()) {
    throw InvalidArgument("pseudo_inverse expects a wide or square matrix");
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      spectra, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double largest = sv(0);
  const double smallest = sv(rows - 1);
  if (!(largest > 0.0) || smallest <= kRankTolerance * largest) {
    throw NumericalError("singular endmember matrix: singular values range " +
                         std::to_string(smallest) + " .. " +
                         std::to_string(largest));
  }

  const double gram_condition = (largest * largest) / (smallest * smallest);
  if (gram_condition <= kCholeskyConditionLimit) {
    const Eigen::MatrixXd gram = spectra * spectra.transpose();
    Eigen::LLT<Eigen::MatrixXd> llt(gram);
    if (llt.info() == Eigen::Success) {
      // (S S^T)^-1 S, transposed.
      return llt.solve(spectra).transpose();
    }
  }

  Eigen::VectorXd inv_sv = sv.cwiseInverse();
  return svd.matrixV() * inv_sv.asDiagonal() * svd.matrixU().transpose();
}

SpectralCube reconstruct(const AbundanceMap& abundances,
                         const Eigen::MatrixXd& basis) {
  if (abundances.channels() != basis.rows()) {
    throw InvalidArgument("abundance map has " +
                          std::to_string(abundances.channels()) +
                          " materials but basis has " +
                          std::to_string(basis.rows()) + " rows");
  }
  const auto pixels = static_cast<Eigen::Index>(abundances.pixel_count());
  Eigen::Map<const RowMatrix> a(abundances.data().data(), pixels,
                                abundances.channels());
  SpectralCube out(abundances.height(), abundances.width(),
                   static_cast<int>(basis.cols()));
  Eigen::Map<RowMatrix> y(out.data().data(), pixels, basis.cols());
  y.noalias() = a * basis;
  return out;
}

SpectralCube reconstruct(const AbundanceMap& abundances,
                         const EndmemberMatrix& endmembers) {
  return reconstruct(abundances, endmembers.spectra());
}

}  // namespace hsisr
