#include "hsisr/unmixing.h"

#include <string>

#include "hsisr/error.h"
#include "hsisr/nnls.h"

namespace hsisr {
namespace {

using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Residuals below this fraction of the largest pixel norm count as zero.
constexpr double kDegenerateResidual = 1e-12;

Eigen::Map<const RowMatrix> pixel_matrix(const SpectralCube& cube) {
  return {cube.data().data(), static_cast<Eigen::Index>(cube.pixel_count()),
          cube.channels()};
}

}  // namespace

UnmixingBackend parse_unmixing_backend(std::string_view name) {
  if (name == "minvol") return UnmixingBackend::kMinVol;
  if (name == "pca") return UnmixingBackend::kPca;
  throw InvalidArgument("unknown unmixing backend \"" + std::string(name) +
                        "\" (expected minvol or pca)");
}

std::string_view to_string(UnmixingBackend backend) {
  return backend == UnmixingBackend::kMinVol ? "minvol" : "pca";
}

std::vector<std::size_t> select_pure_pixels(const SpectralCube& cube,
                                            int materials) {
  if (materials < 1) throw InvalidArgument("number of materials must be >= 1");
  if (materials > cube.channels()) {
    throw NumericalError("extraction failure: " + std::to_string(materials) +
                         " materials requested but the cube has only " +
                         std::to_string(cube.channels()) + " bands");
  }
  if (static_cast<std::size_t>(materials) > cube.pixel_count()) {
    throw NumericalError("extraction failure: more materials than pixels");
  }

  const auto x = pixel_matrix(cube);
  const Eigen::Index pixels = x.rows();
  const Eigen::Index bands = x.cols();
  const double scale = x.rowwise().norm().maxCoeff();
  if (!(scale > 0.0)) {
    throw NumericalError("extraction failure: every pixel spectrum is zero");
  }

  std::vector<std::size_t> picked;
  Eigen::MatrixXd basis(bands, 0);
  const int max_iterations = 50 * materials;
  for (int k = 0; k < materials; ++k) {
    double best = -1.0;
    Eigen::Index best_pixel = -1;
    for (Eigen::Index p = 0; p < pixels; ++p) {
      const Eigen::VectorXd spectrum = x.row(p).transpose();
      double residual;
      if (k == 0) {
        residual = spectrum.norm();
      } else {
        residual = nnls(basis, spectrum, max_iterations).residual_norm;
      }
      if (residual > best) {
        best = residual;
        best_pixel = p;
      }
    }
    if (best <= kDegenerateResidual * scale) {
      throw NumericalError(
          "extraction failure: only " + std::to_string(k) +
          " linearly distinct spectra found, " + std::to_string(materials) +
          " requested");
    }
    picked.push_back(static_cast<std::size_t>(best_pixel));
    basis.conservativeResize(bands, k + 1);
    basis.col(k) = x.row(best_pixel).transpose();
  }
  return picked;
}

EndmemberMatrix extract_endmembers_minvol(const SpectralCube& cube,
                                          int materials) {
  const std::vector<std::size_t> picked = select_pure_pixels(cube, materials);
  const auto x = pixel_matrix(cube);
  Eigen::MatrixXd spectra(materials, cube.channels());
  for (int m = 0; m < materials; ++m) {
    spectra.row(m) = x.row(static_cast<Eigen::Index>(picked[m]));
  }
  return EndmemberMatrix(std::move(spectra));
}

AbundanceMap estimate_abundances_ls(const SpectralCube& cube,
                                    const EndmemberMatrix& endmembers) {
  if (cube.channels() != endmembers.bands()) {
    throw InvalidArgument("cube has " + std::to_string(cube.channels()) +
                          " bands but endmembers have " +
                          std::to_string(endmembers.bands()));
  }
  const auto x = pixel_matrix(cube);
  AbundanceMap out(cube.height(), cube.width(), endmembers.materials());
  Eigen::Map<RowMatrix> a(out.data().data(), x.rows(), endmembers.materials());
  a.noalias() = x * endmembers.pinv();
  return out;
}

SpectralCube PcaDecomposition::reconstruct() const {
  SpectralCube out = hsisr::reconstruct(coefficients, components);
  for (std::size_t p = 0; p < out.pixel_count(); ++p) {
    auto px = out.pixel(p);
    for (std::size_t l = 0; l < px.size(); ++l) px[l] += mean_spectrum(l);
  }
  return out;
}

PcaDecomposition decompose_pca(const SpectralCube& cube, int components) {
  if (components < 1 || components > cube.channels()) {
    throw InvalidArgument("PCA needs 1 <= M <= L, got M=" +
                          std::to_string(components) + ", L=" +
                          std::to_string(cube.channels()));
  }
  const auto x = pixel_matrix(cube);
  PcaDecomposition out;
  out.mean_spectrum = x.colwise().mean().transpose();
  const Eigen::MatrixXd centered = x.rowwise() - out.mean_spectrum.transpose();
  const Eigen::MatrixXd cov =
      centered.transpose() * centered / static_cast<double>(x.rows());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  const Eigen::Index bands = cov.rows();
  out.components.resize(components, bands);
  for (int k = 0; k < components; ++k) {
    // Eigenvalues come out ascending.
    Eigen::VectorXd v = eig.eigenvectors().col(bands - 1 - k);
    Eigen::Index arg;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0) v = -v;
    out.components.row(k) = v.transpose();
  }

  out.coefficients = AbundanceMap(cube.height(), cube.width(), components);
  Eigen::Map<RowMatrix> coeff(out.coefficients.data().data(), x.rows(),
                              components);
  coeff.noalias() = centered * out.components.transpose();
  return out;
}

}  // namespace hsisr
