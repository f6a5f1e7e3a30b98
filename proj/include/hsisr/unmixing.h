#ifndef HSISR_UNMIXING_H_
#define HSISR_UNMIXING_H_

#include <cstddef>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "hsisr/endmembers.h"
#include "hsisr/raster.h"

namespace hsisr {

enum class UnmixingBackend { kMinVol, kPca };

// "minvol" | "pca"
UnmixingBackend parse_unmixing_backend(std::string_view name);
std::string_view to_string(UnmixingBackend backend);

inline constexpr int kDefaultMaterials = 6;

// Successive nonnegative projection: starting from an empty set, repeatedly
// add the pixel whose spectrum has the largest residual after a nonnegative
// least-squares projection onto the spectra chosen so far. Ties go to the
// lowest row-major index. Returns the chosen pixel indices in pick order.
//
// Throws NumericalError when M exceeds the band or pixel count, or when every
// remaining residual vanishes before M pixels are found (degenerate cube).
std::vector<std::size_t> select_pure_pixels(const SpectralCube& cube,
                                            int materials);

// Endmember rows are the spectra at select_pure_pixels().
EndmemberMatrix extract_endmembers_minvol(const SpectralCube& cube,
                                          int materials = kDefaultMaterials);

// Unconstrained per-pixel least squares, A(i,j,:) = X(i,j,:) S+.
// No clipping and no sum-to-one renormalization.
AbundanceMap estimate_abundances_ls(const SpectralCube& cube,
                                    const EndmemberMatrix& endmembers);

struct PcaDecomposition {
  Eigen::MatrixXd components;    // M x L, orthonormal rows
  AbundanceMap coefficients;     // h x w x M
  Eigen::VectorXd mean_spectrum; // L

  SpectralCube reconstruct() const;
};

// Projects the mean-centered cube on the top-M eigenvectors of the band
// covariance. Each component's largest-magnitude entry is made positive.
PcaDecomposition decompose_pca(const SpectralCube& cube, int components);

}  // namespace hsisr

#endif  // HSISR_UNMIXING_H_
