#ifndef HSISR_PHANTOM_H_
#define HSISR_PHANTOM_H_

#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

#include "hsisr/degradation.h"
#include "hsisr/endmembers.h"
#include "hsisr/raster.h"

namespace hsisr {

// Synthetic ground truth with known endmembers and abundances.
struct PhantomConfig {
  int height = 64;
  int width = 64;
  int bands = 30;
  int materials = 4;
  int scale = 2;
  std::uint64_t seed = 0;
  void validate() const;
};

struct Phantom {
  SpectralCube hsi_hr;
  SpectralCube hsi_lr;
  AbundanceMap a_hr;
  EndmemberMatrix spectra;
  // (row, col) of the pure pixel reserved for each material.
  std::vector<std::pair<int, int>> pure_pixels;
};

// Smooth spectra: each is 0.05 + 0.95 g / max(g) with g a sum of two or
// three Gaussian bumps over the band index, so values lie in [0.05, 1].
Eigen::MatrixXd phantom_spectra(int materials, int bands, std::uint64_t seed);

// Reserved pixel positions, spread along the main diagonal.
std::vector<std::pair<int, int>> pure_pixel_sites(int height, int width,
                                                  int materials);

// Dirichlet dead-leaves abundances with the reserved pixels set to unit
// vectors, HSI_HR = A S and HSI_LR = degrade(HSI_HR).
Phantom make_phantom(const PhantomConfig& config);

// Writes hsi_hr, hsi_lr, a_hr_gt ({json,raw}) and s_gt.csv into `directory`.
void save_phantom(const Phantom& phantom, const std::filesystem::path& directory);

}  // namespace hsisr

#endif  // HSISR_PHANTOM_H_
