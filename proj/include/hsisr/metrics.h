#ifndef HSISR_METRICS_H_
#define HSISR_METRICS_H_

#include <cstddef>

#include "json.hpp"

#include "hsisr/raster.h"

namespace hsisr {

// X is the reference cube, Y the reconstruction throughout.

// 10 log10(max^2 / MSE) over all H*W*L entries; +inf for a perfect match.
double psnr(const SpectralCube& x, const SpectralCube& y, double max_value = 1.0);

struct SamResult {
  double degrees = 0.0;
  // Pixels where either spectrum has zero norm; they are left out of the mean.
  std::size_t excluded_pixels = 0;
};

// Mean spectral angle in degrees.
SamResult sam(const SpectralCube& x, const SpectralCube& y);

// 100 / scale * sqrt(mean_l (RMSE_l / mu_l)^2), mu_l the band-l mean of Y.
// Throws InvalidArgument naming the band when some mu_l is zero.
double ergas(const SpectralCube& x, const SpectralCube& y, int scale);

struct MetricReport {
  double psnr = 0.0;
  double sam_deg = 0.0;
  double ergas = 0.0;
  int scale = 1;
  std::size_t sam_excluded_pixels = 0;
};

MetricReport evaluate(const SpectralCube& reference, const SpectralCube& test,
                      int scale, double max_value = 1.0);

// {"psnr", "sam_deg", "ergas", "scale", "sam_excluded_pixels"}; an infinite
// PSNR is written as the string "inf".
nlohmann::ordered_json to_json(const MetricReport& report);
MetricReport metric_report_from_json(const nlohmann::ordered_json& j);

}  // namespace hsisr

#endif  // HSISR_METRICS_H_
