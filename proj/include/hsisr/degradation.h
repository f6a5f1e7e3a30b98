#ifndef HSISR_DEGRADATION_H_
#define HSISR_DEGRADATION_H_

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "hsisr/raster.h"

namespace hsisr {

// Point spread function of the simulated sensor: Gaussian blur followed by
// bicubic decimation by `scale`.
struct DegradationSpec {
  int scale = 2;
  double blur_sigma = 2.0;

  // sigma defaults to the scale factor (sigma = 2, 3, 4 for x2, x3, x4).
  static DegradationSpec for_scale(int scale,
                                   std::optional<double> sigma = std::nullopt);

  int kernel_radius() const;
  void validate() const;
};

// k[t] proportional to exp(-t^2 / (2 sigma^2)) for |t| <= ceil(3 sigma),
// normalized to unit sum. Index `radius` is the center tap.
std::vector<double> gaussian_kernel(double sigma);

// Half-sample symmetric reflection: -1 -> 0, n -> n-1, and so on,
// periodic with period 2n for indices far outside.
int mirror_index(int index, int size);

// Keys cubic convolution kernel with a = -0.5.
double keys_cubic(double t);

// A linear map between 1-D signals of lengths in_size -> out_size, stored as
// a fixed number of (source index, weight) taps per output sample.
class AxisOperator {
 public:
  // Mirror-padded convolution with gaussian_kernel(sigma).
  static AxisOperator gaussian(int size, double sigma);
  // Bicubic resampling. Output sample i reads source coordinate
  // (i + 0.5) * in / out - 0.5 through four Keys taps.
  static AxisOperator bicubic(int in_size, int out_size);

  int in_size() const { return in_size_; }
  int out_size() const { return out_size_; }
  int taps_per_output() const { return taps_; }
  std::span<const int> indices(int out) const {
    return {index_.data() + static_cast<std::size_t>(out) * taps_,
            static_cast<std::size_t>(taps_)};
  }
  std::span<const double> weights(int out) const {
    return {weight_.data() + static_cast<std::size_t>(out) * taps_,
            static_cast<std::size_t>(taps_)};
  }

  // out[o * out_stride] = sum_k w_k in[idx_k * in_stride]
  void apply(const double* in, std::ptrdiff_t in_stride, double* out,
             std::ptrdiff_t out_stride) const;
  // Adjoint: in_grad[idx_k * in_stride] += w_k out_grad[o * out_stride]
  void apply_adjoint(const double* out_grad, std::ptrdiff_t out_stride,
                     double* in_grad, std::ptrdiff_t in_stride) const;

 private:
  AxisOperator(int in_size, int out_size, int taps);

  int in_size_;
  int out_size_;
  int taps_;
  std::vector<int> index_;
  std::vector<double> weight_;
};

// Applies `along_width` to every row, then `along_height` to every column,
// independently per channel of a band-interleaved height x width x channels
// buffer.
std::vector<double> apply_separable(std::span<const double> in, int height,
                                    int width, int channels,
                                    const AxisOperator& along_height,
                                    const AxisOperator& along_width);

template <typename Tag>
Raster<Tag> blur(const Raster<Tag>& in, double sigma) {
  const AxisOperator rows = AxisOperator::gaussian(in.height(), sigma);
  const AxisOperator cols = AxisOperator::gaussian(in.width(), sigma);
  return Raster<Tag>(in.height(), in.width(), in.channels(),
                     apply_separable(in.data(), in.height(), in.width(),
                                     in.channels(), rows, cols));
}

template <typename Tag>
Raster<Tag> bicubic_resample(const Raster<Tag>& in, int out_height,
                             int out_width) {
  const AxisOperator rows = AxisOperator::bicubic(in.height(), out_height);
  const AxisOperator cols = AxisOperator::bicubic(in.width(), out_width);
  return Raster<Tag>(out_height, out_width, in.channels(),
                     apply_separable(in.data(), in.height(), in.width(),
                                     in.channels(), rows, cols));
}

template <typename Tag>
Raster<Tag> bicubic_upsample(const Raster<Tag>& in, int scale) {
  return bicubic_resample(in, in.height() * scale, in.width() * scale);
}

// Rejects spatial sizes that are not multiples of spec.scale.
void check_degradable(int height, int width, const DegradationSpec& spec);

// blur(hr, spec.blur_sigma), then bicubic decimation to (H/scale, W/scale).
template <typename Tag>
Raster<Tag> degrade(const Raster<Tag>& hr, const DegradationSpec& spec) {
  spec.validate();
  check_degradable(hr.height(), hr.width(), spec);
  return bicubic_resample(blur(hr, spec.blur_sigma), hr.height() / spec.scale,
                          hr.width() / spec.scale);
}

}  // namespace hsisr

#endif  // HSISR_DEGRADATION_H_
