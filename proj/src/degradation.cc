#include "hsisr/degradation.h"

#include <cmath>
#include <string>

#include "hsisr/error.h"

namespace hsisr {

DegradationSpec DegradationSpec::for_scale(int scale,
                                           std::optional<double> sigma) {
  DegradationSpec spec;
  spec.scale = scale;
  spec.blur_sigma = sigma.value_or(static_cast<double>(scale));
  spec.validate();
  return spec;
}

int DegradationSpec::kernel_radius() const {
  return static_cast<int>(std::ceil(3.0 * blur_sigma));
}

void DegradationSpec::validate() const {
  if (scale < 2) {
    throw InvalidArgument("degradation scale must be >= 2, got " +
                          std::to_string(scale));
  }
  if (!(blur_sigma > 0.0) || !std::isfinite(blur_sigma)) {
    throw InvalidArgument("blur sigma must be positive");
  }
}

void check_degradable(int height, int width, const DegradationSpec& spec) {
  if (height % spec.scale != 0 || width % spec.scale != 0) {
    throw InvalidArgument("spatial size " + std::to_string(height) + "x" +
                          std::to_string(width) + " is not divisible by scale " +
                          std::to_string(spec.scale));
  }
}

std::vector<double> gaussian_kernel(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw InvalidArgument("Gaussian sigma must be positive");
  }
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k(2 * radius + 1);
  double sum = 0.0;
  for (int t = -radius; t <= radius; ++t) {
    k[t + radius] = std::exp(-static_cast<double>(t) * t / (2.0 * sigma * sigma));
    sum += k[t + radius];
  }
  for (double& v : k) v /= sum;
  return k;
}

int mirror_index(int index, int size) {
  if (size == 1) return 0;
  const int period = 2 * size;
  int r = index % period;
  if (r < 0) r += period;
  return r < size ? r : period - 1 - r;
}

double keys_cubic(double t) {
  constexpr double a = -0.5;
  const double x = std::abs(t);
  if (x <= 1.0) return ((a + 2.0) * x - (a + 3.0)) * x * x + 1.0;
  if (x < 2.0) return ((a * x - 5.0 * a) * x + 8.0 * a) * x - 4.0 * a;
  return 0.0;
}

AxisOperator::AxisOperator(int in_size, int out_size, int taps)
    : in_size_(in_size),
      out_size_(out_size),
      taps_(taps),
      index_(static_cast<std::size_t>(out_size) * taps),
      weight_(static_cast<std::size_t>(out_size) * taps) {
  if (in_size < 1 || out_size < 1) {
    throw InvalidArgument("axis operator sizes must be positive");
  }
}

AxisOperator AxisOperator::gaussian(int size, double sigma) {
  const std::vector<double> k = gaussian_kernel(sigma);
  const int radius = static_cast<int>(k.size() / 2);
  AxisOperator op(size, size, static_cast<int>(k.size()));
  for (int o = 0; o < size; ++o) {
    for (int t = -radius; t <= radius; ++t) {
      const std::size_t slot = static_cast<std::size_t>(o) * op.taps_ + t + radius;
      op.index_[slot] = mirror_index(o + t, size);
      op.weight_[slot] = k[t + radius];
    }
  }
  return op;
}

AxisOperator AxisOperator::bicubic(int in_size, int out_size) {
  AxisOperator op(in_size, out_size, 4);
  const double ratio = static_cast<double>(in_size) / out_size;
  for (int o = 0; o < out_size; ++o) {
    const double src = (o + 0.5) * ratio - 0.5;
    const int base = static_cast<int>(std::floor(src));
    for (int k = 0; k < 4; ++k) {
      const int tap = base - 1 + k;
      const std::size_t slot = static_cast<std::size_t>(o) * 4 + k;
      op.index_[slot] = mirror_index(tap, in_size);
      op.weight_[slot] = keys_cubic(src - tap);
    }
  }
  return op;
}

void AxisOperator::apply(const double* in, std::ptrdiff_t in_stride, double* out,
                         std::ptrdiff_t out_stride) const {
  for (int o = 0; o < out_size_; ++o) {
    const int* idx = index_.data() + static_cast<std::size_t>(o) * taps_;
    const double* w = weight_.data() + static_cast<std::size_t>(o) * taps_;
    double acc = 0.0;
    for (int k = 0; k < taps_; ++k) acc += w[k] * in[idx[k] * in_stride];
    out[o * out_stride] = acc;
  }
}

void AxisOperator::apply_adjoint(const double* out_grad,
                                 std::ptrdiff_t out_stride, double* in_grad,
                                 std::ptrdiff_t in_stride) const {
  for (int o = 0; o < out_size_; ++o) {
    const int* idx = index_.data() + static_cast<std::size_t>(o) * taps_;
    const double* w = weight_.data() + static_cast<std::size_t>(o) * taps_;
    const double g = out_grad[o * out_stride];
    for (int k = 0; k < taps_; ++k) in_grad[idx[k] * in_stride] += w[k] * g;
  }
}

std::vector<double> apply_separable(std::span<const double> in, int height,
                                    int width, int channels,
                                    const AxisOperator& along_height,
                                    const AxisOperator& along_width) {
  if (along_width.in_size() != width || along_height.in_size() != height ||
      in.size() != static_cast<std::size_t>(height) * width * channels) {
    throw InvalidArgument("separable operator does not match raster shape");
  }
  const int out_w = along_width.out_size();
  const int out_h = along_height.out_size();

  std::vector<double> mid(static_cast<std::size_t>(height) * out_w * channels);
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < channels; ++c) {
      along_width.apply(in.data() + static_cast<std::size_t>(r) * width * channels + c,
                        channels,
                        mid.data() + static_cast<std::size_t>(r) * out_w * channels + c,
                        channels);
    }
  }

  std::vector<double> out(static_cast<std::size_t>(out_h) * out_w * channels);
  const std::ptrdiff_t row_stride = static_cast<std::ptrdiff_t>(out_w) * channels;
  for (int col = 0; col < out_w; ++col) {
    for (int c = 0; c < channels; ++c) {
      const std::size_t offset = static_cast<std::size_t>(col) * channels + c;
      along_height.apply(mid.data() + offset, row_stride, out.data() + offset,
                         row_stride);
    }
  }
  return out;
}

}  // namespace hsisr
