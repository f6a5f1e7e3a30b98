#include "hsisr/layers.h"

#include <cmath>
#include <string>

#include <Eigen/Dense>

namespace hsisr {
namespace {

using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Whole-sample reflection for a one-pixel border: -1 -> 1, n -> n-2.
// A single-pixel axis reflects onto itself.
int reflect_index(int i, int size) {
  if (size == 1) return 0;
  if (i < 0) return -i;
  if (i >= size) return 2 * size - 2 - i;
  return i;
}

// Source offsets for each of the 3 taps along an axis:
// table[k * size + i] = reflect_index(i + k - 1, size).
std::vector<int> tap_table(int size) {
  std::vector<int> table(static_cast<std::size_t>(kConvKernel) * size);
  for (int k = 0; k < kConvKernel; ++k) {
    for (int i = 0; i < size; ++i) table[k * size + i] = reflect_index(i + k - 1, size);
  }
  return table;
}

// Columns matrix: row (ci * 9 + ky * 3 + kx), column (y * W + x).
void im2col(const double* sample, int channels, int h, int w,
            const std::vector<int>& ty, const std::vector<int>& tx,
            RowMatrix& cols) {
  const std::size_t plane = static_cast<std::size_t>(h) * w;
  for (int ci = 0; ci < channels; ++ci) {
    const double* src = sample + ci * plane;
    for (int ky = 0; ky < kConvKernel; ++ky) {
      for (int kx = 0; kx < kConvKernel; ++kx) {
        double* dst = cols.row((ci * kConvKernel + ky) * kConvKernel + kx).data();
        const int* iy = ty.data() + ky * h;
        const int* ix = tx.data() + kx * w;
        for (int y = 0; y < h; ++y) {
          const double* row = src + static_cast<std::size_t>(iy[y]) * w;
          double* out = dst + static_cast<std::size_t>(y) * w;
          for (int x = 0; x < w; ++x) out[x] = row[ix[x]];
        }
      }
    }
  }
}

void col2im_add(const RowMatrix& cols, int channels, int h, int w,
                const std::vector<int>& ty, const std::vector<int>& tx,
                double* sample) {
  const std::size_t plane = static_cast<std::size_t>(h) * w;
  for (int ci = 0; ci < channels; ++ci) {
    double* dst = sample + ci * plane;
    for (int ky = 0; ky < kConvKernel; ++ky) {
      for (int kx = 0; kx < kConvKernel; ++kx) {
        const double* src =
            cols.row((ci * kConvKernel + ky) * kConvKernel + kx).data();
        const int* iy = ty.data() + ky * h;
        const int* ix = tx.data() + kx * w;
        for (int y = 0; y < h; ++y) {
          double* row = dst + static_cast<std::size_t>(iy[y]) * w;
          const double* in = src + static_cast<std::size_t>(y) * w;
          for (int x = 0; x < w; ++x) row[ix[x]] += in[x];
        }
      }
    }
  }
}

void check_kernel(const Tensor4& input, std::span<const double> kernel,
                  int out_channels) {
  const std::size_t expected = static_cast<std::size_t>(out_channels) *
                               input.c() * kConvKernel * kConvKernel;
  if (out_channels < 1 || kernel.size() != expected) {
    throw InvalidArgument("conv kernel has " + std::to_string(kernel.size()) +
                          " values, expected " + std::to_string(expected) +
                          " for input " + input.shape_string());
  }
}

}  // namespace

Tensor4 conv2d_forward(const Tensor4& input, std::span<const double> kernel,
                       std::span<const double> bias, int out_channels) {
  check_kernel(input, kernel, out_channels);
  if (bias.size() != static_cast<std::size_t>(out_channels)) {
    throw InvalidArgument("conv bias length does not match output channels");
  }
  const int h = input.h();
  const int w = input.w();
  const Eigen::Index patch = static_cast<Eigen::Index>(input.c()) * 9;
  const Eigen::Index pixels = static_cast<Eigen::Index>(h) * w;
  const auto ty = tap_table(h);
  const auto tx = tap_table(w);

  Eigen::Map<const RowMatrix> k(kernel.data(), out_channels, patch);
  Eigen::Map<const Eigen::VectorXd> b(bias.data(), out_channels);
  Tensor4 out(input.n(), out_channels, h, w);
  RowMatrix cols(patch, pixels);
  for (int n = 0; n < input.n(); ++n) {
    im2col(input.sample(n), input.c(), h, w, ty, tx, cols);
    Eigen::Map<RowMatrix> y(out.sample(n), out_channels, pixels);
    y.noalias() = k * cols;
    y.colwise() += b;
  }
  return out;
}

Conv2dGrads conv2d_backward(const Tensor4& input, std::span<const double> kernel,
                            int out_channels, const Tensor4& grad_output,
                            bool want_input) {
  check_kernel(input, kernel, out_channels);
  if (grad_output.n() != input.n() || grad_output.c() != out_channels ||
      grad_output.h() != input.h() || grad_output.w() != input.w()) {
    throw InvalidArgument("conv output gradient shape " +
                          grad_output.shape_string() + " does not match");
  }
  const int h = input.h();
  const int w = input.w();
  const Eigen::Index patch = static_cast<Eigen::Index>(input.c()) * 9;
  const Eigen::Index pixels = static_cast<Eigen::Index>(h) * w;
  const auto ty = tap_table(h);
  const auto tx = tap_table(w);

  Conv2dGrads grads;
  grads.kernel.assign(kernel.size(), 0.0);
  grads.bias.assign(out_channels, 0.0);
  if (want_input) grads.input = Tensor4(input.n(), input.c(), h, w);

  Eigen::Map<const RowMatrix> k(kernel.data(), out_channels, patch);
  Eigen::Map<RowMatrix> gk(grads.kernel.data(), out_channels, patch);
  Eigen::Map<Eigen::VectorXd> gb(grads.bias.data(), out_channels);
  RowMatrix cols(patch, pixels);
  RowMatrix gcols(patch, pixels);
  for (int n = 0; n < input.n(); ++n) {
    Eigen::Map<const RowMatrix> g(grad_output.sample(n), out_channels, pixels);
    im2col(input.sample(n), input.c(), h, w, ty, tx, cols);
    gk.noalias() += g * cols.transpose();
    // Plain loop: Eigen's vectorized sum peels by address, so its order
    // (and rounding) would vary from run to run.
    for (int co = 0; co < out_channels; ++co) {
      const double* row = grad_output.plane(n, co);
      double sum = 0.0;
      for (Eigen::Index p = 0; p < pixels; ++p) sum += row[p];
      gb(co) += sum;
    }
    if (want_input) {
      gcols.noalias() = k.transpose() * g;
      col2im_add(gcols, input.c(), h, w, ty, tx, grads.input.sample(n));
    }
  }
  return grads;
}

Tensor4 relu_forward(const Tensor4& input) {
  Tensor4 out = input;
  for (double& v : out.data()) v = v > 0.0 ? v : 0.0;
  return out;
}

Tensor4 relu_backward(const Tensor4& input, const Tensor4& grad_output) {
  if (!input.same_shape(grad_output)) {
    throw InvalidArgument("relu gradient shape mismatch");
  }
  Tensor4 out = grad_output;
  const auto x = input.data();
  auto g = out.data();
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!(x[i] > 0.0)) g[i] = 0.0;
  }
  return out;
}

double l1_loss_forward(const Tensor4& prediction, const Tensor4& target) {
  if (!prediction.same_shape(target)) {
    throw InvalidArgument("L1 loss shape mismatch: " + prediction.shape_string() +
                          " vs " + target.shape_string());
  }
  const auto p = prediction.data();
  const auto t = target.data();
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) sum += std::abs(p[i] - t[i]);
  return sum / static_cast<double>(p.size());
}

Tensor4 l1_loss_backward(const Tensor4& prediction, const Tensor4& target) {
  if (!prediction.same_shape(target)) {
    throw InvalidArgument("L1 loss shape mismatch: " + prediction.shape_string() +
                          " vs " + target.shape_string());
  }
  Tensor4 grad(prediction.n(), prediction.c(), prediction.h(), prediction.w());
  const auto p = prediction.data();
  const auto t = target.data();
  auto g = grad.data();
  const double inv = 1.0 / static_cast<double>(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double d = p[i] - t[i];
    g[i] = d > 0.0 ? inv : (d < 0.0 ? -inv : 0.0);
  }
  return grad;
}

Tensor4 resample_planes(const Tensor4& input, const AxisOperator& along_height,
                        const AxisOperator& along_width) {
  if (along_height.in_size() != input.h() || along_width.in_size() != input.w()) {
    throw InvalidArgument("resampler does not match tensor " + input.shape_string());
  }
  const int oh = along_height.out_size();
  const int ow = along_width.out_size();
  Tensor4 out(input.n(), input.c(), oh, ow);
  std::vector<double> mid(static_cast<std::size_t>(input.h()) * ow);
  for (int n = 0; n < input.n(); ++n) {
    for (int c = 0; c < input.c(); ++c) {
      const double* src = input.plane(n, c);
      for (int y = 0; y < input.h(); ++y) {
        along_width.apply(src + static_cast<std::size_t>(y) * input.w(), 1,
                          mid.data() + static_cast<std::size_t>(y) * ow, 1);
      }
      double* dst = out.plane(n, c);
      for (int x = 0; x < ow; ++x) along_height.apply(mid.data() + x, ow, dst + x, ow);
    }
  }
  return out;
}

Tensor4 resample_planes_adjoint(const Tensor4& grad_output,
                                const AxisOperator& along_height,
                                const AxisOperator& along_width) {
  if (along_height.out_size() != grad_output.h() ||
      along_width.out_size() != grad_output.w()) {
    throw InvalidArgument("resampler does not match gradient " +
                          grad_output.shape_string());
  }
  const int ih = along_height.in_size();
  const int iw = along_width.in_size();
  const int ow = grad_output.w();
  Tensor4 out(grad_output.n(), grad_output.c(), ih, iw);
  std::vector<double> mid;
  for (int n = 0; n < grad_output.n(); ++n) {
    for (int c = 0; c < grad_output.c(); ++c) {
      mid.assign(static_cast<std::size_t>(ih) * ow, 0.0);
      const double* g = grad_output.plane(n, c);
      for (int x = 0; x < ow; ++x) along_height.apply_adjoint(g + x, ow, mid.data() + x, ow);
      double* dst = out.plane(n, c);
      for (int y = 0; y < ih; ++y) {
        along_width.apply_adjoint(mid.data() + static_cast<std::size_t>(y) * ow, 1,
                                  dst + static_cast<std::size_t>(y) * iw, 1);
      }
    }
  }
  return out;
}

}  // namespace hsisr
