#ifndef HSISR_LAYERS_H_
#define HSISR_LAYERS_H_

#include <span>
#include <vector>

#include "hsisr/degradation.h"
#include "hsisr/tensor.h"

namespace hsisr {

inline constexpr int kConvKernel = 3;

// 3x3 cross-correlation, stride 1, one pixel of reflect padding (edge pixel
// not repeated), so spatial size is preserved. kernel is laid out
// [out][in][3][3], bias has out_channels entries.
Tensor4 conv2d_forward(const Tensor4& input, std::span<const double> kernel,
                       std::span<const double> bias, int out_channels);

struct Conv2dGrads {
  Tensor4 input;
  std::vector<double> kernel;
  std::vector<double> bias;
};

// Gradients of a scalar loss given dL/d(output). When `want_input` is false
// the input gradient is left empty.
Conv2dGrads conv2d_backward(const Tensor4& input, std::span<const double> kernel,
                            int out_channels, const Tensor4& grad_output,
                            bool want_input = true);

Tensor4 relu_forward(const Tensor4& input);
// Passes the gradient where the forward input was strictly positive.
Tensor4 relu_backward(const Tensor4& input, const Tensor4& grad_output);

// Mean absolute error over every element.
double l1_loss_forward(const Tensor4& prediction, const Tensor4& target);
// sign(pred - target) / count, with sign(0) = 0.
Tensor4 l1_loss_backward(const Tensor4& prediction, const Tensor4& target);

// Applies separable 1-D operators to every (n, c) plane.
Tensor4 resample_planes(const Tensor4& input, const AxisOperator& along_height,
                        const AxisOperator& along_width);
// Adjoint of resample_planes.
Tensor4 resample_planes_adjoint(const Tensor4& grad_output,
                                const AxisOperator& along_height,
                                const AxisOperator& along_width);

}  // namespace hsisr

#endif  // HSISR_LAYERS_H_
