#ifndef HSISR_NETWORK_H_
#define HSISR_NETWORK_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hsisr/tensor.h"

namespace hsisr {

// Residual super-resolver:
//   up  = bicubic x scale of the (M+1)-channel input stack
//   f   = head(up)                          (M+1 -> F)
//   f   = f + conv2(relu(conv1(f)))         (D residual blocks, F -> F)
//   out = up[0..M-1] + tail(f)              (F -> M)
// All convolutions are 3x3 with reflect padding.
struct NetworkShape {
  int materials = 6;  // M; the input has M + 1 channels
  int features = 32;
  int blocks = 4;

  int in_channels() const { return materials + 1; }
  void validate() const;
  friend bool operator==(const NetworkShape&, const NetworkShape&) = default;
};

struct LayerInfo {
  std::string name;
  std::vector<int> dims;
  std::size_t offset = 0;
  std::size_t count = 0;
  friend bool operator==(const LayerInfo&, const LayerInfo&) = default;
};

// All weights live in one flat vector; `layers` describes the slices in
// order head.weight, head.bias, block{k}.conv{1,2}.{weight,bias}...,
// tail.weight, tail.bias.
class NetworkParams {
 public:
  NetworkParams() = default;
  // All-zero parameters.
  explicit NetworkParams(const NetworkShape& shape);

  const NetworkShape& shape() const { return shape_; }
  const std::vector<LayerInfo>& layers() const { return layers_; }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  std::span<double> layer(std::size_t i);
  std::span<const double> layer(std::size_t i) const;

  std::size_t head_weight() const { return 0; }
  std::size_t block_weight(int block, int conv) const {
    return 2 + 4 * static_cast<std::size_t>(block) + 2 * static_cast<std::size_t>(conv);
  }
  std::size_t tail_weight() const { return 2 + 4 * static_cast<std::size_t>(shape_.blocks); }

  friend bool operator==(const NetworkParams&, const NetworkParams&) = default;

 private:
  NetworkShape shape_;
  std::vector<LayerInfo> layers_;
  std::vector<double> values_;
};

// Head and block kernels ~ N(0, 2 / fan_in); tail kernel and every bias zero,
// which makes the untrained network exactly the bicubic upsampler.
NetworkParams init_params(const NetworkShape& shape, std::uint64_t seed);

// Activations kept for the backward pass.
struct ForwardTrace {
  int scale = 1;
  Tensor4 up;
  Tensor4 head_out;
  std::vector<Tensor4> block_in;
  std::vector<Tensor4> block_pre;   // conv1 output
  std::vector<Tensor4> block_act;   // relu(conv1 output)
  Tensor4 body_out;
  Tensor4 output;
};

// input: N x (M+1) x h x w. Returns N x M x (h*scale) x (w*scale).
Tensor4 forward(const NetworkParams& params, const Tensor4& input, int scale);
ForwardTrace forward_trace(const NetworkParams& params, const Tensor4& input,
                           int scale);

struct NetworkGrads {
  std::vector<double> params;  // same layout as NetworkParams::values()
  Tensor4 input;               // empty unless requested
};

NetworkGrads backward(const NetworkParams& params, const ForwardTrace& trace,
                      const Tensor4& grad_output, bool want_input = false);

}  // namespace hsisr

#endif  // HSISR_NETWORK_H_
