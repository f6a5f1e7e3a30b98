#include "hsisr/network.h"

#include <cmath>
#include <random>

#include "hsisr/degradation.h"
#include "hsisr/layers.h"
#include "hsisr/random.h"

namespace hsisr {
namespace {

void add_into(std::span<double> dst, std::span<const double> src) {
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
}

}  // namespace

void NetworkShape::validate() const {
  if (materials < 1 || features < 1 || blocks < 0) {
    throw InvalidArgument("network shape needs M >= 1, F >= 1, D >= 0");
  }
}

NetworkParams::NetworkParams(const NetworkShape& shape) : shape_(shape) {
  shape.validate();
  auto add_conv = [&](const std::string& name, int out, int in) {
    LayerInfo w{name + ".weight", {out, in, kConvKernel, kConvKernel}, 0,
                static_cast<std::size_t>(out) * in * kConvKernel * kConvKernel};
    LayerInfo b{name + ".bias", {out}, 0, static_cast<std::size_t>(out)};
    layers_.push_back(std::move(w));
    layers_.push_back(std::move(b));
  };
  add_conv("head", shape.features, shape.in_channels());
  for (int k = 0; k < shape.blocks; ++k) {
    add_conv("block" + std::to_string(k) + ".conv1", shape.features, shape.features);
    add_conv("block" + std::to_string(k) + ".conv2", shape.features, shape.features);
  }
  add_conv("tail", shape.materials, shape.features);

  std::size_t offset = 0;
  for (LayerInfo& layer : layers_) {
    layer.offset = offset;
    offset += layer.count;
  }
  values_.assign(offset, 0.0);
}

std::span<double> NetworkParams::layer(std::size_t i) {
  return std::span<double>(values_).subspan(layers_.at(i).offset, layers_[i].count);
}

std::span<const double> NetworkParams::layer(std::size_t i) const {
  return std::span<const double>(values_).subspan(layers_.at(i).offset,
                                                  layers_[i].count);
}

NetworkParams init_params(const NetworkShape& shape, std::uint64_t seed) {
  NetworkParams params(shape);
  Rng rng = make_rng(seed, {0});
  const std::size_t tail = params.tail_weight();
  for (std::size_t i = 0; i < tail; i += 2) {
    const auto& dims = params.layers()[i].dims;
    const double fan_in = static_cast<double>(dims[1]) * kConvKernel * kConvKernel;
    std::normal_distribution<double> gauss(0.0, std::sqrt(2.0 / fan_in));
    for (double& v : params.layer(i)) v = gauss(rng);
  }
  return params;
}

ForwardTrace forward_trace(const NetworkParams& params, const Tensor4& input,
                           int scale) {
  const NetworkShape& shape = params.shape();
  if (input.c() != shape.in_channels()) {
    throw InvalidArgument("network expects " + std::to_string(shape.in_channels()) +
                          " input channels, got " + std::to_string(input.c()));
  }
  if (scale < 1) throw InvalidArgument("scale must be >= 1");

  ForwardTrace t;
  t.scale = scale;
  const AxisOperator along_h = AxisOperator::bicubic(input.h(), input.h() * scale);
  const AxisOperator along_w = AxisOperator::bicubic(input.w(), input.w() * scale);
  t.up = resample_planes(input, along_h, along_w);

  const std::size_t head = params.head_weight();
  t.head_out = conv2d_forward(t.up, params.layer(head), params.layer(head + 1),
                              shape.features);
  Tensor4 x = t.head_out;
  for (int k = 0; k < shape.blocks; ++k) {
    const std::size_t c1 = params.block_weight(k, 0);
    const std::size_t c2 = params.block_weight(k, 1);
    t.block_in.push_back(x);
    t.block_pre.push_back(
        conv2d_forward(x, params.layer(c1), params.layer(c1 + 1), shape.features));
    t.block_act.push_back(relu_forward(t.block_pre.back()));
    Tensor4 r = conv2d_forward(t.block_act.back(), params.layer(c2),
                               params.layer(c2 + 1), shape.features);
    add_into(x.data(), r.data());
  }
  t.body_out = std::move(x);

  const std::size_t tail = params.tail_weight();
  t.output = conv2d_forward(t.body_out, params.layer(tail), params.layer(tail + 1),
                            shape.materials);
  for (int n = 0; n < t.output.n(); ++n) {
    for (int c = 0; c < shape.materials; ++c) {
      double* dst = t.output.plane(n, c);
      const double* src = t.up.plane(n, c);
      for (std::size_t i = 0; i < t.output.plane_size(); ++i) dst[i] += src[i];
    }
  }
  return t;
}

Tensor4 forward(const NetworkParams& params, const Tensor4& input, int scale) {
  return forward_trace(params, input, scale).output;
}

NetworkGrads backward(const NetworkParams& params, const ForwardTrace& trace,
                      const Tensor4& grad_output, bool want_input) {
  const NetworkShape& shape = params.shape();
  if (!grad_output.same_shape(trace.output)) {
    throw InvalidArgument("output gradient shape " + grad_output.shape_string() +
                          " does not match network output " +
                          trace.output.shape_string());
  }
  NetworkGrads grads;
  grads.params.assign(params.values().size(), 0.0);
  auto store = [&](std::size_t layer, const std::vector<double>& g) {
    const LayerInfo& info = params.layers()[layer];
    std::copy(g.begin(), g.end(), grads.params.begin() + info.offset);
  };

  const std::size_t tail = params.tail_weight();
  Conv2dGrads gt = conv2d_backward(trace.body_out, params.layer(tail),
                                   shape.materials, grad_output);
  store(tail, gt.kernel);
  store(tail + 1, gt.bias);
  Tensor4 g = std::move(gt.input);

  for (int k = shape.blocks - 1; k >= 0; --k) {
    const std::size_t c1 = params.block_weight(k, 0);
    const std::size_t c2 = params.block_weight(k, 1);
    Conv2dGrads g2 = conv2d_backward(trace.block_act[k], params.layer(c2),
                                     shape.features, g);
    store(c2, g2.kernel);
    store(c2 + 1, g2.bias);
    const Tensor4 gpre = relu_backward(trace.block_pre[k], g2.input);
    Conv2dGrads g1 = conv2d_backward(trace.block_in[k], params.layer(c1),
                                     shape.features, gpre);
    store(c1, g1.kernel);
    store(c1 + 1, g1.bias);
    add_into(g.data(), g1.input.data());
  }

  const std::size_t head = params.head_weight();
  Conv2dGrads gh = conv2d_backward(trace.up, params.layer(head), shape.features,
                                   g, want_input);
  store(head, gh.kernel);
  store(head + 1, gh.bias);

  if (want_input) {
    Tensor4 gup = std::move(gh.input);
    for (int n = 0; n < gup.n(); ++n) {
      for (int c = 0; c < shape.materials; ++c) {
        double* dst = gup.plane(n, c);
        const double* src = grad_output.plane(n, c);
        for (std::size_t i = 0; i < gup.plane_size(); ++i) dst[i] += src[i];
      }
    }
    const int h = gup.h() / trace.scale;
    const int w = gup.w() / trace.scale;
    grads.input = resample_planes_adjoint(gup, AxisOperator::bicubic(h, gup.h()),
                                          AxisOperator::bicubic(w, gup.w()));
  }
  return grads;
}

}  // namespace hsisr
