#ifndef HSISR_TESTS_GRADCHECK_H_
#define HSISR_TESTS_GRADCHECK_H_

// Central finite-difference checks shared by the unit tests and the
// acceptance runner. Each returns the worst relative error
//   |analytic - numeric| / max(|analytic|, |numeric|, floor)
// over the checked entries.

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "hsisr/layers.h"
#include "hsisr/network.h"
#include "test_support.h"

namespace hsisr::testing {

inline constexpr double kFdStep = 1e-5;
inline constexpr double kRelFloor = 1e-6;

inline double rel_error(double analytic, double numeric) {
  return std::abs(analytic - numeric) /
         std::max({std::abs(analytic), std::abs(numeric), kRelFloor});
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Perturbs every entry of `x` and compares against `grad`.
inline double check_entries(std::span<double> x, std::span<const double> grad,
                            const std::function<double()>& loss) {
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double keep = x[i];
    x[i] = keep + kFdStep;
    const double up = loss();
    x[i] = keep - kFdStep;
    const double down = loss();
    x[i] = keep;
    worst = std::max(worst, rel_error(grad[i], (up - down) / (2.0 * kFdStep)));
  }
  return worst;
}

// Loss <g, conv(x)> checked against input, kernel and bias gradients.
inline double conv_gradcheck(std::uint64_t seed) {
  const int n = 2, cin = 3, cout = 2, h = 5, w = 4;
  Tensor4 x = random_tensor(n, cin, h, w, seed);
  const Tensor4 g = random_tensor(n, cout, h, w, seed + 1000);
  std::vector<double> kernel(static_cast<std::size_t>(cout) * cin * 9);
  std::vector<double> bias(cout);
  {
    const Tensor4 k = random_tensor(1, 1, 1, static_cast<int>(kernel.size()), seed + 2000);
    std::copy(k.data().begin(), k.data().end(), kernel.begin());
    const Tensor4 b = random_tensor(1, 1, 1, cout, seed + 3000);
    std::copy(b.data().begin(), b.data().end(), bias.begin());
  }
  auto loss = [&] { return dot(g.data(), conv2d_forward(x, kernel, bias, cout).data()); };
  const Conv2dGrads grads = conv2d_backward(x, kernel, cout, g);
  double worst = check_entries(x.data(), grads.input.data(), loss);
  worst = std::max(worst, check_entries(kernel, grads.kernel, loss));
  worst = std::max(worst, check_entries(bias, grads.bias, loss));
  return worst;
}

// Loss <g, relu(x)> with inputs kept away from the kink.
inline double relu_gradcheck(std::uint64_t seed) {
  Tensor4 x = random_tensor(2, 3, 4, 4, seed);
  for (double& v : x.data()) {
    if (std::abs(v) < 1e-2) v = v < 0 ? -1e-2 : 1e-2;
  }
  const Tensor4 g = random_tensor(2, 3, 4, 4, seed + 1000);
  auto loss = [&] { return dot(g.data(), relu_forward(x).data()); };
  return check_entries(x.data(), relu_backward(x, g).data(), loss);
}

// Mean absolute error against a target that differs from every prediction.
inline double l1_gradcheck(std::uint64_t seed) {
  Tensor4 pred = random_tensor(1, 2, 5, 5, seed);
  Tensor4 target = random_tensor(1, 2, 5, 5, seed + 1000);
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (std::abs(pred.data()[i] - target.data()[i]) < 1e-2) target.data()[i] += 0.05;
  }
  auto loss = [&] { return l1_loss_forward(pred, target); };
  return check_entries(pred.data(), l1_loss_backward(pred, target).data(), loss);
}

inline NetworkParams random_params(const NetworkShape& shape, std::uint64_t seed,
                                   double amplitude = 0.3) {
  NetworkParams p(shape);
  const Tensor4 r = random_tensor(1, 1, 1, static_cast<int>(p.values().size()), seed,
                                  -amplitude, amplitude);
  std::copy(r.data().begin(), r.data().end(), p.values().begin());
  return p;
}

struct NetworkCheck {
  double params = 0.0;  // every parameter
  double input = 0.0;   // every input entry
  double jvp = 0.0;     // one random direction through the input
};

// Loss <g, net(x)> on a 1 x (M+1) x 6 x 6 input with random weights, tail
// included, so every layer contributes.
inline NetworkCheck network_gradcheck(std::uint64_t seed, int scale = 2) {
  const NetworkShape shape{2, 4, 2};
  NetworkParams params = random_params(shape, seed);
  Tensor4 x = random_tensor(1, shape.in_channels(), 6, 6, seed + 1, 0.0, 1.0);
  const Tensor4 g = random_tensor(1, shape.materials, 6 * scale, 6 * scale, seed + 2);
  auto loss = [&] { return dot(g.data(), forward(params, x, scale).data()); };

  const ForwardTrace trace = forward_trace(params, x, scale);
  const NetworkGrads grads = backward(params, trace, g, true);
  NetworkCheck out;
  out.params = check_entries(params.values(), grads.params, loss);
  out.input = check_entries(x.data(), grads.input.data(), loss);

  const Tensor4 d = random_tensor(1, shape.in_channels(), 6, 6, seed + 3);
  Tensor4 xp = x, xm = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    xp.data()[i] += kFdStep * d.data()[i];
    xm.data()[i] -= kFdStep * d.data()[i];
  }
  const double numeric = (dot(g.data(), forward(params, xp, scale).data()) -
                          dot(g.data(), forward(params, xm, scale).data())) /
                         (2.0 * kFdStep);
  out.jvp = rel_error(dot(grads.input.data(), d.data()), numeric);
  return out;
}

}  // namespace hsisr::testing

#endif  // HSISR_TESTS_GRADCHECK_H_
