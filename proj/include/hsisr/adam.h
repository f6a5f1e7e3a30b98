#ifndef HSISR_ADAM_H_
#define HSISR_ADAM_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace hsisr {

struct AdamState {
  std::vector<double> m;  // first moment
  std::vector<double> v;  // second moment
  std::int64_t t = 0;
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  AdamState() = default;
  AdamState(std::size_t parameter_count, double lr)
      : m(parameter_count, 0.0), v(parameter_count, 0.0), learning_rate(lr) {}
};

// One bias-corrected Adam update of `params` in place.
void adam_step(std::span<double> params, std::span<const double> grads,
               AdamState& state);

}  // namespace hsisr

#endif  // HSISR_ADAM_H_
