#include "hsisr/trainer.h"

#include <algorithm>
#include <numeric>
#include <string>

#include "hsisr/adam.h"
#include "hsisr/layers.h"
#include "hsisr/random.h"

namespace hsisr {
namespace {

// Stream ids for make_rng(seed, {stream, ...}).
constexpr std::uint64_t kShuffleStream = 1;
constexpr std::uint64_t kCropStream = 2;
constexpr std::uint64_t kNoiseStream = 3;

template <typename Tag>
Raster<Tag> crop(const Raster<Tag>& in, int row, int col, int h, int w) {
  Raster<Tag> out(h, w, in.channels());
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const auto src = in.pixel(row + r, col + c);
      std::copy(src.begin(), src.end(), out.pixel(r, c).begin());
    }
  }
  return out;
}

// Copies (1, C, H, W) tensors into consecutive batch slots.
Tensor4 stack_batch(const std::vector<Tensor4>& items) {
  const Tensor4& first = items.front();
  Tensor4 out(static_cast<int>(items.size()), first.c(), first.h(), first.w());
  const std::size_t per = first.size();
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (!items[i].same_shape(first)) {
      throw InvalidArgument("batch items differ in shape");
    }
    std::copy(items[i].data().begin(), items[i].data().end(),
              out.data().begin() + static_cast<std::ptrdiff_t>(i * per));
  }
  return out;
}

void check_dataset(const Dataset& dataset, const Eigen::MatrixXd& pinv) {
  if (dataset.pairs.empty()) throw InvalidArgument("dataset is empty");
  const AbundancePair& first = dataset.pairs.front();
  for (std::size_t i = 0; i < dataset.pairs.size(); ++i) {
    const AbundancePair& p = dataset.pairs[i];
    if (!p.lr.same_shape(first.lr) || !p.hr.same_shape(first.hr)) {
      throw InvalidArgument("dataset sample " + std::to_string(i) +
                            " differs in shape from sample 0");
    }
  }
  if (pinv.cols() != first.lr.channels()) {
    throw InvalidArgument("pseudo-inverse has " + std::to_string(pinv.cols()) +
                          " columns but the dataset has " +
                          std::to_string(first.lr.channels()) + " materials");
  }
}

}  // namespace

void TrainConfig::validate() const {
  if (epochs < 0 || batch_size < 1 || patch_size < 1 || !(learning_rate > 0.0) ||
      features < 1 || blocks < 0) {
    throw InvalidArgument("training configuration values must be positive");
  }
}

double evaluate_l1(const NetworkParams& params, const Dataset& dataset) {
  const int scale = dataset.degradation.scale;
  double total = 0.0;
  for (const AbundancePair& pair : dataset.pairs) {
    const Tensor4 input = Tensor4::from_raster(build_input_stack(pair.lr, 0.0));
    const Tensor4 out = forward(params, input, scale);
    total += l1_loss_forward(out, Tensor4::from_raster(pair.hr));
  }
  return total / static_cast<double>(dataset.pairs.size());
}

TrainResult train(const Dataset& dataset, const TrainConfig& train_config,
                  const NoiseConfig& noise_config, const Eigen::MatrixXd& pinv,
                  const EpochCallback& on_epoch) {
  train_config.validate();
  noise_config.validate();
  check_dataset(dataset, pinv);

  const int scale = dataset.degradation.scale;
  const int lr_h = dataset.pairs.front().lr.height();
  const int lr_w = dataset.pairs.front().lr.width();
  const int patch_h = std::min(train_config.patch_size, lr_h);
  const int patch_w = std::min(train_config.patch_size, lr_w);

  NetworkShape shape;
  shape.materials = dataset.pairs.front().lr.channels();
  shape.features = train_config.features;
  shape.blocks = train_config.blocks;

  TrainResult result;
  result.params = init_params(shape, train_config.seed);
  AdamState adam(result.params.values().size(), train_config.learning_rate);

  result.log.push_back({0, evaluate_l1(result.params, dataset)});
  if (on_epoch) on_epoch(result.log.back());

  const std::size_t count = dataset.pairs.size();
  std::vector<std::size_t> order(count);
  for (int epoch = 1; epoch <= train_config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng shuffle_rng = make_rng(train_config.seed,
                               {kShuffleStream, static_cast<std::uint64_t>(epoch)});
    std::shuffle(order.begin(), order.end(), shuffle_rng);

    double loss_sum = 0.0;
    std::size_t steps = 0;
    for (std::size_t start = 0; start < count;
         start += static_cast<std::size_t>(train_config.batch_size)) {
      const std::size_t stop =
          std::min(count, start + static_cast<std::size_t>(train_config.batch_size));
      std::vector<Tensor4> inputs;
      std::vector<Tensor4> targets;
      for (std::size_t k = start; k < stop; ++k) {
        const std::size_t idx = order[k];
        const AbundancePair& pair = dataset.pairs[idx];
        Rng crop_rng = make_rng(train_config.seed,
                                {kCropStream, static_cast<std::uint64_t>(epoch), k});
        const int row = std::uniform_int_distribution<int>(0, lr_h - patch_h)(crop_rng);
        const int col = std::uniform_int_distribution<int>(0, lr_w - patch_w)(crop_rng);
        AbundancePair patch{
            crop(pair.hr, row * scale, col * scale, patch_h * scale, patch_w * scale),
            crop(pair.lr, row, col, patch_h, patch_w)};
        Rng noise_rng = make_rng(train_config.seed,
                                 {kNoiseStream, static_cast<std::uint64_t>(epoch), idx});
        TrainingSample sample = prepare_training_sample(
            patch, dataset.noisy.at(idx), noise_config, pinv, noise_rng);
        inputs.push_back(Tensor4::from_raster(sample.input));
        targets.push_back(Tensor4::from_raster(sample.target));
      }
      const Tensor4 input = stack_batch(inputs);
      const Tensor4 target = stack_batch(targets);
      const ForwardTrace trace = forward_trace(result.params, input, scale);
      loss_sum += l1_loss_forward(trace.output, target);
      ++steps;
      const NetworkGrads grads = backward(
          result.params, trace, l1_loss_backward(trace.output, target), false);
      adam_step(result.params.values(), grads.params, adam);
    }
    result.log.push_back({epoch, loss_sum / static_cast<double>(steps)});
    if (on_epoch) on_epoch(result.log.back());
  }
  return result;
}

TrainResult train(const std::filesystem::path& dataset_dir,
                  const TrainConfig& train_config,
                  const NoiseConfig& noise_config, const Eigen::MatrixXd& pinv,
                  const EpochCallback& on_epoch) {
  return train(load_dataset(dataset_dir), train_config, noise_config, pinv,
               on_epoch);
}

AbundanceMap super_resolve(const NetworkParams& params, const AbundanceMap& a_lr,
                           double sigma_hint, int scale) {
  if (a_lr.channels() != params.shape().materials) {
    throw InvalidArgument("abundance map has " + std::to_string(a_lr.channels()) +
                          " materials, network was trained for " +
                          std::to_string(params.shape().materials));
  }
  const Tensor4 input = Tensor4::from_raster(build_input_stack(a_lr, sigma_hint));
  return forward(params, input, scale).to_raster<AbundanceTag>();
}

}  // namespace hsisr
