#ifndef HSISR_TRAINER_H_
#define HSISR_TRAINER_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "hsisr/deadleaves.h"
#include "hsisr/network.h"
#include "hsisr/noise.h"

namespace hsisr {

struct TrainConfig {
  int epochs = 200;
  int batch_size = 1;
  int patch_size = 16;  // LR patch side; the HR crop is patch_size * scale
  double learning_rate = 1e-4;
  std::uint64_t seed = 0;
  int features = 32;
  int blocks = 4;

  void validate() const;
};

struct EpochLog {
  int epoch = 0;
  double mean_l1 = 0.0;
};

struct TrainResult {
  NetworkParams params;
  // Entry 0 is the untrained network on the full clean dataset (the bicubic
  // baseline); entries 1..epochs are mean training losses.
  std::vector<EpochLog> log;
};

using EpochCallback = std::function<void(const EpochLog&)>;

// Each epoch visits the samples in a seeded shuffle, crops an aligned LR/HR
// patch, builds the input with prepare_training_sample, and takes one Adam
// step per batch on the L1 loss. Random streams for initialization, shuffles,
// crops and noise are separate, so runs that differ only in noise mode see
// the same weights at start, the same sample order and the same crops.
TrainResult train(const Dataset& dataset, const TrainConfig& train_config,
                  const NoiseConfig& noise_config, const Eigen::MatrixXd& pinv,
                  const EpochCallback& on_epoch = {});

TrainResult train(const std::filesystem::path& dataset_dir,
                  const TrainConfig& train_config,
                  const NoiseConfig& noise_config, const Eigen::MatrixXd& pinv,
                  const EpochCallback& on_epoch = {});

// Mean over samples of the L1 error between the network output for the
// clean full-size LR map (sigma channel 0) and the HR target.
double evaluate_l1(const NetworkParams& params, const Dataset& dataset);

// Runs the network on stack(a_lr, sigma_hint).
AbundanceMap super_resolve(const NetworkParams& params, const AbundanceMap& a_lr,
                           double sigma_hint, int scale);

}  // namespace hsisr

#endif  // HSISR_TRAINER_H_
