#ifndef HSISR_CHECKPOINT_H_
#define HSISR_CHECKPOINT_H_

#include <filesystem>

#include "json.hpp"

#include "hsisr/network.h"
#include "hsisr/noise.h"
#include "hsisr/trainer.h"

namespace hsisr {

struct Checkpoint {
  NetworkParams params;
  int scale = 2;
  TrainConfig train;
  NoiseConfig noise;
};

// <stem>.json: manifest with architecture, layer names/shapes/offsets in blob
// order, scale, hyperparameters and seed. <stem>.raw: little-endian float32
// parameters, concatenated in manifest order.
void save_checkpoint(const Checkpoint& checkpoint,
                     const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

// Training log, one {"epoch", "mean_l1"} object per line.
void save_training_log(const std::vector<EpochLog>& log,
                       const std::filesystem::path& path);

}  // namespace hsisr

#endif  // HSISR_CHECKPOINT_H_
