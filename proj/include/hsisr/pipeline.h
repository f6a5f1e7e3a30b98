#ifndef HSISR_PIPELINE_H_
#define HSISR_PIPELINE_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "hsisr/deadleaves.h"
#include "hsisr/metrics.h"
#include "hsisr/noise.h"
#include "hsisr/trainer.h"
#include "hsisr/unmixing.h"

namespace hsisr {

// Effective configuration of a full run. Scale and material count are
// shared by every stage; stage seeds are derived from the master seed.
struct PipelineConfig {
  int scale = 2;
  int materials = kDefaultMaterials;
  int dataset_size = 200;
  std::uint64_t seed = 0;
  UnmixingBackend backend = UnmixingBackend::kMinVol;

  // Generator: HR leaf-map size and noisy-sample fraction. Values always come
  // from the empirical distribution of the unmixed A_LR.
  int dl_height = 64;
  int dl_width = 64;
  double noisy_fraction = 0.5;

  std::optional<double> blur_sigma;  // defaults to the scale
  NoiseConfig noise;
  TrainConfig train;
  double sigma_hint = 0.0;

  std::filesystem::path input;      // HSI_LR cube
  std::filesystem::path reference;  // optional HSI_HR cube for evaluation
  std::filesystem::path out = "run";

  void validate() const;
  DegradationSpec degradation() const {
    return DegradationSpec::for_scale(scale, blur_sigma);
  }
  std::uint64_t generator_seed() const;
  std::uint64_t train_seed() const;
};

nlohmann::ordered_json to_json(const PipelineConfig& config);
// Fields missing from `j` keep the values already in `base`; unknown keys
// are rejected.
PipelineConfig pipeline_config_from_json(const nlohmann::ordered_json& j,
                                         PipelineConfig base = {});
PipelineConfig load_pipeline_config(const std::filesystem::path& path);

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

struct PipelineResult {
  nlohmann::ordered_json manifest;
  std::string manifest_hash;
  std::vector<EpochLog> log;
  std::optional<MetricReport> report;    // pipeline output vs reference
  std::optional<MetricReport> baseline;  // bicubic-upsampled input vs reference
};

// unmix -> gen-dl -> train -> sr -> reconstruct -> eval. Artifacts go under
// config.out; <out>/manifest.json records seeds, the config hash and every
// artifact with its hash. A failing stage throws the original error kind
// with the stage name prepended; earlier artifacts stay on disk.
PipelineResult run_pipeline(const PipelineConfig& config,
                            const EpochCallback& on_epoch = {});

}  // namespace hsisr

#endif  // HSISR_PIPELINE_H_
