#ifndef HSISR_NOISE_H_
#define HSISR_NOISE_H_

#include <string_view>

#include <Eigen/Dense>

#include "hsisr/deadleaves.h"
#include "hsisr/random.h"
#include "hsisr/raster.h"

namespace hsisr {

// Clean: never corrupted. Noisy: every sample corrupted, sigma channel set.
// HalfMix: flagged samples corrupted, sigma channel kept at 0.
// StdAware: flagged samples corrupted, true sigma in the extra channel.
enum class NoiseMode { kClean, kNoisy, kHalfMix, kStdAware };

NoiseMode parse_noise_mode(std::string_view name);
std::string_view to_string(NoiseMode mode);

struct NoiseConfig {
  // Spectral-domain standard deviation ceiling on unit-range data
  // (1e-3 is a 60 dB PSNR corruption).
  double sigma_max = 1e-3;
  // Rate of the exponential subtracted from sigma_max.
  double lambda = 2e3;
  NoiseMode mode = NoiseMode::kStdAware;

  void validate() const;
};

// sigma = sigma_max - Exp(lambda), redrawn until positive. Throws
// InvalidArgument when the acceptance probability 1 - exp(-lambda sigma_max)
// is below 1e-6.
double sample_sigma(const NoiseConfig& config, Rng& rng);

// Abundance-space image of white spectral noise: per pixel draw L iid
// N(0, sigma^2) values and multiply by the L x M pseudo-inverse.
AbundanceMap abundance_noise(int height, int width, double sigma,
                             const Eigen::MatrixXd& pinv, Rng& rng);

// Channels 0..M-1 = abundances, channel M = sigma everywhere.
InputStack build_input_stack(const AbundanceMap& abundances, double sigma);

// Drops the trailing noise-level channel.
AbundanceMap strip_noise_channel(const InputStack& stack);

struct TrainingSample {
  InputStack input;
  AbundanceMap target;
  double sigma = 0.0;
  bool corrupted = false;
};

// Builds one network input/target pair according to the noise mode. The
// target is always the clean high-resolution map.
TrainingSample prepare_training_sample(const AbundancePair& pair,
                                       bool flag_noisy,
                                       const NoiseConfig& config,
                                       const Eigen::MatrixXd& pinv, Rng& rng);

}  // namespace hsisr

#endif  // HSISR_NOISE_H_
