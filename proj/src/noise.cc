#include "hsisr/noise.h"

#include <cmath>
#include <string>

#include "hsisr/error.h"

namespace hsisr {

NoiseMode parse_noise_mode(std::string_view name) {
  if (name == "clean") return NoiseMode::kClean;
  if (name == "noisy") return NoiseMode::kNoisy;
  if (name == "halfmix") return NoiseMode::kHalfMix;
  if (name == "stdaware") return NoiseMode::kStdAware;
  throw InvalidArgument("unknown noise mode \"" + std::string(name) +
                        "\" (expected clean, noisy, halfmix or stdaware)");
}

std::string_view to_string(NoiseMode mode) {
  switch (mode) {
    case NoiseMode::kClean:
      return "clean";
    case NoiseMode::kNoisy:
      return "noisy";
    case NoiseMode::kHalfMix:
      return "halfmix";
    case NoiseMode::kStdAware:
      return "stdaware";
  }
  return "clean";
}

void NoiseConfig::validate() const {
  if (!(sigma_max > 0.0) || !std::isfinite(sigma_max)) {
    throw InvalidArgument("sigma_max must be positive");
  }
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw InvalidArgument("lambda must be positive");
  }
}

double sample_sigma(const NoiseConfig& config, Rng& rng) {
  config.validate();
  const double acceptance = -std::expm1(-config.lambda * config.sigma_max);
  if (acceptance < 1e-6) {
    throw InvalidArgument("sigma sampler acceptance probability " +
                          std::to_string(acceptance) +
                          " is too small; raise lambda or sigma_max");
  }
  std::exponential_distribution<double> exp(config.lambda);
  while (true) {
    const double sigma = config.sigma_max - exp(rng);
    if (sigma > 0.0) return sigma;
  }
}

AbundanceMap abundance_noise(int height, int width, double sigma,
                             const Eigen::MatrixXd& pinv, Rng& rng) {
  if (!(sigma >= 0.0)) throw InvalidArgument("noise sigma must be >= 0");
  const auto bands = pinv.rows();
  const auto materials = pinv.cols();
  AbundanceMap out(height, width, static_cast<int>(materials));
  if (sigma == 0.0) return out;

  std::normal_distribution<double> gauss(0.0, sigma);
  Eigen::RowVectorXd spectral(bands);
  for (std::size_t p = 0; p < out.pixel_count(); ++p) {
    for (Eigen::Index l = 0; l < bands; ++l) spectral(l) = gauss(rng);
    const Eigen::RowVectorXd projected = spectral * pinv;
    auto px = out.pixel(p);
    for (Eigen::Index m = 0; m < materials; ++m) px[m] = projected(m);
  }
  return out;
}

InputStack build_input_stack(const AbundanceMap& abundances, double sigma) {
  if (!(sigma >= 0.0)) throw InvalidArgument("noise level must be >= 0");
  const int m = abundances.channels();
  InputStack stack(abundances.height(), abundances.width(), m + 1);
  for (std::size_t p = 0; p < abundances.pixel_count(); ++p) {
    const auto src = abundances.pixel(p);
    auto dst = stack.pixel(p);
    std::copy(src.begin(), src.end(), dst.begin());
    dst[m] = sigma;
  }
  return stack;
}

AbundanceMap strip_noise_channel(const InputStack& stack) {
  if (stack.channels() < 2) {
    throw InvalidArgument("input stack needs at least two channels");
  }
  const int m = stack.channels() - 1;
  AbundanceMap out(stack.height(), stack.width(), m);
  for (std::size_t p = 0; p < stack.pixel_count(); ++p) {
    const auto src = stack.pixel(p);
    std::copy(src.begin(), src.begin() + m, out.pixel(p).begin());
  }
  return out;
}

TrainingSample prepare_training_sample(const AbundancePair& pair,
                                       bool flag_noisy,
                                       const NoiseConfig& config,
                                       const Eigen::MatrixXd& pinv, Rng& rng) {
  if (pinv.cols() != pair.lr.channels()) {
    throw InvalidArgument("pseudo-inverse has " + std::to_string(pinv.cols()) +
                          " columns but the sample has " +
                          std::to_string(pair.lr.channels()) + " materials");
  }
  bool corrupt = false;
  bool expose_sigma = false;
  switch (config.mode) {
    case NoiseMode::kClean:
      break;
    case NoiseMode::kNoisy:
      corrupt = true;
      expose_sigma = true;
      break;
    case NoiseMode::kHalfMix:
      corrupt = flag_noisy;
      break;
    case NoiseMode::kStdAware:
      corrupt = flag_noisy;
      expose_sigma = flag_noisy;
      break;
  }

  TrainingSample sample;
  sample.target = pair.hr;
  sample.corrupted = corrupt;
  if (!corrupt) {
    sample.input = build_input_stack(pair.lr, 0.0);
    return sample;
  }
  sample.sigma = sample_sigma(config, rng);
  AbundanceMap noisy = abundance_noise(pair.lr.height(), pair.lr.width(),
                                       sample.sigma, pinv, rng);
  const auto clean = pair.lr.data();
  auto dst = noisy.data();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += clean[i];
  sample.input = build_input_stack(noisy, expose_sigma ? sample.sigma : 0.0);
  return sample;
}

}  // namespace hsisr
