#ifndef HSISR_RASTER_H_
#define HSISR_RASTER_H_

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hsisr/error.h"

namespace hsisr {

// A height x width x channels block of reals stored band-interleaved by
// pixel: the channel index is innermost. The tag keeps spectral cubes,
// abundance maps and network input stacks from being mixed up by accident.
template <typename Tag>
class Raster {
 public:
  Raster() = default;

  Raster(int height, int width, int channels, double fill = 0.0)
      : height_(height), width_(width), channels_(channels) {
    check_dims();
    data_.assign(static_cast<std::size_t>(height) * width * channels, fill);
  }

  Raster(int height, int width, int channels, std::vector<double> data)
      : height_(height), width_(width), channels_(channels),
        data_(std::move(data)) {
    check_dims();
    if (data_.size() != static_cast<std::size_t>(height) * width * channels) {
      throw InvalidArgument("raster data length " +
                            std::to_string(data_.size()) +
                            " does not match dimensions " + shape_string());
    }
    for (std::size_t i = 0; i < data_.size(); ++i) {
      if (!std::isfinite(data_[i])) {
        throw InvalidArgument("raster value at index " + std::to_string(i) +
                              " is not finite");
      }
    }
  }

  int height() const { return height_; }
  int width() const { return width_; }
  int channels() const { return channels_; }
  std::size_t pixel_count() const {
    return static_cast<std::size_t>(height_) * width_;
  }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(int row, int col, int channel) {
    return data_[index(row, col, channel)];
  }
  double operator()(int row, int col, int channel) const {
    return data_[index(row, col, channel)];
  }

  std::span<double> pixel(int row, int col) {
    return {data_.data() + index(row, col, 0),
            static_cast<std::size_t>(channels_)};
  }
  std::span<const double> pixel(int row, int col) const {
    return {data_.data() + index(row, col, 0),
            static_cast<std::size_t>(channels_)};
  }
  std::span<double> pixel(std::size_t p) {
    return {data_.data() + p * channels_, static_cast<std::size_t>(channels_)};
  }
  std::span<const double> pixel(std::size_t p) const {
    return {data_.data() + p * channels_, static_cast<std::size_t>(channels_)};
  }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  std::vector<double> release() && { return std::move(data_); }

  template <typename OtherTag>
  bool same_shape(const Raster<OtherTag>& other) const {
    return height_ == other.height() && width_ == other.width() &&
           channels_ == other.channels();
  }

  std::string shape_string() const {
    return std::to_string(height_) + "x" + std::to_string(width_) + "x" +
           std::to_string(channels_);
  }

  friend bool operator==(const Raster& a, const Raster& b) = default;

 private:
  std::size_t index(int row, int col, int channel) const {
    return (static_cast<std::size_t>(row) * width_ + col) * channels_ + channel;
  }

  void check_dims() const {
    if (height_ < 1 || width_ < 1 || channels_ < 1) {
      throw InvalidArgument("raster dimensions must be positive, got " +
                            shape_string());
    }
  }

  int height_ = 0;
  int width_ = 0;
  int channels_ = 0;
  std::vector<double> data_;
};

struct SpectralTag {};
struct AbundanceTag {};
struct StackTag {};

// H x W x L reflectance cube.
using SpectralCube = Raster<SpectralTag>;
// h x w x M per-pixel material proportions.
using AbundanceMap = Raster<AbundanceTag>;
// h x w x (M+1) network input: abundances plus a constant noise-level channel.
using InputStack = Raster<StackTag>;

// Reinterprets the values of one raster kind as another.
template <typename To, typename From>
Raster<To> raster_cast(Raster<From> from) {
  const int h = from.height();
  const int w = from.width();
  const int c = from.channels();
  return Raster<To>(h, w, c, std::move(from).release());
}

}  // namespace hsisr

#endif  // HSISR_RASTER_H_
