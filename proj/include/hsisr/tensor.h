#ifndef HSISR_TENSOR_H_
#define HSISR_TENSOR_H_

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "hsisr/error.h"
#include "hsisr/raster.h"

namespace hsisr {

// Dense N x C x H x W tensor, row-major (W innermost).
class Tensor4 {
 public:
  Tensor4() = default;
  Tensor4(int n, int c, int h, int w, double fill = 0.0)
      : n_(n), c_(c), h_(h), w_(w) {
    if (n < 1 || c < 1 || h < 1 || w < 1) {
      throw InvalidArgument("tensor dimensions must be positive, got " +
                            shape_string(n, c, h, w));
    }
    data_.assign(static_cast<std::size_t>(n) * c * h * w, fill);
  }

  int n() const { return n_; }
  int c() const { return c_; }
  int h() const { return h_; }
  int w() const { return w_; }
  std::size_t size() const { return data_.size(); }
  std::size_t plane_size() const { return static_cast<std::size_t>(h_) * w_; }

  double& operator()(int n, int c, int y, int x) { return data_[index(n, c, y, x)]; }
  double operator()(int n, int c, int y, int x) const {
    return data_[index(n, c, y, x)];
  }

  double* plane(int n, int c) { return data_.data() + index(n, c, 0, 0); }
  const double* plane(int n, int c) const { return data_.data() + index(n, c, 0, 0); }
  // All channels of sample n, contiguous.
  double* sample(int n) { return plane(n, 0); }
  const double* sample(int n) const { return plane(n, 0); }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  bool same_shape(const Tensor4& o) const {
    return n_ == o.n_ && c_ == o.c_ && h_ == o.h_ && w_ == o.w_;
  }
  std::string shape_string() const { return shape_string(n_, c_, h_, w_); }

  friend bool operator==(const Tensor4&, const Tensor4&) = default;

  // Raster (H, W, C) -> tensor (1, C, H, W) and back.
  template <typename Tag>
  static Tensor4 from_raster(const Raster<Tag>& r) {
    Tensor4 t(1, r.channels(), r.height(), r.width());
    for (int y = 0; y < r.height(); ++y) {
      for (int x = 0; x < r.width(); ++x) {
        for (int c = 0; c < r.channels(); ++c) t(0, c, y, x) = r(y, x, c);
      }
    }
    return t;
  }

  template <typename Tag>
  Raster<Tag> to_raster(int batch = 0) const {
    Raster<Tag> r(h_, w_, c_);
    for (int y = 0; y < h_; ++y) {
      for (int x = 0; x < w_; ++x) {
        for (int c = 0; c < c_; ++c) r(y, x, c) = (*this)(batch, c, y, x);
      }
    }
    return r;
  }

 private:
  static std::string shape_string(int n, int c, int h, int w) {
    return std::to_string(n) + "x" + std::to_string(c) + "x" +
           std::to_string(h) + "x" + std::to_string(w);
  }
  std::size_t index(int n, int c, int y, int x) const {
    return ((static_cast<std::size_t>(n) * c_ + c) * h_ + y) * w_ + x;
  }

  int n_ = 0;
  int c_ = 0;
  int h_ = 0;
  int w_ = 0;
  std::vector<double> data_;
};

}  // namespace hsisr

#endif  // HSISR_TENSOR_H_
