#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "pixellink/error.hpp"

namespace pixellink {

/// Dense row-major array with 1 to 4 dimensions.
///
/// Score maps are H x W (pixel) or H x W x 8 (link); logits add a trailing
/// class axis of extent 2. The file format stores f32, but the loss stack is
/// evaluated in double, hence the element type parameter.
template <typename T>
class BasicTensor {
 public:
  using value_type = T;

  BasicTensor() = default;

  explicit BasicTensor(std::vector<std::size_t> dims, T fill = T{})
      : dims_(std::move(dims)) {
    check_dims(dims_);
    data_.assign(element_count(dims_), fill);
  }

  BasicTensor(std::vector<std::size_t> dims, std::vector<T> data)
      : dims_(std::move(dims)), data_(std::move(data)) {
    check_dims(dims_);
    if (data_.size() != element_count(dims_)) {
      throw Error(ErrorCode::ShapeMismatch,
                  "data length " + std::to_string(data_.size()) + " does not match dims");
    }
  }

  const std::vector<std::size_t>& dims() const noexcept { return dims_; }
  std::size_t ndim() const noexcept { return dims_.size(); }
  std::size_t dim(std::size_t i) const { return dims_.at(i); }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  std::span<T> data() noexcept { return data_; }
  std::span<const T> data() const noexcept { return data_; }
  std::vector<T>& storage() noexcept { return data_; }
  const std::vector<T>& storage() const noexcept { return data_; }

  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  T& operator()(std::size_t y, std::size_t x) { return data_[y * dims_[1] + x]; }
  const T& operator()(std::size_t y, std::size_t x) const { return data_[y * dims_[1] + x]; }

  T& operator()(std::size_t y, std::size_t x, std::size_t c) {
    return data_[(y * dims_[1] + x) * dims_[2] + c];
  }
  const T& operator()(std::size_t y, std::size_t x, std::size_t c) const {
    return data_[(y * dims_[1] + x) * dims_[2] + c];
  }

  T& operator()(std::size_t y, std::size_t x, std::size_t k, std::size_t c) {
    return data_[((y * dims_[1] + x) * dims_[2] + k) * dims_[3] + c];
  }
  const T& operator()(std::size_t y, std::size_t x, std::size_t k, std::size_t c) const {
    return data_[((y * dims_[1] + x) * dims_[2] + k) * dims_[3] + c];
  }

  template <typename U>
  BasicTensor<U> cast() const {
    return BasicTensor<U>(dims_, std::vector<U>(data_.begin(), data_.end()));
  }

  friend bool operator==(const BasicTensor&, const BasicTensor&) = default;

  static std::size_t element_count(const std::vector<std::size_t>& dims) {
    return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
  }

 private:
  static void check_dims(const std::vector<std::size_t>& dims) {
    if (dims.empty() || dims.size() > 4) {
      throw Error(ErrorCode::ShapeMismatch, "tensor must have 1 to 4 dimensions");
    }
    for (auto d : dims) {
      if (d == 0) throw Error(ErrorCode::ShapeMismatch, "tensor extents must be >= 1");
    }
  }

  std::vector<std::size_t> dims_;
  std::vector<T> data_;
};

using Tensor = BasicTensor<float>;
using TensorD = BasicTensor<double>;

/// 8-bit raster, 1 (gray) or 3 (RGB) interleaved channels.
struct ImageBuffer {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = 1;
  std::vector<std::uint8_t> data;

  ImageBuffer() = default;
  ImageBuffer(std::size_t h, std::size_t w, std::size_t c, std::uint8_t fill = 0)
      : height(h), width(w), channels(c), data(h * w * c, fill) {}

  std::uint8_t& at(std::size_t y, std::size_t x, std::size_t c = 0) {
    return data[(y * width + x) * channels + c];
  }
  std::uint8_t at(std::size_t y, std::size_t x, std::size_t c = 0) const {
    return data[(y * width + x) * channels + c];
  }

  friend bool operator==(const ImageBuffer&, const ImageBuffer&) = default;
};

}  // namespace pixellink
