#pragma once

#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "avatarforge/errors.hpp"

namespace avatarforge {

// Dense row-major float32 tensor. The interchange file format is the flat
// little-endian payload plus a JSON sidecar carrying the shape; round trips
// are bit-exact.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<std::int64_t> shape) : shape_(std::move(shape)) {
    data_.assign(static_cast<std::size_t>(element_count(shape_)), 0.0f);
  }
  Tensor(std::vector<std::int64_t> shape, std::vector<float> data)
      : shape_(std::move(shape)), data_(std::move(data)) {
    if (static_cast<std::int64_t>(data_.size()) != element_count(shape_))
      throw Error(Errc::ShapeMismatch, "data size does not match shape");
  }

  static std::int64_t element_count(const std::vector<std::int64_t>& shape) {
    std::int64_t n = 1;
    for (std::int64_t d : shape) {
      if (d < 0) throw Error(Errc::ShapeMismatch, "negative dimension");
      n *= d;
    }
    return n;
  }

  const std::vector<std::int64_t>& shape() const { return shape_; }
  std::int64_t dim(std::size_t axis) const { return shape_.at(axis); }
  std::size_t size() const { return data_.size(); }
  const std::vector<float>& data() const { return data_; }
  std::vector<float>& data() { return data_; }

  float* begin() { return data_.data(); }
  const float* begin() const { return data_.data(); }

  // Rank-3 accessors; the hot paths in this project are (A, B, C) tensors.
  float& at3(std::int64_t a, std::int64_t b, std::int64_t c) {
    return data_[static_cast<std::size_t>((a * shape_[1] + b) * shape_[2] + c)];
  }
  float at3(std::int64_t a, std::int64_t b, std::int64_t c) const {
    return data_[static_cast<std::size_t>((a * shape_[1] + b) * shape_[2] + c)];
  }

  bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }
  bool operator==(const Tensor&) const = default;

 private:
  std::vector<std::int64_t> shape_;
  std::vector<float> data_;
};

// Writes `path` (raw little-endian float32) and `path`.json (shape sidecar).
void save_tensor(const Tensor& t, const std::string& path);
Tensor load_tensor(const std::string& path);

}  // namespace avatarforge
