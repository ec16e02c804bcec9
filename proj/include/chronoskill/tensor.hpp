#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "chronoskill/error.hpp"

namespace chronoskill {

// Dense row-major array of doubles. Rank 1 for vectors, rank 2 for matrices;
// nothing higher is needed for the policy/value MLPs.
class Tensor {
 public:
  Tensor() = default;

  explicit Tensor(std::vector<int> shape) : shape_(std::move(shape)) {
    data_.assign(checked_size(shape_), 0.0);
  }

  Tensor(std::vector<int> shape, std::vector<double> data)
      : shape_(std::move(shape)), data_(std::move(data)) {
    if (static_cast<std::int64_t>(data_.size()) != checked_size(shape_)) {
      throw DimensionError("tensor data length " + std::to_string(data_.size()) +
                           " does not match shape " + shape_str(shape_));
    }
  }

  static Tensor scalar(double v) { return Tensor({1}, {v}); }

  static Tensor vec(std::vector<double> v) {
    const int n = static_cast<int>(v.size());
    return Tensor({n}, std::move(v));
  }

  static Tensor matrix(int rows, int cols, std::vector<double> v) {
    return Tensor({rows, cols}, std::move(v));
  }

  static Tensor zeros_like(const Tensor& t) { return Tensor(t.shape_); }

  int rank() const { return static_cast<int>(shape_.size()); }
  const std::vector<int>& shape() const { return shape_; }
  int dim(int i) const { return shape_.at(static_cast<std::size_t>(i)); }
  std::int64_t size() const { return static_cast<std::int64_t>(data_.size()); }

  int rows() const { return rank() == 2 ? shape_[0] : dim_error("rows"); }
  int cols() const { return rank() == 2 ? shape_[1] : dim_error("cols"); }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::vector<double>& values() { return data_; }
  const std::vector<double>& values() const { return data_; }

  double operator[](std::int64_t i) const { return data_[static_cast<std::size_t>(i)]; }
  double& operator[](std::int64_t i) { return data_[static_cast<std::size_t>(i)]; }

  double at(int r, int c) const { return data_[idx(r, c)]; }
  double& at(int r, int c) { return data_[idx(r, c)]; }

  bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }

  bool all_finite() const {
    for (double v : data_) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  }

  std::string shape_str() const { return shape_str(shape_); }

  bool operator==(const Tensor& o) const = default;

  static std::string shape_str(const std::vector<int>& s) {
    std::string out = "[";
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (i) out += ",";
      out += std::to_string(s[i]);
    }
    return out + "]";
  }

 private:
  std::size_t idx(int r, int c) const {
    return static_cast<std::size_t>(r) * static_cast<std::size_t>(shape_[1]) +
           static_cast<std::size_t>(c);
  }

  static std::int64_t checked_size(const std::vector<int>& shape) {
    std::int64_t n = 1;
    for (int d : shape) {
      if (d <= 0) throw DimensionError("non-positive dimension in shape " + shape_str(shape));
      n *= d;
    }
    return n;
  }

  [[noreturn]] int dim_error(const char* what) const {
    throw DimensionError(std::string(what) + "() requires a rank-2 tensor, got shape " +
                         shape_str());
  }

  std::vector<int> shape_;
  std::vector<double> data_;
};

}  // namespace chronoskill
