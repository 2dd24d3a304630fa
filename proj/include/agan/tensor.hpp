#ifndef AGAN_TENSOR_HPP
#define AGAN_TENSOR_HPP

#include <cstddef>
#include <initializer_list>
#include <new>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "agan/errors.hpp"

namespace agan {

/// 64-byte aligned storage. Keeping every tensor at the same alignment makes
/// Eigen's vectorized kernels take identical code paths run to run, which the
/// bit-level determinism contract depends on.
template <typename T>
struct AlignedAllocator {
  using value_type = T;
  static constexpr std::align_val_t kAlign{64};

  AlignedAllocator() = default;
  template <class U>
  AlignedAllocator(const AlignedAllocator<U>&) {}

  T* allocate(std::size_t n) {
    return static_cast<T*>(::operator new(n * sizeof(T), kAlign));
  }
  void deallocate(T* p, std::size_t) { ::operator delete(p, kAlign); }
  bool operator==(const AlignedAllocator&) const { return true; }
  bool operator!=(const AlignedAllocator&) const { return false; }
};

template <typename T>
using AlignedVec = std::vector<T, AlignedAllocator<T>>;

/// Dense row-major tensor with value semantics. Image batches are stored
/// [B, H, W, C]; matrices [rows, cols].
template <typename T>
class Tensor {
 public:
  Tensor() = default;

  explicit Tensor(std::vector<int> shape)
      : shape_(std::move(shape)), data_(count(shape_), T(0)) {}

  Tensor(std::vector<int> shape, std::vector<T> data)
      : shape_(std::move(shape)), data_(data.begin(), data.end()) {
    if (data_.size() != count(shape_))
      throw ArgumentError("tensor data size does not match shape");
  }

  static Tensor zeros(std::vector<int> shape) { return Tensor(std::move(shape)); }

  static Tensor full(std::vector<int> shape, T value) {
    Tensor t(std::move(shape));
    std::fill(t.data_.begin(), t.data_.end(), value);
    return t;
  }

  const std::vector<int>& shape() const { return shape_; }
  int ndim() const { return static_cast<int>(shape_.size()); }
  int dim(int i) const { return shape_.at(static_cast<std::size_t>(i)); }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }
  AlignedVec<T>& vec() { return data_; }
  const AlignedVec<T>& vec() const { return data_; }

  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }

  /// Returns a copy with a new shape of equal element count.
  Tensor reshaped(std::vector<int> shape) const {
    if (count(shape) != data_.size())
      throw ArgumentError("reshape changes element count");
    Tensor out;
    out.shape_ = std::move(shape);
    out.data_ = data_;
    return out;
  }

  void set_zero() { std::fill(data_.begin(), data_.end(), T(0)); }

  void add_scaled(const Tensor& other, T scale) {
    if (!same_shape(other)) throw ArgumentError("add_scaled shape mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i)
      data_[i] += scale * other.data_[i];
  }

  static std::size_t count(const std::vector<int>& shape) {
    std::size_t n = 1;
    for (int d : shape) {
      if (d < 0) throw ArgumentError("negative tensor dimension");
      n *= static_cast<std::size_t>(d);
    }
    return shape.empty() ? 0 : n;
  }

  static std::string shape_string(const std::vector<int>& shape) {
    std::string s = "[";
    for (std::size_t i = 0; i < shape.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(shape[i]);
    }
    return s + "]";
  }

 private:
  std::vector<int> shape_;
  AlignedVec<T> data_;
};

template <typename T>
void fill_normal(Tensor<T>& t, std::mt19937& rng, T mean, T stddev) {
  std::normal_distribution<T> dist(mean, stddev);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = dist(rng);
}

template <typename T>
void fill_uniform(Tensor<T>& t, std::mt19937& rng, T lo, T hi) {
  std::uniform_real_distribution<T> dist(lo, hi);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = dist(rng);
}

}  // namespace agan

#endif  // AGAN_TENSOR_HPP
