#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdlib>
#include <initializer_list>
#include <new>
#include <numeric>
#include <string>
#include <vector>

#include "ganchain/error.hpp"

namespace ganchain {

// 64-byte-aligned allocator. Keeping every buffer at the same alignment makes
// Eigen's vectorized kernels take identical code paths run to run, which the
// bit-reproducibility guarantees depend on.
template <typename T>
struct AlignedAlloc {
  using value_type = T;
  static constexpr size_t kAlign = 64;

  AlignedAlloc() = default;
  template <typename U>
  AlignedAlloc(const AlignedAlloc<U>&) {}

  T* allocate(size_t n) {
    if (n == 0) n = 1;
    size_t bytes = (n * sizeof(T) + kAlign - 1) / kAlign * kAlign;
    void* p = std::aligned_alloc(kAlign, bytes);
    if (!p) throw std::bad_alloc();
    return static_cast<T*>(p);
  }
  void deallocate(T* p, size_t) { std::free(p); }

  template <typename U>
  bool operator==(const AlignedAlloc<U>&) const {
    return true;
  }
};

template <typename S>
using AlignedVec = std::vector<S, AlignedAlloc<S>>;

// Dense row-major tensor of rank <= 4. Image batches are NHWC.
template <typename S>
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::initializer_list<int64_t> dims) { resize(dims); }
  explicit Tensor(const std::vector<int64_t>& dims) { resize(dims); }

  void resize(std::initializer_list<int64_t> dims) {
    resize(std::vector<int64_t>(dims));
  }
  void resize(const std::vector<int64_t>& dims) {
    if (dims.size() > 4) throw ShapeError("tensor rank > 4");
    rank_ = int(dims.size());
    int64_t n = 1;
    for (size_t i = 0; i < dims.size(); i++) {
      if (dims[i] < 0) throw ShapeError("negative dimension");
      dims_[i] = dims[i];
      n *= dims[i];
    }
    for (size_t i = dims.size(); i < 4; i++) dims_[i] = 1;
    data_.assign(size_t(n), S(0));
  }

  int rank() const { return rank_; }
  int64_t dim(int i) const { return dims_[size_t(i)]; }
  int64_t size() const { return int64_t(data_.size()); }
  bool empty() const { return data_.empty(); }

  std::vector<int64_t> shape() const {
    return std::vector<int64_t>(dims_.begin(), dims_.begin() + rank_);
  }

  S* data() { return data_.data(); }
  const S* data() const { return data_.data(); }
  AlignedVec<S>& vec() { return data_; }
  const AlignedVec<S>& vec() const { return data_; }

  S& operator[](int64_t i) { return data_[size_t(i)]; }
  const S& operator[](int64_t i) const { return data_[size_t(i)]; }

  // NHWC accessor.
  S& at(int64_t n, int64_t h, int64_t w, int64_t c) {
    return data_[size_t(((n * dims_[1] + h) * dims_[2] + w) * dims_[3] + c)];
  }
  const S& at(int64_t n, int64_t h, int64_t w, int64_t c) const {
    return data_[size_t(((n * dims_[1] + h) * dims_[2] + w) * dims_[3] + c)];
  }

  void fill(S v) { std::fill(data_.begin(), data_.end(), v); }

  // Reinterprets the buffer with a new shape of identical element count.
  void reshape(const std::vector<int64_t>& dims) {
    int64_t n = 1;
    for (int64_t d : dims) n *= d;
    if (n != size()) throw ShapeError("reshape changes element count");
    if (dims.size() > 4) throw ShapeError("tensor rank > 4");
    rank_ = int(dims.size());
    for (size_t i = 0; i < dims.size(); i++) dims_[i] = dims[i];
    for (size_t i = dims.size(); i < 4; i++) dims_[i] = 1;
  }

  bool same_shape(const Tensor& o) const {
    return rank_ == o.rank_ && dims_ == o.dims_;
  }

  std::string shape_str() const {
    std::string s = "[";
    for (int i = 0; i < rank_; i++) {
      if (i) s += ",";
      s += std::to_string(dims_[size_t(i)]);
    }
    return s + "]";
  }

  template <typename T>
  Tensor<T> cast() const {
    Tensor<T> out(shape());
    for (int64_t i = 0; i < size(); i++) out[i] = T(data_[size_t(i)]);
    return out;
  }

 private:
  std::array<int64_t, 4> dims_{1, 1, 1, 1};
  int rank_ = 0;
  AlignedVec<S> data_;
};

using TensorF = Tensor<float>;
using TensorD = Tensor<double>;

}  // namespace ganchain
