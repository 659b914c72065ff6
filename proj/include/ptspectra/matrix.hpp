#pragma once

#include <cassert>
#include <complex>
#include <cstddef>
#include <vector>

namespace ptspectra {

/// Dense row-major square matrix.
template <class T>
class SquareMatrix {
 public:
  SquareMatrix() = default;
  explicit SquareMatrix(std::size_t n, T fill = T{}) : n_(n), data_(n * n, fill) {}

  std::size_t size() const { return n_; }

  T& operator()(std::size_t r, std::size_t c) {
    assert(r < n_ && c < n_);
    return data_[r * n_ + c];
  }
  const T& operator()(std::size_t r, std::size_t c) const {
    assert(r < n_ && c < n_);
    return data_[r * n_ + c];
  }

  T* row(std::size_t r) { return data_.data() + r * n_; }
  const T* row(std::size_t r) const { return data_.data() + r * n_; }

  /// Top-left m×m block.
  SquareMatrix block(std::size_t m) const {
    assert(m <= n_);
    SquareMatrix out(m);
    for (std::size_t r = 0; r < m; ++r)
      for (std::size_t c = 0; c < m; ++c) out(r, c) = (*this)(r, c);
    return out;
  }

  friend bool operator==(const SquareMatrix&, const SquareMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<T> data_;
};

using RealMatrix = SquareMatrix<double>;
using ComplexMatrix = SquareMatrix<std::complex<double>>;

}  // namespace ptspectra
