#ifndef DDP_TENSOR_HPP
#define DDP_TENSOR_HPP

#include <span>
#include <vector>

namespace ddp {

// Minimal dense row-major containers; all shapes in this library are small
// and regular, so nothing fancier is warranted.

struct Matrix {
  int rows = 0, cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(int r, int c, double fill = 0.0)
      : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, fill) {}

  double& operator()(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
  double operator()(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }

  std::span<double> row(int r) { return {data.data() + static_cast<std::size_t>(r) * cols, static_cast<std::size_t>(cols)}; }
  std::span<const double> row(int r) const { return {data.data() + static_cast<std::size_t>(r) * cols, static_cast<std::size_t>(cols)}; }

  bool same_shape(const Matrix& other) const { return rows == other.rows && cols == other.cols; }
};

struct Tensor3 {
  int d0 = 0, d1 = 0, d2 = 0;
  std::vector<double> data;

  Tensor3() = default;
  Tensor3(int a, int b, int c, double fill = 0.0)
      : d0(a), d1(b), d2(c), data(static_cast<std::size_t>(a) * b * c, fill) {}

  double& operator()(int a, int b, int c) {
    return data[(static_cast<std::size_t>(a) * d1 + b) * d2 + c];
  }
  double operator()(int a, int b, int c) const {
    return data[(static_cast<std::size_t>(a) * d1 + b) * d2 + c];
  }

  // Contiguous slice along the last axis.
  std::span<double> row(int a, int b) {
    return {data.data() + (static_cast<std::size_t>(a) * d1 + b) * d2, static_cast<std::size_t>(d2)};
  }
  std::span<const double> row(int a, int b) const {
    return {data.data() + (static_cast<std::size_t>(a) * d1 + b) * d2, static_cast<std::size_t>(d2)};
  }

  bool same_shape(const Tensor3& other) const {
    return d0 == other.d0 && d1 == other.d1 && d2 == other.d2;
  }
};

double tensor_dot(const Tensor3& a, const Tensor3& b);
double matrix_dot(const Matrix& a, const Matrix& b);

}  // namespace ddp

#endif
