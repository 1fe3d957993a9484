#include "ddp/tensor.hpp"

#include <stdexcept>

namespace ddp {

double tensor_dot(const Tensor3& a, const Tensor3& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("tensor_dot: shape mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) acc += a.data[i] * b.data[i];
  return acc;
}

double matrix_dot(const Matrix& a, const Matrix& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("matrix_dot: shape mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) acc += a.data[i] * b.data[i];
  return acc;
}

}  // namespace ddp
