#ifndef DDP_VITERBI_HPP
#define DDP_VITERBI_HPP

#include <span>
#include <string>
#include <vector>

#include "ddp/regularizer.hpp"
#include "ddp/tensor.hpp"

namespace ddp {

// Smoothed Viterbi over the sequence trellis, specialized O(T*S^2) passes.
//
// Potentials are a T x S x S tensor: theta(t, i, j) scores state i at time t
// given state j at time t-1.  The walk starts in a fixed virtual state, which
// the tensor encodes by keeping the t = 0 slice constant in j; internally the
// first step reads column j = 0 only, so that exactly one start node exists.
// A virtual terminal smoothed max over the last layer closes the trellis.

// Throws std::invalid_argument unless theta is a valid potential tensor
// (square state axes, finite entries, t = 0 slice constant in j).
void validate_potentials(const Tensor3& theta);

double viterbi_value(const Tensor3& theta, const Regularizer& reg);

// Value, edge marginals (the gradient of viterbi_value w.r.t. theta) and the
// forward/backward state reused by the Hessian pass.  Marginals satisfy
// sum_{i,j} e(t,i,j) = 1 per t and the time-consistency flow identity.
struct ViterbiGradient {
  double value = 0.0;
  Tensor3 marginals;              // T x S x S
  Tensor3 transitions;            // q, T x S x S (t = 0 mass sits at j = 0)
  std::vector<double> terminal;   // gradient of the closing smoothed max
  Matrix state_occupancy;         // u, T x S: probability of state i at time t
};

ViterbiGradient viterbi_grad(const Tensor3& theta, const Regularizer& reg);

struct ViterbiHessianProduct {
  double directional = 0.0;  // <grad, Z>
  Tensor3 product;           // Hessian of viterbi_value applied to Z
};

ViterbiHessianProduct viterbi_hessian_product(const Tensor3& theta,
                                              const Tensor3& z,
                                              const Regularizer& reg);

// Row sums over the predecessor axis: p(t, i) = sum_j e(t, i, j).
Matrix state_marginals(const Tensor3& marginals);

// Unregularized Viterbi with backtracking; ties toward the lowest state index.
struct HardSequence {
  double value = 0.0;
  std::vector<int> states;  // length T
};

HardSequence hard_viterbi(const Tensor3& theta);

// Linear potential construction: theta(t,i,j) = <w_i, x_t> + b_i + trans(i,j)
// for t > 0 and theta(0,i,j) = <w_i, x_0> + b_i.
Tensor3 linear_potentials(const Matrix& x, const Matrix& w,
                          std::span<const double> b, const Matrix& trans);

// JSON document {"T": ..., "S": ..., "theta": nested T x S x S array}.
Tensor3 parse_potentials_json(const std::string& text);
Tensor3 load_potentials_file(const std::string& path);

}  // namespace ddp

#endif
