#ifndef DDP_DAG_DP_HPP
#define DDP_DAG_DP_HPP

#include <span>
#include <vector>

#include "ddp/dag.hpp"
#include "ddp/regularizer.hpp"
#include "ddp/smoothed_max.hpp"

namespace ddp {

// Unregularized highest-scoring path, computed by the classic max recursion
// with backtracking.  Ties are broken toward the lowest parent index; `unique`
// reports whether the optimum is attained by exactly one path.
struct HardPath {
  double value = 0.0;
  std::vector<int> nodes;  // start .. end
  bool unique = true;
};

HardPath hard_value_and_path(const Dag& dag);

// Smoothed value: v_0 = 0, v_i = max_omega over parents of (weight + v_parent),
// evaluated in index order.  O(|E|).
double dp_value(const Dag& dag, const Regularizer& reg);

// Forward pass with recorded local gradients, then the reverse-topological
// backward recursion.  `expected` is the gradient of dp_value with respect to
// the edge weights (the expected path), `node_marginals` its per-node
// marginalization, `transitions` the local gradients q (each row over parents
// is a probability vector).
struct DpGradient {
  double value = 0.0;
  EdgeValues expected;
  std::vector<double> node_marginals;
  EdgeValues transitions;
  std::vector<double> node_values;  // forward values v_i, reused by callers
};

DpGradient dp_grad(const Dag& dag, const Regularizer& reg);

// Directional derivative <grad dp, Z> via the forward recursion
// vdot_i = sum_j q_ij (z_ij + vdot_j); requires the transitions recorded by
// dp_grad for the same dag and regularizer.
double dp_directional(const Dag& dag, const EdgeValues& z,
                      const EdgeValues& transitions);

// Hessian-vector product: forward pass accumulates the directional derivative
// and local curvature qdot = J(q)(z + vdot), backward pass applies the
// product rule to the gradient recursion.
struct DpHessianProduct {
  double directional = 0.0;
  EdgeValues product;
};

DpHessianProduct dp_hessian_product(const Dag& dag, const EdgeValues& z,
                                    const Regularizer& reg);

// Rounded limit of the expected path as gamma decreases over `gammas`.
// When the hard argmax is not unique the limit is ill-defined and `unique`
// is false with an empty indicator.
struct LimitPath {
  bool unique = false;
  EdgeValues indicator;
};

LimitPath vanishing_regularization_limit(const Dag& dag, RegKind kind,
                                         std::span<const double> gammas);

}  // namespace ddp

#endif
