#ifndef DDP_LOSSES_HPP
#define DDP_LOSSES_HPP

#include <optional>
#include <span>

#include "ddp/dag.hpp"
#include "ddp/dag_dp.hpp"
#include "ddp/dtw.hpp"
#include "ddp/regularizer.hpp"
#include "ddp/tensor.hpp"
#include "ddp/viterbi.hpp"

namespace ddp {

// Structured losses built on the value and gradient layers.  Every loss
// returns both its scalar value and its gradient with respect to the
// potentials (or, for the area loss, the soft alignment).

// Convex surrogate on a generic DAG:
//
//   loss = dp_value(theta + C) - <Y_true, theta>
//   grad = expected_path(theta + C) - Y_true
//
// With C = 0 and negentropy this is the negative log-likelihood of Y_true
// under the Gibbs path distribution.  Without a regularizer (gamma = 0, the
// hard max) and an additive cost C it is the structured hinge loss, whose
// "gradient" is the cost-augmented argmax subgradient.
struct DagLoss {
  double loss = 0.0;
  EdgeValues grad;
};

DagLoss surrogate_loss(const Dag& dag, const EdgeValues& y_true,
                       const EdgeValues& cost,
                       const std::optional<Regularizer>& reg);

// Same construction on the Viterbi trellis; y_true is the tag sequence.
struct SequenceLoss {
  double loss = 0.0;
  Tensor3 grad;
};

SequenceLoss viterbi_surrogate_loss(const Tensor3& theta,
                                    std::span<const int> y_true,
                                    const Tensor3* cost,
                                    const std::optional<Regularizer>& reg);

// 0/1 tensor encoding of a tag sequence (mass at j = 0 for t = 0).
Tensor3 sequence_indicator(int t_len, int s_len, std::span<const int> y_true);

// Hamming cost augmentation: c(t,i,j) = 1 when i differs from the true tag
// at time t, independent of j.  <C, Y_true> = 0 by construction.
Tensor3 hamming_cost(int t_len, int s_len, std::span<const int> y_true);

enum class Divergence { SquaredL2, KL };

// Relaxed loss between state marginals: divergence applied row-wise between
// the one-hot marginals of y_true and the predicted state marginals.  The
// theta gradient chains through one Hessian-vector product.
SequenceLoss relaxed_marginal_loss(std::span<const int> y_true,
                                   const Tensor3& theta,
                                   const Regularizer& reg,
                                   Divergence divergence);

// Area loss between alignments: || L (E - Y_true)^T ||_F^2 with L the lower
// triangular all-ones matrix; on hard function-like alignments this is the
// discrete area between the two staircase paths.
struct AlignmentLoss {
  double loss = 0.0;
  Matrix grad;  // with respect to the soft alignment E
};

AlignmentLoss area_loss(const Matrix& y_true, const Matrix& soft_alignment);

// Full area loss of a cost matrix: evaluates the soft alignment at theta and
// chains the gradient through dtw_hessian_product.
struct DtwLoss {
  double loss = 0.0;
  Matrix grad;  // with respect to theta
};

DtwLoss dtw_area_loss(const Matrix& y_true, const Matrix& theta,
                      const Regularizer& reg);

}  // namespace ddp

#endif
