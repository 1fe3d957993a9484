#include "ddp/losses.hpp"

#include <cmath>
#include <stdexcept>

namespace ddp {

namespace {

void check_path_structure(const Dag& dag, const EdgeValues& y) {
  if (y.values.size() != dag.parents.size())
    throw std::invalid_argument("surrogate_loss: Y_true not indexed by the edge set");
  // Must be the indicator of exactly one start-to-end path.
  const int n = dag.n_nodes();
  std::vector<double> incoming(n, 0.0);
  for (int i = 0; i < n; ++i) {
    if (y.values[i].size() != dag.parents[i].size())
      throw std::invalid_argument("surrogate_loss: Y_true not indexed by the edge set");
    for (std::size_t k = 0; k < y.values[i].size(); ++k) {
      const double v = y.values[i][k];
      if (v != 0.0 && v != 1.0)
        throw std::invalid_argument("surrogate_loss: Y_true must be a 0/1 indicator");
      incoming[i] += v;
      if (v == 1.0) incoming[dag.parents[i][k]] -= 1.0;  // outgoing
    }
  }
  // Walking a path adds +1 incoming at every visited non-start node and -1
  // per outgoing edge; a single path leaves +1 at the end, -1 at the start.
  if (incoming[0] != -1.0 || incoming[n - 1] != 1.0)
    throw std::invalid_argument("surrogate_loss: Y_true is not a start-to-end path");
  for (int i = 1; i < n - 1; ++i)
    if (incoming[i] != 0.0)
      throw std::invalid_argument("surrogate_loss: Y_true is not a start-to-end path");
}

void check_sequence(int t_len, int s_len, std::span<const int> y_true) {
  if (static_cast<int>(y_true.size()) != t_len)
    throw std::invalid_argument("sequence length must equal T");
  for (int s : y_true)
    if (s < 0 || s >= s_len)
      throw std::invalid_argument("sequence states must lie in [0, S)");
}

Dag shifted(const Dag& dag, const EdgeValues& cost) {
  Dag out = dag;
  for (std::size_t i = 0; i < out.weights.size(); ++i)
    for (std::size_t k = 0; k < out.weights[i].size(); ++k)
      out.weights[i][k] += cost.values[i][k];
  return out;
}

}  // namespace

DagLoss surrogate_loss(const Dag& dag, const EdgeValues& y_true,
                       const EdgeValues& cost,
                       const std::optional<Regularizer>& reg) {
  dag.validate();
  check_path_structure(dag, y_true);

  EdgeValues theta;
  theta.values = dag.weights;
  const double true_score = edge_dot(y_true, theta);
  const Dag augmented = shifted(dag, cost);

  DagLoss out;
  if (reg) {
    DpGradient g = dp_grad(augmented, *reg);
    out.loss = g.value - true_score;
    out.grad = std::move(g.expected);
  } else {
    const HardPath hard = hard_value_and_path(augmented);
    out.loss = hard.value - true_score;
    out.grad = path_indicator(augmented, hard.nodes);
  }
  for (std::size_t i = 0; i < out.grad.values.size(); ++i)
    for (std::size_t k = 0; k < out.grad.values[i].size(); ++k)
      out.grad.values[i][k] -= y_true.values[i][k];
  return out;
}

Tensor3 sequence_indicator(int t_len, int s_len, std::span<const int> y_true) {
  check_sequence(t_len, s_len, y_true);
  Tensor3 y(t_len, s_len, s_len);
  y(0, y_true[0], 0) = 1.0;
  for (int t = 1; t < t_len; ++t) y(t, y_true[t], y_true[t - 1]) = 1.0;
  return y;
}

Tensor3 hamming_cost(int t_len, int s_len, std::span<const int> y_true) {
  check_sequence(t_len, s_len, y_true);
  Tensor3 c(t_len, s_len, s_len);
  for (int t = 0; t < t_len; ++t)
    for (int i = 0; i < s_len; ++i)
      if (i != y_true[t])
        for (int j = 0; j < s_len; ++j) c(t, i, j) = 1.0;
  return c;
}

SequenceLoss viterbi_surrogate_loss(const Tensor3& theta,
                                    std::span<const int> y_true,
                                    const Tensor3* cost,
                                    const std::optional<Regularizer>& reg) {
  validate_potentials(theta);
  check_sequence(theta.d0, theta.d1, y_true);

  Tensor3 augmented = theta;
  if (cost) {
    if (!cost->same_shape(theta))
      throw std::invalid_argument("viterbi_surrogate_loss: cost shape mismatch");
    for (std::size_t i = 0; i < augmented.data.size(); ++i)
      augmented.data[i] += cost->data[i];
  }

  const Tensor3 indicator = sequence_indicator(theta.d0, theta.d1, y_true);
  const double true_score = tensor_dot(indicator, theta);

  SequenceLoss out;
  if (reg) {
    ViterbiGradient g = viterbi_grad(augmented, *reg);
    out.loss = g.value - true_score;
    out.grad = std::move(g.marginals);
  } else {
    const HardSequence hard = hard_viterbi(augmented);
    out.loss = hard.value - true_score;
    out.grad = sequence_indicator(theta.d0, theta.d1, hard.states);
  }
  for (std::size_t i = 0; i < out.grad.data.size(); ++i)
    out.grad.data[i] -= indicator.data[i];
  return out;
}

SequenceLoss relaxed_marginal_loss(std::span<const int> y_true,
                                   const Tensor3& theta,
                                   const Regularizer& reg,
                                   Divergence divergence) {
  validate_potentials(theta);
  check_sequence(theta.d0, theta.d1, y_true);
  const int t_len = theta.d0, s_len = theta.d1;

  const ViterbiGradient g = viterbi_grad(theta, reg);
  const Matrix predicted = state_marginals(g.marginals);

  double loss = 0.0;
  Matrix dloss(t_len, s_len);  // with respect to the predicted marginals
  for (int t = 0; t < t_len; ++t) {
    for (int i = 0; i < s_len; ++i) {
      const double truth = i == y_true[t] ? 1.0 : 0.0;
      const double pred = predicted(t, i);
      if (divergence == Divergence::SquaredL2) {
        const double diff = pred - truth;
        loss += diff * diff;
        dloss(t, i) = 2.0 * diff;
      } else {
        if (truth > 0.0) {
          if (pred <= 0.0)
            throw std::domain_error(
                "relaxed_marginal_loss: KL needs strictly positive predicted "
                "marginals; use the negentropy regularizer");
          loss += truth * std::log(truth / pred);
          dloss(t, i) = -truth / pred;
        }
        // 0 log 0 = 0 and a vanished true marginal contributes no gradient.
      }
    }
  }

  // Chain rule: the loss reaches theta only through the marginal tensor, and
  // d loss / d e(t,i,j) is constant in j, so one Hessian-vector product with
  // that tensor as the direction gives the full gradient.
  Tensor3 z(t_len, s_len, s_len);
  for (int t = 0; t < t_len; ++t)
    for (int i = 0; i < s_len; ++i)
      for (int j = 0; j < s_len; ++j) z(t, i, j) = dloss(t, i);

  SequenceLoss out;
  out.loss = loss;
  out.grad = viterbi_hessian_product(theta, z, reg).product;
  return out;
}

AlignmentLoss area_loss(const Matrix& y_true, const Matrix& soft_alignment) {
  if (!y_true.same_shape(soft_alignment))
    throw std::invalid_argument("area_loss: shape mismatch");
  const int n_a = soft_alignment.rows, n_b = soft_alignment.cols;

  // Row-wise cumulative sums of (E - Y_true) along the second axis are the
  // columns of L (E - Y_true)^T; accumulate their squares directly.
  AlignmentLoss out;
  out.grad = Matrix(n_a, n_b);
  for (int i = 0; i < n_a; ++i) {
    double cum = 0.0;
    for (int k = 0; k < n_b; ++k) {
      cum += soft_alignment(i, k) - y_true(i, k);
      out.loss += cum * cum;
      // d loss / d E(i,j) = 2 * sum_{k >= j} cum_k; fill by a reverse sweep.
      out.grad(i, k) = cum;
    }
    double suffix = 0.0;
    for (int k = n_b - 1; k >= 0; --k) {
      suffix += out.grad(i, k);
      out.grad(i, k) = 2.0 * suffix;
    }
  }
  return out;
}

DtwLoss dtw_area_loss(const Matrix& y_true, const Matrix& theta,
                      const Regularizer& reg) {
  const DtwGradient g = dtw_grad(theta, reg);
  const AlignmentLoss inner = area_loss(y_true, g.alignment);
  DtwLoss out;
  out.loss = inner.loss;
  out.grad = dtw_hessian_product(theta, inner.grad, reg).product;
  return out;
}

}  // namespace ddp
