#ifndef DDP_DTW_HPP
#define DDP_DTW_HPP

#include <cstdint>

#include "ddp/dag.hpp"
#include "ddp/regularizer.hpp"
#include "ddp/tensor.hpp"

namespace ddp {

// Smoothed dynamic time warping over an N_A x N_B discrepancy matrix.
// Alignments are monotonic paths from cell (0,0) to cell (N_A-1, N_B-1)
// moving right, down, or diagonally.  Predecessor slots are ordered
// 0 = left (i, j-1), 1 = diagonal (i-1, j-1), 2 = up (i-1, j) throughout;
// infeasible predecessors on the borders are masked out of the smoothed min,
// never represented by IEEE infinities.

void validate_costs(const Matrix& theta);

// v(i,j) = theta(i,j) + min_omega over the feasible predecessors, returning
// the terminal cell value.  O(N_A * N_B).
double dtw_value(const Matrix& theta, const Regularizer& reg);

// Value, soft alignment (the gradient of dtw_value w.r.t. theta) and the
// local transition weights reused by the Hessian pass.  Corner cells of the
// alignment carry mass exactly 1.
struct DtwGradient {
  double value = 0.0;
  Matrix alignment;     // E, N_A x N_B
  Tensor3 transitions;  // q, N_A x N_B x 3 in slot order left/diag/up
};

DtwGradient dtw_grad(const Matrix& theta, const Regularizer& reg);

// Hessian-vector product; the curvature of the smoothed min is -J(grad).
struct DtwHessianProduct {
  double directional = 0.0;  // <grad, Z>
  Matrix product;
};

DtwHessianProduct dtw_hessian_product(const Matrix& theta, const Matrix& z,
                                      const Regularizer& reg);

// Classic unregularized DTW with backtracking; ties prefer the diagonal,
// then the left, then the up predecessor.
struct HardAlignment {
  double value = 0.0;
  Matrix indicator;  // 0/1, N_A x N_B
};

HardAlignment hard_dtw(const Matrix& theta);

// theta(i,j) = squared Euclidean distance between observation i of series a
// and observation j of series b (rows are observations).
Matrix squared_euclidean_costs(const Matrix& a, const Matrix& b);

// The DTW computational graph as a generic DAG: a start node plus one node
// per cell, with every incoming edge of a cell weighted by the negated cost
// of that cell.  The sign flip lives here and only here, so that the DAG
// max recursion equals the negated DTW min recursion:
// dp_value(export_dag(theta), reg) == -dtw_value(theta, reg), and the node
// marginals of dp_grad equal the soft alignment cell-wise.
Dag export_dag(const Matrix& theta, std::uint64_t node_cap = 1u << 20);

// Node index of cell (i, j) in the exported DAG.
inline int dtw_node_index(int i, int j, int n_b) { return 1 + i * n_b + j; }

}  // namespace ddp

#endif
