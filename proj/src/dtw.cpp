#include "ddp/dtw.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "ddp/smoothed_max.hpp"

namespace ddp {

void validate_costs(const Matrix& theta) {
  if (theta.rows < 1 || theta.cols < 1)
    throw std::invalid_argument("cost matrix: need at least one cell");
  for (double v : theta.data)
    if (!std::isfinite(v))
      throw std::invalid_argument("cost matrix: entries must be finite");
}

namespace {

// Feasible predecessor values of cell (i, j) gathered in slot order; the
// start corner gets the single virtual predecessor with value 0.
int gather_predecessors(const Matrix& v, int i, int j,
                        std::array<double, 3>& values,
                        std::array<int, 3>& slots) {
  int count = 0;
  if (j > 0) { values[count] = v(i, j - 1); slots[count++] = 0; }
  if (i > 0 && j > 0) { values[count] = v(i - 1, j - 1); slots[count++] = 1; }
  if (i > 0) { values[count] = v(i - 1, j); slots[count++] = 2; }
  if (count == 0) { values[0] = 0.0; slots[0] = 1; count = 1; }
  return count;
}

// Forward smoothed pass; records transitions when q is non-null.
double forward_values(const Matrix& theta, const Regularizer& reg, Matrix& v,
                      Tensor3* q) {
  const int n_a = theta.rows, n_b = theta.cols;
  v = Matrix(n_a, n_b);
  std::array<double, 3> pred{};
  std::array<int, 3> slot{};
  std::array<double, 3> grad{};
  for (int i = 0; i < n_a; ++i) {
    for (int j = 0; j < n_b; ++j) {
      const int count = gather_predecessors(v, i, j, pred, slot);
      const std::span<const double> in(pred.data(), count);
      if (q) {
        const std::span<double> out(grad.data(), count);
        v(i, j) = theta(i, j) + min_omega_grad(in, reg, out);
        for (int k = 0; k < count; ++k) (*q)(i, j, slot[k]) = grad[k];
      } else {
        v(i, j) = theta(i, j) + min_omega(in, reg);
      }
    }
  }
  return v(n_a - 1, n_b - 1);
}

}  // namespace

double dtw_value(const Matrix& theta, const Regularizer& reg) {
  validate_costs(theta);
  Matrix v;
  return forward_values(theta, reg, v, nullptr);
}

DtwGradient dtw_grad(const Matrix& theta, const Regularizer& reg) {
  validate_costs(theta);
  const int n_a = theta.rows, n_b = theta.cols;

  DtwGradient out;
  out.transitions = Tensor3(n_a, n_b, 3);
  Matrix v;
  out.value = forward_values(theta, reg, v, &out.transitions);

  // Backward recursion with a virtual terminal cell just past the corner:
  // it reaches (n_a-1, n_b-1) through its diagonal slot with weight one.
  out.alignment = Matrix(n_a, n_b);
  const auto q_at = [&](int i, int j, int s) -> double {
    if (i == n_a && j == n_b) return s == 1 ? 1.0 : 0.0;
    if (i < 0 || j < 0 || i >= n_a || j >= n_b) return 0.0;
    return out.transitions(i, j, s);
  };
  const auto e_at = [&](int i, int j) -> double {
    if (i == n_a && j == n_b) return 1.0;
    if (i < 0 || j < 0 || i >= n_a || j >= n_b) return 0.0;
    return out.alignment(i, j);
  };
  for (int i = n_a - 1; i >= 0; --i)
    for (int j = n_b - 1; j >= 0; --j)
      out.alignment(i, j) = q_at(i, j + 1, 0) * e_at(i, j + 1) +
                            q_at(i + 1, j + 1, 1) * e_at(i + 1, j + 1) +
                            q_at(i + 1, j, 2) * e_at(i + 1, j);
  return out;
}

DtwHessianProduct dtw_hessian_product(const Matrix& theta, const Matrix& z,
                                      const Regularizer& reg) {
  validate_costs(theta);
  if (!z.same_shape(theta))
    throw std::invalid_argument("dtw_hessian_product: Z shape mismatch");

  const DtwGradient grad = dtw_grad(theta, reg);
  const int n_a = theta.rows, n_b = theta.cols;

  // Forward: vdot follows the value recursion; qdot = -J(q) applied to the
  // predecessor vdots (the perturbation enters all three slots equally, so
  // it drops out of the curvature term).
  Matrix vdot(n_a, n_b);
  Tensor3 qdot(n_a, n_b, 3);
  for (int i = 0; i < n_a; ++i) {
    for (int j = 0; j < n_b; ++j) {
      std::array<double, 3> pd = {j > 0 ? vdot(i, j - 1) : 0.0,
                                  i > 0 && j > 0 ? vdot(i - 1, j - 1) : 0.0,
                                  i > 0 ? vdot(i - 1, j) : 0.0};
      double acc = z(i, j);
      for (int s = 0; s < 3; ++s) acc += grad.transitions(i, j, s) * pd[s];
      vdot(i, j) = acc;
      hess_vec(grad.transitions.row(i, j), pd, reg, qdot.row(i, j));
      for (int s = 0; s < 3; ++s) qdot(i, j, s) = -qdot(i, j, s);
    }
  }

  DtwHessianProduct out;
  out.directional = vdot(n_a - 1, n_b - 1);
  out.product = Matrix(n_a, n_b);
  const auto q_at = [&](int i, int j, int s) -> double {
    if (i == n_a && j == n_b) return s == 1 ? 1.0 : 0.0;
    if (i < 0 || j < 0 || i >= n_a || j >= n_b) return 0.0;
    return grad.transitions(i, j, s);
  };
  const auto qdot_at = [&](int i, int j, int s) -> double {
    if (i < 0 || j < 0 || i >= n_a || j >= n_b) return 0.0;
    return qdot(i, j, s);
  };
  const auto e_at = [&](int i, int j) -> double {
    if (i == n_a && j == n_b) return 1.0;
    if (i < 0 || j < 0 || i >= n_a || j >= n_b) return 0.0;
    return grad.alignment(i, j);
  };
  const auto edot_at = [&](int i, int j) -> double {
    if (i < 0 || j < 0 || i >= n_a || j >= n_b) return 0.0;
    return out.product(i, j);
  };
  for (int i = n_a - 1; i >= 0; --i)
    for (int j = n_b - 1; j >= 0; --j)
      out.product(i, j) =
          qdot_at(i, j + 1, 0) * e_at(i, j + 1) +
          q_at(i, j + 1, 0) * edot_at(i, j + 1) +
          qdot_at(i + 1, j + 1, 1) * e_at(i + 1, j + 1) +
          q_at(i + 1, j + 1, 1) * edot_at(i + 1, j + 1) +
          qdot_at(i + 1, j, 2) * e_at(i + 1, j) +
          q_at(i + 1, j, 2) * edot_at(i + 1, j);
  return out;
}

HardAlignment hard_dtw(const Matrix& theta) {
  validate_costs(theta);
  const int n_a = theta.rows, n_b = theta.cols;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  Matrix v(n_a, n_b);
  std::vector<std::vector<int>> from(n_a, std::vector<int>(n_b, 1));

  for (int i = 0; i < n_a; ++i) {
    for (int j = 0; j < n_b; ++j) {
      const double left = j > 0 ? v(i, j - 1) : kInf;
      const double diag = i > 0 && j > 0 ? v(i - 1, j - 1) : kInf;
      const double up = i > 0 ? v(i - 1, j) : kInf;
      double best = 0.0;
      int slot = 1;
      if (i > 0 || j > 0) {
        // Preference diagonal > left > up on ties.
        best = diag;
        slot = 1;
        if (left < best) { best = left; slot = 0; }
        if (up < best) { best = up; slot = 2; }
      }
      v(i, j) = theta(i, j) + best;
      from[i][j] = slot;
    }
  }

  HardAlignment out;
  out.value = v(n_a - 1, n_b - 1);
  out.indicator = Matrix(n_a, n_b);
  int i = n_a - 1, j = n_b - 1;
  while (true) {
    out.indicator(i, j) = 1.0;
    if (i == 0 && j == 0) break;
    const int slot = from[i][j];
    if (slot == 0) { --j; }
    else if (slot == 1) { --i; --j; }
    else { --i; }
  }
  return out;
}

Matrix squared_euclidean_costs(const Matrix& a, const Matrix& b) {
  if (a.cols != b.cols)
    throw std::invalid_argument("squared_euclidean_costs: dimension mismatch");
  Matrix theta(a.rows, b.rows);
  for (int i = 0; i < a.rows; ++i)
    for (int j = 0; j < b.rows; ++j) {
      double acc = 0.0;
      for (int d = 0; d < a.cols; ++d) {
        const double diff = a(i, d) - b(j, d);
        acc += diff * diff;
      }
      theta(i, j) = acc;
    }
  return theta;
}

Dag export_dag(const Matrix& theta, std::uint64_t node_cap) {
  validate_costs(theta);
  const int n_a = theta.rows, n_b = theta.cols;
  const std::uint64_t nodes =
      static_cast<std::uint64_t>(n_a) * static_cast<std::uint64_t>(n_b) + 1;
  if (nodes > node_cap)
    throw std::length_error("dtw export refused: " + std::to_string(nodes) +
                            " nodes exceed cap " + std::to_string(node_cap));

  Dag dag;
  dag.parents.resize(nodes);
  dag.weights.resize(nodes);
  for (int i = 0; i < n_a; ++i) {
    for (int j = 0; j < n_b; ++j) {
      const int node = dtw_node_index(i, j, n_b);
      const double w = -theta(i, j);
      // Ascending parent indices: diagonal, up, left, or the start node.
      if (i > 0 && j > 0) {
        dag.parents[node].push_back(dtw_node_index(i - 1, j - 1, n_b));
        dag.weights[node].push_back(w);
      }
      if (i > 0) {
        dag.parents[node].push_back(dtw_node_index(i - 1, j, n_b));
        dag.weights[node].push_back(w);
      }
      if (j > 0) {
        dag.parents[node].push_back(dtw_node_index(i, j - 1, n_b));
        dag.weights[node].push_back(w);
      }
      if (i == 0 && j == 0) {
        dag.parents[node].push_back(0);
        dag.weights[node].push_back(w);
      }
    }
  }
  dag.validate();
  return dag;
}

}  // namespace ddp
