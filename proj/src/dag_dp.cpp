#include "ddp/dag_dp.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace ddp {

namespace {

void check_edge_shape(const Dag& dag, const EdgeValues& e, const char* what) {
  if (e.values.size() != dag.parents.size())
    throw std::invalid_argument(std::string(what) + ": not indexed by the edge set");
  for (std::size_t i = 0; i < e.values.size(); ++i)
    if (e.values[i].size() != dag.parents[i].size())
      throw std::invalid_argument(std::string(what) + ": not indexed by the edge set");
}

}  // namespace

HardPath hard_value_and_path(const Dag& dag) {
  dag.validate();
  const int n = dag.n_nodes();
  std::vector<double> v(n, 0.0);
  std::vector<int> best(n, -1);
  // Optimal-path multiplicities, saturated; used only for tie detection.
  constexpr std::uint64_t kCap = 1ull << 62;
  std::vector<std::uint64_t> count(n, 0);
  count[0] = 1;

  for (int i = 1; i < n; ++i) {
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < dag.parents[i].size(); ++k) {
      const double score = dag.weights[i][k] + v[dag.parents[i][k]];
      if (score > best_score) {  // strict: ties keep the lowest parent index
        best_score = score;
        best[i] = static_cast<int>(k);
      }
    }
    v[i] = best_score;
    for (std::size_t k = 0; k < dag.parents[i].size(); ++k) {
      if (dag.weights[i][k] + v[dag.parents[i][k]] == best_score)
        count[i] = std::min(kCap, count[i] + count[dag.parents[i][k]]);
    }
  }

  HardPath result;
  result.value = v[n - 1];
  result.unique = (count[n - 1] == 1);
  for (int node = n - 1; node != 0; node = dag.parents[node][best[node]])
    result.nodes.push_back(node);
  result.nodes.push_back(0);
  std::reverse(result.nodes.begin(), result.nodes.end());
  return result;
}

double dp_value(const Dag& dag, const Regularizer& reg) {
  dag.validate();
  const int n = dag.n_nodes();
  std::vector<double> v(n, 0.0);
  std::vector<double> buf;
  for (int i = 1; i < n; ++i) {
    buf.resize(dag.parents[i].size());
    for (std::size_t k = 0; k < buf.size(); ++k)
      buf[k] = dag.weights[i][k] + v[dag.parents[i][k]];
    v[i] = max_omega(buf, reg);
  }
  return v[n - 1];
}

DpGradient dp_grad(const Dag& dag, const Regularizer& reg) {
  dag.validate();
  const int n = dag.n_nodes();

  DpGradient out;
  out.transitions = EdgeValues::zeros(dag);
  out.expected = EdgeValues::zeros(dag);
  out.node_values.assign(n, 0.0);
  out.node_marginals.assign(n, 0.0);

  std::vector<double> buf;
  for (int i = 1; i < n; ++i) {
    buf.resize(dag.parents[i].size());
    for (std::size_t k = 0; k < buf.size(); ++k)
      buf[k] = dag.weights[i][k] + out.node_values[dag.parents[i][k]];
    out.node_values[i] = max_omega_grad(buf, reg, out.transitions.values[i]);
  }
  out.value = out.node_values[n - 1];

  // Reverse topological order: when node i is processed all its children have
  // already contributed to node_marginals[i].
  out.node_marginals[n - 1] = 1.0;
  for (int i = n - 1; i >= 1; --i) {
    for (std::size_t k = 0; k < dag.parents[i].size(); ++k) {
      const double e = out.node_marginals[i] * out.transitions.values[i][k];
      out.expected.values[i][k] = e;
      out.node_marginals[dag.parents[i][k]] += e;
    }
  }
  return out;
}

double dp_directional(const Dag& dag, const EdgeValues& z,
                      const EdgeValues& transitions) {
  check_edge_shape(dag, z, "dp_directional: Z");
  check_edge_shape(dag, transitions, "dp_directional: Q");
  const int n = dag.n_nodes();
  std::vector<double> vdot(n, 0.0);
  for (int i = 1; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < dag.parents[i].size(); ++k)
      acc += transitions.values[i][k] *
             (z.values[i][k] + vdot[dag.parents[i][k]]);
    vdot[i] = acc;
  }
  return vdot[n - 1];
}

DpHessianProduct dp_hessian_product(const Dag& dag, const EdgeValues& z,
                                    const Regularizer& reg) {
  check_edge_shape(dag, z, "dp_hessian_product: Z");
  const DpGradient grad = dp_grad(dag, reg);
  const int n = dag.n_nodes();

  // Forward: directional derivative and local curvature.
  std::vector<double> vdot(n, 0.0);
  EdgeValues qdot = EdgeValues::zeros(dag);
  std::vector<double> buf;
  for (int i = 1; i < n; ++i) {
    buf.resize(dag.parents[i].size());
    double acc = 0.0;
    for (std::size_t k = 0; k < buf.size(); ++k) {
      buf[k] = z.values[i][k] + vdot[dag.parents[i][k]];
      acc += grad.transitions.values[i][k] * buf[k];
    }
    vdot[i] = acc;
    hess_vec(grad.transitions.values[i], buf, reg, qdot.values[i]);
  }

  // Backward: product rule on e_ij = ebar_i * q_ij.
  DpHessianProduct out;
  out.directional = vdot[n - 1];
  out.product = EdgeValues::zeros(dag);
  std::vector<double> mdot(n, 0.0);  // derivative of the node marginals
  for (int i = n - 1; i >= 1; --i) {
    for (std::size_t k = 0; k < dag.parents[i].size(); ++k) {
      const double edot = qdot.values[i][k] * grad.node_marginals[i] +
                          grad.transitions.values[i][k] * mdot[i];
      out.product.values[i][k] = edot;
      mdot[dag.parents[i][k]] += edot;
    }
  }
  return out;
}

LimitPath vanishing_regularization_limit(const Dag& dag, RegKind kind,
                                         std::span<const double> gammas) {
  if (gammas.empty())
    throw std::invalid_argument("vanishing_regularization_limit: empty gamma sequence");
  const HardPath hard = hard_value_and_path(dag);
  LimitPath out;
  if (!hard.unique) return out;  // non-uniqueness reported, no path

  EdgeValues last;
  for (double gamma : gammas)
    last = dp_grad(dag, Regularizer{kind, gamma}).expected;

  out.unique = true;
  out.indicator = EdgeValues::zeros(dag);
  for (std::size_t i = 0; i < last.values.size(); ++i)
    for (std::size_t k = 0; k < last.values[i].size(); ++k)
      out.indicator.values[i][k] = last.values[i][k] >= 0.5 ? 1.0 : 0.0;
  return out;
}

}  // namespace ddp
