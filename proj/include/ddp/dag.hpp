#ifndef DDP_DAG_HPP
#define DDP_DAG_HPP

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace ddp {

// Weighted DAG in topological numbering, nodes 0 .. n-1 with 0 the start and
// n-1 the end.  Stored as per-node parent adjacency with parallel edge
// weights; there is no dense matrix and no -inf sentinel.
struct Dag {
  std::vector<std::vector<int>> parents;    // parents[i]: strictly increasing, all < i
  std::vector<std::vector<double>> weights; // weights[i][k] is the edge (i, parents[i][k])

  int n_nodes() const { return static_cast<int>(parents.size()); }
  std::size_t n_edges() const;

  // Throws std::invalid_argument unless all structural invariants hold:
  // n >= 2, node 0 is the only orphan, node n-1 the only leaf, parent lists
  // strictly increasing with indices below the child, finite weights.
  void validate() const;
};

// Values attached to every edge of a DAG, laid out parallel to Dag::parents.
struct EdgeValues {
  std::vector<std::vector<double>> values;

  static EdgeValues zeros(const Dag& dag);
  double& at(int child, int slot) { return values[child][slot]; }
  double at(int child, int slot) const { return values[child][slot]; }
};

double edge_dot(const EdgeValues& a, const EdgeValues& b);

// 0/1 indicator of a start-to-end path given as a node sequence.
EdgeValues path_indicator(const Dag& dag, std::span<const int> nodes);

// Parent slot of edge (child, parent); throws if the edge does not exist.
int parent_slot(const Dag& dag, int child, int parent);

// JSON document {"n_nodes": N, "edges": [[child, parent, weight], ...]} with
// 1-based node indices.  The loader validates all Dag invariants.
Dag parse_dag_json(const std::string& text);
Dag load_dag_file(const std::string& path);

}  // namespace ddp

#endif
