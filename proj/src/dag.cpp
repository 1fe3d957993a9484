#include "ddp/dag.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace ddp {

std::size_t Dag::n_edges() const {
  std::size_t total = 0;
  for (const auto& p : parents) total += p.size();
  return total;
}

void Dag::validate() const {
  const int n = n_nodes();
  if (n < 2) throw std::invalid_argument("dag: need at least 2 nodes");
  if (weights.size() != parents.size())
    throw std::invalid_argument("dag: weights/parents size mismatch");
  if (!parents[0].empty())
    throw std::invalid_argument("dag: start node must have no parents");

  std::vector<char> has_child(n, 0);
  for (int i = 0; i < n; ++i) {
    if (weights[i].size() != parents[i].size())
      throw std::invalid_argument("dag: weights/parents length mismatch at node " +
                                  std::to_string(i + 1));
    if (i > 0 && parents[i].empty())
      throw std::invalid_argument("dag: node " + std::to_string(i + 1) +
                                  " is unreachable (no parents)");
    int prev = -1;
    for (std::size_t k = 0; k < parents[i].size(); ++k) {
      const int j = parents[i][k];
      if (j < 0 || j >= i)
        throw std::invalid_argument("dag: parent indices must precede the child "
                                    "(topological order)");
      if (j <= prev)
        throw std::invalid_argument("dag: parent list must be strictly increasing");
      if (!std::isfinite(weights[i][k]))
        throw std::invalid_argument("dag: edge weights must be finite");
      has_child[j] = 1;
      prev = j;
    }
  }
  for (int j = 0; j < n - 1; ++j) {
    if (!has_child[j])
      throw std::invalid_argument("dag: node " + std::to_string(j + 1) +
                                  " cannot reach the end node (no children)");
  }
  if (has_child[n - 1])
    throw std::invalid_argument("dag: end node must have no children");
}

EdgeValues EdgeValues::zeros(const Dag& dag) {
  EdgeValues e;
  e.values.resize(dag.parents.size());
  for (std::size_t i = 0; i < dag.parents.size(); ++i)
    e.values[i].assign(dag.parents[i].size(), 0.0);
  return e;
}

double edge_dot(const EdgeValues& a, const EdgeValues& b) {
  if (a.values.size() != b.values.size())
    throw std::invalid_argument("edge_dot: shape mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    if (a.values[i].size() != b.values[i].size())
      throw std::invalid_argument("edge_dot: shape mismatch");
    for (std::size_t k = 0; k < a.values[i].size(); ++k)
      total += a.values[i][k] * b.values[i][k];
  }
  return total;
}

int parent_slot(const Dag& dag, int child, int parent) {
  const auto& p = dag.parents.at(child);
  auto it = std::lower_bound(p.begin(), p.end(), parent);
  if (it == p.end() || *it != parent)
    throw std::invalid_argument("no edge (" + std::to_string(child + 1) + ", " +
                                std::to_string(parent + 1) + ")");
  return static_cast<int>(it - p.begin());
}

EdgeValues path_indicator(const Dag& dag, std::span<const int> nodes) {
  EdgeValues e = EdgeValues::zeros(dag);
  for (std::size_t s = 0; s + 1 < nodes.size(); ++s)
    e.values[nodes[s + 1]][parent_slot(dag, nodes[s + 1], nodes[s])] = 1.0;
  return e;
}

Dag parse_dag_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& err) {
    throw std::invalid_argument(std::string("dag json: ") + err.what());
  }
  if (!doc.contains("n_nodes") || !doc["n_nodes"].is_number_integer())
    throw std::invalid_argument("dag json: missing integer field n_nodes");
  if (!doc.contains("edges") || !doc["edges"].is_array())
    throw std::invalid_argument("dag json: missing array field edges");

  const int n = doc["n_nodes"].get<int>();
  if (n < 2) throw std::invalid_argument("dag json: n_nodes must be >= 2");

  Dag dag;
  dag.parents.resize(n);
  dag.weights.resize(n);
  for (const auto& edge : doc["edges"]) {
    if (!edge.is_array() || edge.size() != 3 || !edge[0].is_number_integer() ||
        !edge[1].is_number_integer() || !edge[2].is_number())
      throw std::invalid_argument("dag json: edges must be [child, parent, weight]");
    const int child = edge[0].get<int>() - 1;   // document is 1-based
    const int parent = edge[1].get<int>() - 1;
    const double weight = edge[2].get<double>();
    if (child < 0 || child >= n || parent < 0 || parent >= n)
      throw std::invalid_argument("dag json: node index out of range");
    dag.parents[child].push_back(parent);
    dag.weights[child].push_back(weight);
  }
  for (int i = 0; i < n; ++i) {
    std::vector<std::size_t> order(dag.parents[i].size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return dag.parents[i][a] < dag.parents[i][b];
    });
    std::vector<int> p(order.size());
    std::vector<double> w(order.size());
    for (std::size_t k = 0; k < order.size(); ++k) {
      p[k] = dag.parents[i][order[k]];
      w[k] = dag.weights[i][order[k]];
    }
    for (std::size_t k = 1; k < p.size(); ++k)
      if (p[k] == p[k - 1])
        throw std::invalid_argument("dag json: duplicate edge");
    dag.parents[i] = std::move(p);
    dag.weights[i] = std::move(w);
  }
  dag.validate();
  return dag;
}

Dag load_dag_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open dag file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_dag_json(buffer.str());
}

}  // namespace ddp
