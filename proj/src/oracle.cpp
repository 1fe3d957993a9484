#include "ddp/oracle.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "ddp/smoothed_max.hpp"

namespace ddp {

namespace {

constexpr std::uint64_t kCountCap = 1ull << 62;

std::vector<std::vector<int>> children_lists(const Dag& dag) {
  std::vector<std::vector<int>> children(dag.n_nodes());
  for (int i = 0; i < dag.n_nodes(); ++i)
    for (int j : dag.parents[i]) children[j].push_back(i);
  // Built in ascending i, so each list is already ascending.
  return children;
}

}  // namespace

std::uint64_t count_paths(const Dag& dag) {
  dag.validate();
  const int n = dag.n_nodes();
  std::vector<std::uint64_t> count(n, 0);
  count[0] = 1;
  for (int i = 1; i < n; ++i) {
    std::uint64_t acc = 0;
    for (int j : dag.parents[i]) {
      acc += count[j];
      if (acc >= kCountCap) {
        acc = kCountCap;
        break;
      }
    }
    count[i] = acc;
  }
  return count[n - 1];
}

PathSet enumerate_paths(const Dag& dag, std::uint64_t cap) {
  const std::uint64_t total = count_paths(dag);
  if (total > cap)
    throw std::length_error("path enumeration refused: about " +
                            std::to_string(total) + " paths exceed cap " +
                            std::to_string(cap));

  const auto children = children_lists(dag);
  const int end = dag.n_nodes() - 1;

  PathSet out;
  out.paths.reserve(static_cast<std::size_t>(total));
  std::vector<int> stack_node{0};
  std::vector<std::size_t> stack_child{0};
  while (!stack_node.empty()) {
    const int node = stack_node.back();
    if (node == end) {
      out.paths.push_back(stack_node);
      stack_node.pop_back();
      stack_child.pop_back();
      continue;
    }
    std::size_t& next = stack_child.back();
    if (next < children[node].size()) {
      const int child = children[node][next++];
      stack_node.push_back(child);
      stack_child.push_back(0);
    } else {
      stack_node.pop_back();
      stack_child.pop_back();
    }
  }
  return out;
}

double path_score(const Dag& dag, std::span<const int> nodes) {
  double score = 0.0;
  for (std::size_t s = 0; s + 1 < nodes.size(); ++s) {
    const int child = nodes[s + 1];
    score += dag.weights[child][parent_slot(dag, child, nodes[s])];
  }
  return score;
}

double lp_omega_brute(const PathSet& paths, const Dag& dag,
                      const Regularizer& reg) {
  std::vector<double> scores(paths.paths.size());
  for (std::size_t p = 0; p < paths.paths.size(); ++p)
    scores[p] = path_score(dag, paths.paths[p]);
  return max_omega(scores, reg);
}

double log_partition_brute(const PathSet& paths, const Dag& dag, double gamma) {
  Regularizer::check_gamma(gamma);
  return lp_omega_brute(paths, dag, Regularizer::entropy(gamma));
}

BruteExpectedPath expected_path_brute(const Dag& dag, const PathSet& paths,
                                      const EdgeValues& transitions) {
  BruteExpectedPath out;
  out.expected = EdgeValues::zeros(dag);
  for (const auto& nodes : paths.paths) {
    const std::size_t edges = nodes.size() - 1;
    double prob;
    if (edges > 64) {
      // Multiply in log space to guard against underflow on long paths.
      double log_prob = 0.0;
      for (std::size_t s = 0; s + 1 < nodes.size(); ++s) {
        const int child = nodes[s + 1];
        log_prob +=
            std::log(transitions.values[child][parent_slot(dag, child, nodes[s])]);
      }
      prob = std::exp(log_prob);
    } else {
      prob = 1.0;
      for (std::size_t s = 0; s + 1 < nodes.size(); ++s) {
        const int child = nodes[s + 1];
        prob *= transitions.values[child][parent_slot(dag, child, nodes[s])];
      }
    }
    out.total_probability += prob;
    for (std::size_t s = 0; s + 1 < nodes.size(); ++s) {
      const int child = nodes[s + 1];
      out.expected.values[child][parent_slot(dag, child, nodes[s])] += prob;
    }
  }
  return out;
}

}  // namespace ddp
