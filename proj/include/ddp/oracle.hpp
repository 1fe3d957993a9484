#ifndef DDP_ORACLE_HPP
#define DDP_ORACLE_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "ddp/dag.hpp"
#include "ddp/regularizer.hpp"

namespace ddp {

// Exhaustive start-to-end path enumeration, used as ground truth on small
// instances.  Paths are node sequences in deterministic order (depth-first,
// children in ascending index order).

struct PathSet {
  std::vector<std::vector<int>> paths;
};

constexpr std::uint64_t kDefaultPathCap = 1'000'000;

// Number of start-to-end paths, saturating at 2^62.
std::uint64_t count_paths(const Dag& dag);

// Throws std::length_error with the count estimate when the cap is exceeded.
PathSet enumerate_paths(const Dag& dag, std::uint64_t cap = kDefaultPathCap);

double path_score(const Dag& dag, std::span<const int> nodes);

// Smoothed max applied once to the vector of all path scores; the smoothed
// linear program over the full path polytope.
double lp_omega_brute(const PathSet& paths, const Dag& dag,
                      const Regularizer& reg);

// gamma * log sum_Y exp(<Y, theta> / gamma), the negentropy log-partition.
double log_partition_brute(const PathSet& paths, const Dag& dag, double gamma);

// Expected path under the random-walk distribution induced by the transition
// weights q: p(Y) is the product of q over the edges of Y.  total_probability
// returns sum_Y p(Y) for the normalization check.
struct BruteExpectedPath {
  EdgeValues expected;
  double total_probability = 0.0;
};

BruteExpectedPath expected_path_brute(const Dag& dag, const PathSet& paths,
                                      const EdgeValues& transitions);

}  // namespace ddp

#endif
