#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "ddp/smoothed_max.hpp"
#include "ddp/viterbi.hpp"
#include "test_util.hpp"

using ddp::Regularizer;
using ddp::Tensor3;
using testutil::Rng;

namespace {

// Score of one state sequence under a potential tensor.
double sequence_score(const Tensor3& theta, const std::vector<int>& seq) {
  double score = theta(0, seq[0], 0);
  for (int t = 1; t < theta.d0; ++t) score += theta(t, seq[t], seq[t - 1]);
  return score;
}

// All S^T sequence scores by direct enumeration.
std::vector<double> all_scores(const Tensor3& theta) {
  std::vector<double> scores;
  std::vector<int> seq(theta.d0, 0);
  do {
    scores.push_back(sequence_score(theta, seq));
  } while (testutil::next_assignment(seq, theta.d1));
  return scores;
}

// Expected edge indicator under the backward random walk: the probability of
// a sequence is the terminal weight of its last state times the recorded
// transition weights along it.
Tensor3 brute_marginals(const Tensor3& theta, const Regularizer& reg) {
  const ddp::ViterbiGradient g = ddp::viterbi_grad(theta, reg);
  Tensor3 expected(theta.d0, theta.d1, theta.d2);
  std::vector<int> seq(theta.d0, 0);
  do {
    double p = g.terminal[seq[theta.d0 - 1]];
    for (int t = 1; t < theta.d0; ++t)
      p *= g.transitions(t, seq[t], seq[t - 1]);
    expected(0, seq[0], 0) += p;
    for (int t = 1; t < theta.d0; ++t) expected(t, seq[t], seq[t - 1]) += p;
  } while (testutil::next_assignment(seq, theta.d1));
  return expected;
}

const Tensor3 kTinyExample = [] {
  // T = 1, S = 2 with first-state scores (1, 0).
  Tensor3 theta(1, 2, 2);
  theta(0, 0, 0) = theta(0, 0, 1) = 1.0;
  theta(0, 1, 0) = theta(0, 1, 1) = 0.0;
  return theta;
}();

}  // namespace

TEST_CASE("value worked examples") {
  CHECK(std::abs(ddp::viterbi_value(kTinyExample, Regularizer::entropy()) -
                 std::log(std::exp(1.0) + 1.0)) <= 1e-12);

  Rng rng(3);
  const Tensor3 single = testutil::random_potentials(rng, 5, 1);
  double total = 0.0;
  for (int t = 0; t < 5; ++t) total += single(t, 0, 0);
  CHECK(std::abs(ddp::viterbi_value(single, Regularizer::entropy()) - total) <=
        1e-12);

  for (int trial = 0; trial < 30; ++trial) {
    const Tensor3 theta = testutil::random_potentials(rng, 2, 2);
    const double gamma = testutil::uniform(rng, 0.4, 2.0);
    const double brute =
        ddp::max_omega(all_scores(theta), Regularizer::entropy(gamma));
    CHECK(std::abs(ddp::viterbi_value(theta, Regularizer::entropy(gamma)) -
                   brute) <= 1e-12);
  }
}

TEST_CASE("value equals the sequence log-partition up to S^T = 4^4") {
  Rng rng(7);
  for (int trial = 0; trial < 40; ++trial) {
    const int t_len = testutil::uniform_int(rng, 1, 4);
    const int s_len = testutil::uniform_int(rng, 1, 4);
    const Tensor3 theta = testutil::random_potentials(rng, t_len, s_len);
    const double gamma = testutil::uniform(rng, 0.4, 2.0);
    const double brute =
        ddp::max_omega(all_scores(theta), Regularizer::entropy(gamma));
    CHECK(std::abs(ddp::viterbi_value(theta, Regularizer::entropy(gamma)) -
                   brute) <= 1e-9);
  }
}

TEST_CASE("gradient worked examples") {
  const ddp::ViterbiGradient tiny =
      ddp::viterbi_grad(kTinyExample, Regularizer::entropy());
  const double sig = std::exp(1.0) / (std::exp(1.0) + 1.0);
  CHECK(std::abs(tiny.marginals(0, 0, 0) - sig) <= 1e-12);
  CHECK(std::abs(tiny.marginals(0, 1, 0) - (1.0 - sig)) <= 1e-12);
  CHECK(tiny.marginals(0, 0, 1) == 0.0);
  CHECK(tiny.marginals(0, 1, 1) == 0.0);

  Rng rng(11);
  const Tensor3 single = testutil::random_potentials(rng, 4, 1);
  const ddp::ViterbiGradient g =
      ddp::viterbi_grad(single, Regularizer::l2(0.7));
  for (int t = 0; t < 4; ++t) CHECK(g.marginals(t, 0, 0) == 1.0);
}

TEST_CASE("gradient equals the brute-force sequence mixture") {
  Rng rng(13);
  for (const auto& reg : {Regularizer::entropy(0.9), Regularizer::l2(0.9)}) {
    for (int trial = 0; trial < 25; ++trial) {
      const int t_len = testutil::uniform_int(rng, 1, 3);
      const int s_len = testutil::uniform_int(rng, 1, 3);
      const Tensor3 theta = testutil::random_potentials(rng, t_len, s_len);
      const ddp::ViterbiGradient g = ddp::viterbi_grad(theta, reg);
      const Tensor3 brute = brute_marginals(theta, reg);
      for (std::size_t i = 0; i < brute.data.size(); ++i)
        CHECK(std::abs(g.marginals.data[i] - brute.data[i]) <= 1e-10);
    }
  }

  // Negentropy also matches the Gibbs distribution over sequences directly.
  for (int trial = 0; trial < 15; ++trial) {
    const Tensor3 theta = testutil::random_potentials(rng, 3, 3);
    const double gamma = 0.8;
    const ddp::ViterbiGradient g =
        ddp::viterbi_grad(theta, Regularizer::entropy(gamma));
    Tensor3 gibbs(3, 3, 3);
    double z = 0.0;
    std::vector<int> seq(3, 0);
    do {
      z += std::exp(sequence_score(theta, seq) / gamma);
    } while (testutil::next_assignment(seq, 3));
    do {
      const double p = std::exp(sequence_score(theta, seq) / gamma) / z;
      gibbs(0, seq[0], 0) += p;
      for (int t = 1; t < 3; ++t) gibbs(t, seq[t], seq[t - 1]) += p;
    } while (testutil::next_assignment(seq, 3));
    for (std::size_t i = 0; i < gibbs.data.size(); ++i)
      CHECK(std::abs(g.marginals.data[i] - gibbs.data[i]) <= 1e-10);
  }
}

TEST_CASE("edge marginal invariants") {
  Rng rng(17);
  for (const auto& reg : {Regularizer::entropy(), Regularizer::l2()}) {
    for (int trial = 0; trial < 30; ++trial) {
      const int t_len = testutil::uniform_int(rng, 1, 5);
      const int s_len = testutil::uniform_int(rng, 1, 4);
      const Tensor3 theta = testutil::random_potentials(rng, t_len, s_len);
      const ddp::ViterbiGradient g = ddp::viterbi_grad(theta, reg);

      for (double v : g.marginals.data) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0 + 1e-12);
      }
      for (int t = 0; t < t_len; ++t) {
        double layer = 0.0;
        for (int i = 0; i < s_len; ++i)
          for (int j = 0; j < s_len; ++j) layer += g.marginals(t, i, j);
        CHECK(std::abs(layer - 1.0) <= 1e-10);
      }
      // Time consistency: mass leaving state i at time t equals mass
      // entering it from time t+1.
      for (int t = 0; t + 1 < t_len; ++t)
        for (int i = 0; i < s_len; ++i) {
          double out_mass = 0.0, in_mass = 0.0;
          for (int j = 0; j < s_len; ++j) {
            out_mass += g.marginals(t, i, j);
            in_mass += g.marginals(t + 1, j, i);
          }
          CHECK(std::abs(out_mass - in_mass) <= 1e-10);
        }
    }
  }
}

TEST_CASE("state marginals") {
  const ddp::ViterbiGradient tiny =
      ddp::viterbi_grad(kTinyExample, Regularizer::entropy());
  const ddp::Matrix p = ddp::state_marginals(tiny.marginals);
  CHECK(std::abs(p(0, 0) - 0.7310585786300049) <= 1e-12);
  CHECK(std::abs(p(0, 1) - 0.2689414213699951) <= 1e-12);

  Rng rng(19);
  const Tensor3 single = testutil::random_potentials(rng, 3, 1);
  const ddp::Matrix ones = ddp::state_marginals(
      ddp::viterbi_grad(single, Regularizer::entropy()).marginals);
  for (int t = 0; t < 3; ++t) CHECK(ones(t, 0) == 1.0);

  // Strongly peaked potentials under small-gamma l2 give exact zeros.
  Tensor3 peaked(2, 3, 3);
  for (int t = 0; t < 2; ++t)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        peaked(t, i, j) = i == 0 ? 5.0 : 0.0;
  const ddp::Matrix sparse = ddp::state_marginals(
      ddp::viterbi_grad(peaked, Regularizer::l2(0.1)).marginals);
  int zeros = 0;
  for (double v : sparse.data) zeros += v == 0.0;
  CHECK(zeros > 0);
  for (int t = 0; t < 2; ++t) {
    double row = 0.0;
    for (int i = 0; i < 3; ++i) row += sparse(t, i);
    CHECK(std::abs(row - 1.0) <= 1e-12);
  }
}

TEST_CASE("hessian product worked examples") {
  Rng rng(23);
  const Tensor3 theta = testutil::random_potentials(rng, 3, 2);
  const Tensor3 zero(3, 2, 2);
  const ddp::ViterbiHessianProduct none =
      ddp::viterbi_hessian_product(theta, zero, Regularizer::entropy());
  CHECK(none.directional == 0.0);
  for (double v : none.product.data) CHECK(v == 0.0);

  const Tensor3 single = testutil::random_potentials(rng, 4, 1);
  const Tensor3 z1 = testutil::random_potentials(rng, 4, 1);
  const ddp::ViterbiHessianProduct linear =
      ddp::viterbi_hessian_product(single, z1, Regularizer::entropy());
  for (double v : linear.product.data) CHECK(v == 0.0);

  Tensor3 bad(2, 2, 2);
  CHECK_THROWS_AS(ddp::viterbi_hessian_product(theta, bad, Regularizer::entropy()),
                  std::invalid_argument);
}

TEST_CASE("gradient matches finite differences") {
  Rng rng(29);
  for (const auto& reg : {Regularizer::entropy(), Regularizer::l2()}) {
    for (int trial = 0; trial < 15; ++trial) {
      const int t_len = testutil::uniform_int(rng, 1, 4);
      const int s_len = testutil::uniform_int(rng, 2, 3);
      Tensor3 theta = testutil::random_potentials(rng, t_len, s_len);
      const ddp::ViterbiGradient g = ddp::viterbi_grad(theta, reg);

      const auto nudge = [&](int t, int i, int j, double step) {
        // Keep the first slice constant in j by moving the whole row.
        if (t == 0)
          for (int jj = 0; jj < s_len; ++jj) theta(0, i, jj) += step;
        else
          theta(t, i, j) += step;
      };
      for (int t = 0; t < t_len; ++t)
        for (int i = 0; i < s_len; ++i)
          for (int j = 0; j < (t == 0 ? 1 : s_len); ++j) {
            nudge(t, i, j, testutil::kFdStep);
            const ddp::ViterbiGradient plus = ddp::viterbi_grad(theta, reg);
            nudge(t, i, j, -2.0 * testutil::kFdStep);
            const ddp::ViterbiGradient minus = ddp::viterbi_grad(theta, reg);
            nudge(t, i, j, testutil::kFdStep);
            if (reg.kind == ddp::RegKind::SquaredL2 &&
                (!testutil::same_support(plus.transitions, g.transitions) ||
                 !testutil::same_support(minus.transitions, g.transitions) ||
                 !testutil::same_support(plus.terminal, g.terminal) ||
                 !testutil::same_support(minus.terminal, g.terminal)))
              continue;
            const double fd =
                (plus.value - minus.value) / (2.0 * testutil::kFdStep);
            CHECK(std::abs(g.marginals(t, i, j) - fd) <= 1e-4);
          }
    }
  }
}

TEST_CASE("hessian product matches finite differences") {
  Rng rng(31);
  for (const auto& reg : {Regularizer::entropy(), Regularizer::l2()}) {
    int tested = 0;
    for (int trial = 0; trial < 30; ++trial) {
      const int t_len = testutil::uniform_int(rng, 2, 3);
      const int s_len = 2;
      const Tensor3 theta = testutil::random_potentials(rng, t_len, s_len);
      const Tensor3 z = testutil::random_potentials(rng, t_len, s_len, 1.0);

      Tensor3 plus = theta, minus = theta;
      for (std::size_t i = 0; i < theta.data.size(); ++i) {
        plus.data[i] += testutil::kFdStep * z.data[i];
        minus.data[i] -= testutil::kFdStep * z.data[i];
      }
      const ddp::ViterbiGradient base = ddp::viterbi_grad(theta, reg);
      const ddp::ViterbiGradient gp = ddp::viterbi_grad(plus, reg);
      const ddp::ViterbiGradient gm = ddp::viterbi_grad(minus, reg);
      if (reg.kind == ddp::RegKind::SquaredL2 &&
          (!testutil::same_support(gp.transitions, base.transitions) ||
           !testutil::same_support(gm.transitions, base.transitions) ||
           !testutil::same_support(gp.terminal, base.terminal) ||
           !testutil::same_support(gm.terminal, base.terminal)))
        continue;
      ++tested;

      const ddp::ViterbiHessianProduct hvp =
          ddp::viterbi_hessian_product(theta, z, reg);
      CHECK(std::abs(hvp.directional - ddp::tensor_dot(base.marginals, z)) <=
            1e-10);
      double scale = 1.0;
      for (double v : hvp.product.data) scale = std::max(scale, std::abs(v));
      for (std::size_t i = 0; i < theta.data.size(); ++i) {
        const double fd = (gp.marginals.data[i] - gm.marginals.data[i]) /
                          (2.0 * testutil::kFdStep);
        CHECK(std::abs(hvp.product.data[i] - fd) / scale <= 1e-3);
      }
    }
    CHECK(tested >= 15);
  }
}

TEST_CASE("vanishing regularization recovers the hard sequence") {
  Rng rng(37);
  int hits = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const Tensor3 theta = testutil::random_potentials(rng, 4, 3);
    const ddp::HardSequence hard = ddp::hard_viterbi(theta);
    const ddp::ViterbiGradient g =
        ddp::viterbi_grad(theta, Regularizer::entropy(0.01));
    bool match = true;
    const ddp::Matrix p = ddp::state_marginals(g.marginals);
    for (int t = 0; t < 4; ++t)
      match = match && (p(t, hard.states[t]) >= 0.5);
    hits += match;
  }
  // Random continuous draws have well-separated optima almost surely.
  CHECK(hits >= 49);
}

TEST_CASE("value is convex in the potentials") {
  Rng rng(41);
  for (const auto& reg : {Regularizer::entropy(), Regularizer::l2()}) {
    for (int trial = 0; trial < 40; ++trial) {
      const Tensor3 a = testutil::random_potentials(rng, 3, 3);
      const Tensor3 b = testutil::random_potentials(rng, 3, 3);
      const double lambda = testutil::uniform(rng, 0.05, 0.95);
      Tensor3 mix = a;
      for (std::size_t i = 0; i < a.data.size(); ++i)
        mix.data[i] = lambda * a.data[i] + (1.0 - lambda) * b.data[i];
      CHECK(ddp::viterbi_value(mix, reg) <=
            lambda * ddp::viterbi_value(a, reg) +
                (1.0 - lambda) * ddp::viterbi_value(b, reg) + 1e-10);
    }
  }
}

TEST_CASE("linear potential construction") {
  // All-zero parameters give the zero tensor.
  const ddp::Matrix x0(3, 2), w0(2, 2), t0(2, 2);
  const std::vector<double> b0{0.0, 0.0};
  for (double v : ddp::linear_potentials(x0, w0, b0, t0).data) CHECK(v == 0.0);

  // Identity features with identity weights score 1 exactly when the state
  // index matches the time index.
  ddp::Matrix eye(3, 3);
  for (int i = 0; i < 3; ++i) eye(i, i) = 1.0;
  const std::vector<double> b3{0.0, 0.0, 0.0};
  const Tensor3 picked = ddp::linear_potentials(eye, eye, b3, ddp::Matrix(3, 3));
  for (int t = 0; t < 3; ++t)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        CHECK(picked(t, i, j) == (i == t ? 1.0 : 0.0));

  // Random case against an independent recomputation.
  Rng rng(43);
  const ddp::Matrix x = testutil::random_matrix(rng, 4, 3, -1.0, 1.0);
  const ddp::Matrix w = testutil::random_matrix(rng, 2, 3, -1.0, 1.0);
  const ddp::Matrix trans = testutil::random_matrix(rng, 2, 2, -1.0, 1.0);
  const std::vector<double> b{0.3, -0.7};
  const Tensor3 theta = ddp::linear_potentials(x, w, b, trans);
  ddp::validate_potentials(theta);
  for (int t = 0; t < 4; ++t)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        double expect = b[i];
        for (int d = 0; d < 3; ++d) expect += w(i, d) * x(t, d);
        if (t > 0) expect += trans(i, j);
        CHECK(std::abs(theta(t, i, j) - expect) <= 1e-15);
      }

  const ddp::Matrix bad_w(2, 4);
  CHECK_THROWS_AS(ddp::linear_potentials(x, bad_w, b, trans),
                  std::invalid_argument);
}

TEST_CASE("potentials json parsing") {
  const std::string doc = R"({"T": 1, "S": 2,
    "theta": [[[1.0, 1.0], [0.0, 0.0]]]})";
  const Tensor3 theta = ddp::parse_potentials_json(doc);
  CHECK(theta.d0 == 1);
  CHECK(theta.d1 == 2);
  CHECK(std::abs(ddp::viterbi_value(theta, Regularizer::entropy()) -
                 std::log(std::exp(1.0) + 1.0)) <= 1e-12);

  CHECK_THROWS_AS(ddp::parse_potentials_json("{"), std::invalid_argument);
  CHECK_THROWS_AS(ddp::parse_potentials_json(R"({"T": 1, "S": 2})"),
                  std::invalid_argument);
  // First slice depends on the previous state: rejected.
  CHECK_THROWS_AS(ddp::parse_potentials_json(
                      R"({"T": 1, "S": 2, "theta": [[[1.0, 2.0], [0.0, 0.0]]]})"),
                  std::invalid_argument);
  // Ragged tensor.
  CHECK_THROWS_AS(ddp::parse_potentials_json(
                      R"({"T": 1, "S": 2, "theta": [[[1.0], [0.0, 0.0]]]})"),
                  std::invalid_argument);
}
