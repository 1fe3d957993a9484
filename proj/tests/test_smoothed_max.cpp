#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>
#include <vector>

#include "ddp/smoothed_max.hpp"
#include "test_util.hpp"

using ddp::Regularizer;
using testutil::Rng;

namespace {

double fd_value(std::vector<double> x, std::size_t i, const Regularizer& reg) {
  x[i] += testutil::kFdStep;
  const double plus = ddp::max_omega(x, reg);
  x[i] -= 2.0 * testutil::kFdStep;
  const double minus = ddp::max_omega(x, reg);
  return (plus - minus) / (2.0 * testutil::kFdStep);
}

}  // namespace

TEST_CASE("negentropy value: symmetric pair is log 2") {
  const std::vector<double> x{0.0, 0.0};
  CHECK(std::abs(ddp::max_omega(x, Regularizer::entropy()) - std::log(2.0)) <=
        1e-12);
}

TEST_CASE("l2 value: symmetric pair") {
  const std::vector<double> x{0.0, 0.0};
  // q = (1/2, 1/2), so the value is 0 - (1/2)(1/2) = -1/4.
  CHECK(std::abs(ddp::max_omega(x, Regularizer::l2()) + 0.25) <= 1e-15);
}

TEST_CASE("l2 value: truncated coordinate") {
  const std::vector<double> x{0.8, 0.2, -5.0};
  const std::vector<double> q = ddp::grad_max_omega(x, Regularizer::l2());
  const std::vector<double> expect = testutil::project_simplex_oracle(x);
  for (int i = 0; i < 3; ++i) CHECK(std::abs(q[i] - expect[i]) <= 1e-12);
  CHECK(q[2] == 0.0);
  CHECK(std::abs(ddp::max_omega(x, Regularizer::l2()) - 0.34) <= 1e-12);
}

TEST_CASE("single active coordinate") {
  const std::vector<double> x{3.5};
  CHECK(ddp::max_omega(x, Regularizer::entropy(0.8)) == 3.5);
  CHECK(std::abs(ddp::max_omega(x, Regularizer::l2(0.8)) - (3.5 - 0.4)) <=
        1e-15);

  const std::vector<double> with_masked{10.0, 99.0};
  const std::vector<std::uint8_t> active{1, 0};
  for (const auto& reg : {Regularizer::entropy(), Regularizer::l2()}) {
    const std::vector<double> q = ddp::grad_max_omega(with_masked, active, reg);
    CHECK(q[0] == 1.0);
    CHECK(q[1] == 0.0);
  }
}

TEST_CASE("gradient examples") {
  const std::vector<double> q =
      ddp::grad_max_omega(std::vector<double>{0.0, 0.0}, Regularizer::entropy());
  CHECK(std::abs(q[0] - 0.5) <= 1e-15);
  CHECK(std::abs(q[1] - 0.5) <= 1e-15);
}

TEST_CASE("masked entries never enter the arithmetic") {
  // A NaN behind the mask must not poison the result.
  const std::vector<double> x{1.0, std::nan(""), 0.0};
  const std::vector<std::uint8_t> active{1, 0, 1};
  const double v = ddp::max_omega(x, active, Regularizer::entropy());
  CHECK(std::abs(v - std::log(std::exp(1.0) + 1.0)) <= 1e-12);
  const std::vector<double> q = ddp::grad_max_omega(x, active, Regularizer::l2());
  CHECK(q[1] == 0.0);
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS(ddp::max_omega(std::vector<double>{}, Regularizer::entropy()),
                  std::domain_error);
  const std::vector<double> x{1.0, 2.0};
  const std::vector<std::uint8_t> none{0, 0};
  CHECK_THROWS_AS(ddp::max_omega(x, none, Regularizer::entropy()),
                  std::domain_error);
  const std::vector<double> bad{1.0, std::nan("")};
  CHECK_THROWS_AS(ddp::max_omega(bad, Regularizer::l2()), std::domain_error);
  const std::vector<double> inf{1.0, std::numeric_limits<double>::infinity()};
  CHECK_THROWS_AS(ddp::grad_max_omega(inf, Regularizer::entropy()),
                  std::domain_error);
}

TEST_CASE("hess_vec examples") {
  const Regularizer entropy = Regularizer::entropy();
  const std::vector<double> vertex{1.0, 0.0};
  const std::vector<double> z{3.0, -7.0};
  const std::vector<double> h = ddp::hess_vec(vertex, z, entropy);
  CHECK(h[0] == 0.0);
  CHECK(h[1] == 0.0);

  const std::vector<double> mid{0.5, 0.5};
  const std::vector<double> z2{1.0, -1.0};
  const std::vector<double> h2 = ddp::hess_vec(mid, z2, entropy);
  CHECK(std::abs(h2[0] - 0.5) <= 1e-15);
  CHECK(std::abs(h2[1] + 0.5) <= 1e-15);

  // Constants on the support are annihilated.
  const std::vector<double> q{0.8, 0.2, 0.0};
  const std::vector<double> ones{1.0, 1.0, 1.0};
  for (double v : ddp::hess_vec(q, ones, Regularizer::l2()))
    CHECK(std::abs(v) <= 1e-15);

  CHECK_THROWS_AS(ddp::hess_vec(mid, ones, entropy), std::invalid_argument);
}

TEST_CASE("project_simplex examples") {
  const std::vector<double> on{0.3, 0.3, 0.4};
  const std::vector<double> p1 = ddp::project_simplex(on);
  for (int i = 0; i < 3; ++i) CHECK(std::abs(p1[i] - on[i]) <= 1e-15);

  const std::vector<double> p2 = ddp::project_simplex(std::vector<double>{2.0, 0.0});
  CHECK(p2[0] == 1.0);
  CHECK(p2[1] == 0.0);

  // Hand-run of the sort method: threshold tau = 0 keeps (0.8, 0.2).
  const std::vector<double> p3 =
      ddp::project_simplex(std::vector<double>{0.8, 0.2, -5.0});
  CHECK(std::abs(p3[0] - 0.8) <= 1e-15);
  CHECK(std::abs(p3[1] - 0.2) <= 1e-15);
  CHECK(p3[2] == 0.0);
}

TEST_CASE("project_simplex agrees with the KKT subset oracle") {
  Rng rng(7);
  for (int trial = 0; trial < 500; ++trial) {
    const int d = testutil::uniform_int(rng, 1, 8);
    std::vector<double> x(d);
    for (double& v : x) v = testutil::uniform(rng, -3.0, 3.0);
    const std::vector<double> got = ddp::project_simplex(x);
    const std::vector<double> want = testutil::project_simplex_oracle(x);
    double sum = 0.0;
    for (int i = 0; i < d; ++i) {
      CHECK(std::abs(got[i] - want[i]) <= 1e-10);
      CHECK(got[i] >= 0.0);
      sum += got[i];
    }
    CHECK(std::abs(sum - 1.0) <= 1e-12);
  }
}

TEST_CASE("gradient lies on the simplex") {
  Rng rng(11);
  for (const auto& reg :
       {Regularizer::entropy(), Regularizer::l2(), Regularizer::entropy(0.3),
        Regularizer::l2(2.5)}) {
    for (int trial = 0; trial < 200; ++trial) {
      const int d = testutil::uniform_int(rng, 2, 10);
      std::vector<double> x(d);
      for (double& v : x) v = testutil::uniform(rng, -4.0, 4.0);
      const std::vector<double> q = ddp::grad_max_omega(x, reg);
      double sum = 0.0;
      for (double v : q) {
        CHECK(v >= 0.0);
        sum += v;
      }
      CHECK(std::abs(sum - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("boundedness") {
  Rng rng(13);
  for (int trial = 0; trial < 1000; ++trial) {
    const int d = testutil::uniform_int(rng, 2, 10);
    const double gamma = testutil::uniform(rng, 0.2, 3.0);
    std::vector<double> x(d);
    for (double& v : x) v = testutil::uniform(rng, -5.0, 5.0);
    const double hard = *std::max_element(x.begin(), x.end());

    const double ve = ddp::max_omega(x, Regularizer::entropy(gamma));
    CHECK(ve >= hard - 1e-12);
    CHECK(ve <= hard + gamma * std::log(double(d)) + 1e-12);

    const double vl = ddp::max_omega(x, Regularizer::l2(gamma));
    CHECK(vl >= hard - gamma / 2.0 - 1e-12);
    CHECK(vl <= hard - gamma / (2.0 * d) + 1e-12);
  }
}

TEST_CASE("distributivity of addition") {
  Rng rng(17);
  for (const auto& reg : {Regularizer::entropy(0.7), Regularizer::l2(1.3)}) {
    for (int trial = 0; trial < 300; ++trial) {
      const int d = testutil::uniform_int(rng, 2, 8);
      const double c = testutil::uniform(rng, -5.0, 5.0);
      std::vector<double> x(d), shifted(d);
      for (int i = 0; i < d; ++i) {
        x[i] = testutil::uniform(rng, -3.0, 3.0);
        shifted[i] = x[i] + c;
      }
      CHECK(std::abs(ddp::max_omega(shifted, reg) -
                     (ddp::max_omega(x, reg) + c)) <= 1e-10);
    }
  }
}

TEST_CASE("commutativity under permutation") {
  Rng rng(19);
  for (const auto& reg : {Regularizer::entropy(), Regularizer::l2()}) {
    for (int trial = 0; trial < 300; ++trial) {
      const int d = testutil::uniform_int(rng, 2, 8);
      std::vector<double> x(d);
      for (double& v : x) v = testutil::uniform(rng, -3.0, 3.0);
      std::vector<double> permuted = x;
      std::shuffle(permuted.begin(), permuted.end(), rng);
      CHECK(std::abs(ddp::max_omega(permuted, reg) - ddp::max_omega(x, reg)) <=
            1e-12);
    }
  }
}

TEST_CASE("monotonicity in each coordinate") {
  Rng rng(23);
  for (const auto& reg : {Regularizer::entropy(), Regularizer::l2()}) {
    for (int trial = 0; trial < 300; ++trial) {
      const int d = testutil::uniform_int(rng, 2, 8);
      std::vector<double> x(d), y(d);
      for (int i = 0; i < d; ++i) {
        x[i] = testutil::uniform(rng, -3.0, 3.0);
        y[i] = x[i] + testutil::uniform(rng, 0.0, 2.0);
      }
      CHECK(ddp::max_omega(x, reg) <= ddp::max_omega(y, reg) + 1e-12);
    }
  }
}

TEST_CASE("gradient matches central finite differences") {
  Rng rng(29);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = testutil::uniform_int(rng, 2, 8);
    std::vector<double> x(d);
    for (double& v : x) v = testutil::uniform(rng, -2.0, 2.0);

    const std::vector<double> qe = ddp::grad_max_omega(x, Regularizer::entropy());
    for (int i = 0; i < d; ++i)
      CHECK(std::abs(qe[i] - fd_value(x, i, Regularizer::entropy())) <= 1e-5);

    // l2: only meaningful where the projection support is stable under the
    // probe, since the gradient is piecewise linear.
    const Regularizer l2 = Regularizer::l2();
    const std::vector<double> ql = ddp::grad_max_omega(x, l2);
    for (int i = 0; i < d; ++i) {
      std::vector<double> plus = x, minus = x;
      plus[i] += testutil::kFdStep;
      minus[i] -= testutil::kFdStep;
      if (!testutil::same_support(ddp::grad_max_omega(plus, l2), ql) ||
          !testutil::same_support(ddp::grad_max_omega(minus, l2), ql))
        continue;
      CHECK(std::abs(ql[i] - fd_value(x, i, l2)) <= 1e-5);
    }
  }
}

TEST_CASE("hess_vec matches finite differences of the gradient") {
  Rng rng(31);
  for (const auto& reg : {Regularizer::entropy(), Regularizer::l2()}) {
    for (int trial = 0; trial < 200; ++trial) {
      const int d = testutil::uniform_int(rng, 2, 8);
      std::vector<double> x(d), z(d);
      for (double& v : x) v = testutil::uniform(rng, -2.0, 2.0);
      for (double& v : z) v = testutil::uniform(rng, -1.0, 1.0);

      const std::vector<double> q = ddp::grad_max_omega(x, reg);
      std::vector<double> plus = x, minus = x;
      for (int i = 0; i < d; ++i) {
        plus[i] += testutil::kFdStep * z[i];
        minus[i] -= testutil::kFdStep * z[i];
      }
      const std::vector<double> qp = ddp::grad_max_omega(plus, reg);
      const std::vector<double> qm = ddp::grad_max_omega(minus, reg);
      if (reg.kind == ddp::RegKind::SquaredL2 &&
          (!testutil::same_support(qp, q) || !testutil::same_support(qm, q)))
        continue;
      const std::vector<double> h = ddp::hess_vec(q, z, reg);
      for (int i = 0; i < d; ++i) {
        const double fd = (qp[i] - qm[i]) / (2.0 * testutil::kFdStep);
        CHECK(std::abs(h[i] - fd) <= 1e-5);
      }
    }
  }
}

TEST_CASE("associativity holds for negentropy only") {
  Rng rng(37);
  const Regularizer entropy = Regularizer::entropy(0.9);
  for (int trial = 0; trial < 1000; ++trial) {
    const int d = testutil::uniform_int(rng, 2, 6);
    std::vector<double> x(d);
    for (double& v : x) v = testutil::uniform(rng, -3.0, 3.0);
    const double c = testutil::uniform(rng, -3.0, 3.0);

    std::vector<double> folded{ddp::max_omega(x, entropy), c};
    std::vector<double> flat = x;
    flat.push_back(c);
    CHECK(std::abs(ddp::max_omega(folded, entropy) -
                   ddp::max_omega(flat, entropy)) <= 1e-10);
  }

  // Concrete counterexample for the l2 regularizer.
  const Regularizer l2 = Regularizer::l2();
  const std::vector<double> x{0.0, 0.0};
  const std::vector<double> folded{ddp::max_omega(x, l2), 0.0};
  const std::vector<double> flat{0.0, 0.0, 0.0};
  CHECK(std::abs(ddp::max_omega(folded, l2) - ddp::max_omega(flat, l2)) > 0.1);
}
