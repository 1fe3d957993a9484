#ifndef DDP_REGULARIZER_HPP
#define DDP_REGULARIZER_HPP

#include <stdexcept>

namespace ddp {

enum class RegKind { NegEntropy, SquaredL2 };

// Strongly convex regularizer on the probability simplex, together with its
// temperature gamma > 0.  NegEntropy is gamma * sum_i q_i log q_i (log-sum-exp
// / softmax family), SquaredL2 is (gamma/2) * ||q||^2 (sparse projection
// family).  Smaller gamma means less smoothing.
struct Regularizer {
  RegKind kind = RegKind::NegEntropy;
  double gamma = 1.0;

  static Regularizer entropy(double gamma = 1.0) {
    check_gamma(gamma);
    return Regularizer{RegKind::NegEntropy, gamma};
  }

  static Regularizer l2(double gamma = 1.0) {
    check_gamma(gamma);
    return Regularizer{RegKind::SquaredL2, gamma};
  }

  static void check_gamma(double gamma) {
    if (!(gamma > 0.0))
      throw std::invalid_argument("regularizer temperature must be positive");
  }
};

}  // namespace ddp

#endif
