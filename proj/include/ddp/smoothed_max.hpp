#ifndef DDP_SMOOTHED_MAX_HPP
#define DDP_SMOOTHED_MAX_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "ddp/regularizer.hpp"

namespace ddp {

// Smoothed max operator over the simplex:
//
//   max_omega(x) = max_{q in simplex} <q, x> - Omega(q)
//
// Closed forms: negentropy gives the temperature log-sum-exp (with max-shift
// stabilization), squared l2 gives <q*, x> - (gamma/2)||q*||^2 where q* is
// the Euclidean projection of x/gamma onto the simplex.
//
// Note the single-coordinate case: negentropy returns x exactly, squared l2
// returns x - gamma/2 (q = 1 is forced).  On chain-structured programs the
// l2 value therefore shifts by gamma/2 per recursion step.
double max_omega(std::span<const double> x, const Regularizer& reg);

// Fused value + gradient.  Writes the maximizer q (a probability vector,
// softmax or simplex projection) into grad; grad.size() must equal x.size().
double max_omega_grad(std::span<const double> x, const Regularizer& reg,
                      std::span<double> grad);

std::vector<double> grad_max_omega(std::span<const double> x,
                                   const Regularizer& reg);

// Masked variants: entries with active[i] == 0 behave like -inf coordinates.
// They never enter the arithmetic and their gradient is exactly zero.  At
// least one entry must be active.
double max_omega(std::span<const double> x,
                 std::span<const std::uint8_t> active, const Regularizer& reg);
std::vector<double> grad_max_omega(std::span<const double> x,
                                   std::span<const std::uint8_t> active,
                                   const Regularizer& reg);

// Hessian of max_omega applied to a vector, expressed through the gradient q
// it was evaluated at:
//
//   negentropy:  J(q) z = (q o z - q <q, z>) / gamma
//   squared l2:  J(q) z = (s o z - s <s, z> / |s|) / gamma,
//                s the 0/1 support indicator of q
//
// Entries of q that are exactly zero are treated as outside the support, so
// masked coordinates (gradient exactly zero) drop out automatically.
void hess_vec(std::span<const double> q, std::span<const double> z,
              const Regularizer& reg, std::span<double> out);
std::vector<double> hess_vec(std::span<const double> q,
                             std::span<const double> z,
                             const Regularizer& reg);

// Exact Euclidean projection onto the probability simplex, deterministic
// sort-then-threshold method, O(D log D).
void project_simplex(std::span<const double> x, std::span<double> out);
std::vector<double> project_simplex(std::span<const double> x);

// Smoothed min, the reflection min_omega(x) = -max_omega(-x).  Its gradient
// is grad_max_omega(-x) and its Hessian is -J(grad).
double min_omega(std::span<const double> x, const Regularizer& reg);
double min_omega_grad(std::span<const double> x, const Regularizer& reg,
                      std::span<double> grad);

}  // namespace ddp

#endif
