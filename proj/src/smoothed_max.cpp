#include "ddp/smoothed_max.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace ddp {

namespace {

void check_input(std::span<const double> x) {
  if (x.empty())
    throw std::domain_error("smoothed max needs at least one active entry");
  for (double v : x) {
    if (!std::isfinite(v))
      throw std::domain_error("smoothed max input must be finite");
  }
}

double max_entry(std::span<const double> x) {
  double m = -std::numeric_limits<double>::infinity();
  for (double v : x) m = std::max(m, v);
  return m;
}

}  // namespace

void project_simplex(std::span<const double> x, std::span<double> out) {
  check_input(x);
  if (out.size() != x.size())
    throw std::invalid_argument("project_simplex: output length mismatch");

  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());

  // Largest k with sorted[k-1] - (cumsum_k - 1)/k > 0 gives the threshold.
  double cumsum = 0.0;
  double tau = 0.0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    cumsum += sorted[k];
    const double candidate = (cumsum - 1.0) / static_cast<double>(k + 1);
    if (sorted[k] - candidate > 0.0) tau = candidate;
  }
  for (std::size_t i = 0; i < x.size(); ++i)
    out[i] = std::max(x[i] - tau, 0.0);
}

std::vector<double> project_simplex(std::span<const double> x) {
  std::vector<double> out(x.size());
  project_simplex(x, out);
  return out;
}

double max_omega(std::span<const double> x, const Regularizer& reg) {
  check_input(x);
  Regularizer::check_gamma(reg.gamma);
  if (reg.kind == RegKind::NegEntropy) {
    const double m = max_entry(x);
    double sum = 0.0;
    for (double v : x) sum += std::exp((v - m) / reg.gamma);
    return m + reg.gamma * std::log(sum);
  }
  std::vector<double> scaled(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) scaled[i] = x[i] / reg.gamma;
  std::vector<double> q = project_simplex(scaled);
  double value = 0.0, sqnorm = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    value += q[i] * x[i];
    sqnorm += q[i] * q[i];
  }
  return value - 0.5 * reg.gamma * sqnorm;
}

double max_omega_grad(std::span<const double> x, const Regularizer& reg,
                      std::span<double> grad) {
  check_input(x);
  Regularizer::check_gamma(reg.gamma);
  if (grad.size() != x.size())
    throw std::invalid_argument("max_omega_grad: gradient length mismatch");

  if (reg.kind == RegKind::NegEntropy) {
    const double m = max_entry(x);
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      grad[i] = std::exp((x[i] - m) / reg.gamma);
      sum += grad[i];
    }
    for (std::size_t i = 0; i < x.size(); ++i) grad[i] /= sum;
    return m + reg.gamma * std::log(sum);
  }

  std::vector<double> scaled(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) scaled[i] = x[i] / reg.gamma;
  project_simplex(scaled, grad);
  double value = 0.0, sqnorm = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    value += grad[i] * x[i];
    sqnorm += grad[i] * grad[i];
  }
  return value - 0.5 * reg.gamma * sqnorm;
}

std::vector<double> grad_max_omega(std::span<const double> x,
                                   const Regularizer& reg) {
  std::vector<double> grad(x.size());
  max_omega_grad(x, reg, grad);
  return grad;
}

double max_omega(std::span<const double> x,
                 std::span<const std::uint8_t> active,
                 const Regularizer& reg) {
  if (active.size() != x.size())
    throw std::invalid_argument("max_omega: mask length mismatch");
  std::vector<double> gathered;
  gathered.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    if (active[i]) gathered.push_back(x[i]);
  return max_omega(gathered, reg);
}

std::vector<double> grad_max_omega(std::span<const double> x,
                                   std::span<const std::uint8_t> active,
                                   const Regularizer& reg) {
  if (active.size() != x.size())
    throw std::invalid_argument("grad_max_omega: mask length mismatch");
  std::vector<double> gathered;
  gathered.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    if (active[i]) gathered.push_back(x[i]);
  std::vector<double> sub = grad_max_omega(gathered, reg);
  std::vector<double> grad(x.size(), 0.0);
  std::size_t k = 0;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (active[i]) grad[i] = sub[k++];
  return grad;
}

void hess_vec(std::span<const double> q, std::span<const double> z,
              const Regularizer& reg, std::span<double> out) {
  if (q.size() != z.size() || out.size() != q.size())
    throw std::invalid_argument("hess_vec: length mismatch");
  Regularizer::check_gamma(reg.gamma);

  if (reg.kind == RegKind::NegEntropy) {
    double qz = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) qz += q[i] * z[i];
    for (std::size_t i = 0; i < q.size(); ++i)
      out[i] = (q[i] * z[i] - q[i] * qz) / reg.gamma;
    return;
  }

  double support = 0.0, sz = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i] > 0.0) {
      support += 1.0;
      sz += z[i];
    }
  }
  const double mean = support > 0.0 ? sz / support : 0.0;
  for (std::size_t i = 0; i < q.size(); ++i)
    out[i] = q[i] > 0.0 ? (z[i] - mean) / reg.gamma : 0.0;
}

std::vector<double> hess_vec(std::span<const double> q,
                             std::span<const double> z,
                             const Regularizer& reg) {
  std::vector<double> out(q.size());
  hess_vec(q, z, reg, out);
  return out;
}

double min_omega(std::span<const double> x, const Regularizer& reg) {
  std::vector<double> neg(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) neg[i] = -x[i];
  return -max_omega(neg, reg);
}

double min_omega_grad(std::span<const double> x, const Regularizer& reg,
                      std::span<double> grad) {
  std::vector<double> neg(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) neg[i] = -x[i];
  return -max_omega_grad(neg, reg, grad);
}

}  // namespace ddp
