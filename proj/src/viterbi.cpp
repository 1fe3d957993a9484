#include "ddp/viterbi.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "ddp/smoothed_max.hpp"

namespace ddp {

void validate_potentials(const Tensor3& theta) {
  if (theta.d0 < 1 || theta.d1 < 1 || theta.d1 != theta.d2)
    throw std::invalid_argument("potentials: expected a T x S x S tensor, T,S >= 1");
  for (double v : theta.data)
    if (!std::isfinite(v))
      throw std::invalid_argument("potentials: entries must be finite");
  for (int i = 0; i < theta.d1; ++i)
    for (int j = 1; j < theta.d2; ++j)
      if (theta(0, i, j) != theta(0, i, 0))
        throw std::invalid_argument(
            "potentials: the t = 1 slice must not depend on the previous state");
}

namespace {

// Forward pass shared by value/gradient: fills per-layer values and, when
// given, the local gradients.  Returns the terminal smoothed max.
double forward_values(const Tensor3& theta, const Regularizer& reg, Matrix& v,
                      Tensor3* q, std::span<double> terminal_grad) {
  const int t_len = theta.d0, s_len = theta.d1;
  v = Matrix(t_len, s_len);
  std::vector<double> buf(s_len);

  for (int i = 0; i < s_len; ++i) {
    // Single start node: only the j = 0 column of the first slice is read.
    const double x0 = theta(0, i, 0);
    v(0, i) = max_omega(std::span<const double>(&x0, 1), reg);
    if (q) (*q)(0, i, 0) = 1.0;
  }
  for (int t = 1; t < t_len; ++t) {
    for (int i = 0; i < s_len; ++i) {
      for (int j = 0; j < s_len; ++j) buf[j] = theta(t, i, j) + v(t - 1, j);
      if (q)
        v(t, i) = max_omega_grad(buf, reg, q->row(t, i));
      else
        v(t, i) = max_omega(buf, reg);
    }
  }
  if (!terminal_grad.empty())
    return max_omega_grad(v.row(t_len - 1), reg, terminal_grad);
  return max_omega(v.row(t_len - 1), reg);
}

}  // namespace

double viterbi_value(const Tensor3& theta, const Regularizer& reg) {
  validate_potentials(theta);
  Matrix v;
  return forward_values(theta, reg, v, nullptr, {});
}

ViterbiGradient viterbi_grad(const Tensor3& theta, const Regularizer& reg) {
  validate_potentials(theta);
  const int t_len = theta.d0, s_len = theta.d1;

  ViterbiGradient out;
  out.transitions = Tensor3(t_len, s_len, s_len);
  out.terminal.assign(s_len, 0.0);
  Matrix v;
  out.value = forward_values(theta, reg, v, &out.transitions, out.terminal);

  out.marginals = Tensor3(t_len, s_len, s_len);
  out.state_occupancy = Matrix(t_len, s_len);
  for (int i = 0; i < s_len; ++i)
    out.state_occupancy(t_len - 1, i) = out.terminal[i];
  for (int t = t_len - 1; t >= 0; --t) {
    for (int i = 0; i < s_len; ++i)
      for (int j = 0; j < s_len; ++j)
        out.marginals(t, i, j) =
            out.transitions(t, i, j) * out.state_occupancy(t, i);
    if (t > 0)
      for (int j = 0; j < s_len; ++j) {
        double acc = 0.0;
        for (int i = 0; i < s_len; ++i) acc += out.marginals(t, i, j);
        out.state_occupancy(t - 1, j) = acc;
      }
  }
  return out;
}

ViterbiHessianProduct viterbi_hessian_product(const Tensor3& theta,
                                              const Tensor3& z,
                                              const Regularizer& reg) {
  validate_potentials(theta);
  if (!z.same_shape(theta))
    throw std::invalid_argument("viterbi_hessian_product: Z shape mismatch");

  const ViterbiGradient grad = viterbi_grad(theta, reg);
  const int t_len = theta.d0, s_len = theta.d1;

  // Forward: directional derivative and curvature of the local gradients.
  Matrix vdot(t_len, s_len);
  Tensor3 qdot(t_len, s_len, s_len);
  std::vector<double> buf(s_len);
  for (int i = 0; i < s_len; ++i) vdot(0, i) = z(0, i, 0);
  for (int t = 1; t < t_len; ++t) {
    for (int i = 0; i < s_len; ++i) {
      double acc = 0.0;
      for (int j = 0; j < s_len; ++j) {
        buf[j] = z(t, i, j) + vdot(t - 1, j);
        acc += grad.transitions(t, i, j) * buf[j];
      }
      vdot(t, i) = acc;
      hess_vec(grad.transitions.row(t, i), buf, reg, qdot.row(t, i));
    }
  }
  double directional = 0.0;
  for (int i = 0; i < s_len; ++i)
    directional += grad.terminal[i] * vdot(t_len - 1, i);
  std::vector<double> terminal_dot =
      hess_vec(grad.terminal, vdot.row(t_len - 1), reg);

  // Backward: product rule on e(t,i,j) = q(t,i,j) * u(t,i).
  ViterbiHessianProduct out;
  out.directional = directional;
  out.product = Tensor3(t_len, s_len, s_len);
  Matrix udot(t_len, s_len);
  for (int i = 0; i < s_len; ++i) udot(t_len - 1, i) = terminal_dot[i];
  for (int t = t_len - 1; t >= 0; --t) {
    for (int i = 0; i < s_len; ++i)
      for (int j = 0; j < s_len; ++j)
        out.product(t, i, j) =
            qdot(t, i, j) * grad.state_occupancy(t, i) +
            grad.transitions(t, i, j) * udot(t, i);
    if (t > 0)
      for (int j = 0; j < s_len; ++j) {
        double acc = 0.0;
        for (int i = 0; i < s_len; ++i) acc += out.product(t, i, j);
        udot(t - 1, j) = acc;
      }
  }
  return out;
}

Matrix state_marginals(const Tensor3& marginals) {
  Matrix p(marginals.d0, marginals.d1);
  for (int t = 0; t < marginals.d0; ++t)
    for (int i = 0; i < marginals.d1; ++i) {
      double acc = 0.0;
      for (int j = 0; j < marginals.d2; ++j) acc += marginals(t, i, j);
      p(t, i) = acc;
    }
  return p;
}

HardSequence hard_viterbi(const Tensor3& theta) {
  validate_potentials(theta);
  const int t_len = theta.d0, s_len = theta.d1;
  Matrix v(t_len, s_len);
  std::vector<std::vector<int>> best(t_len, std::vector<int>(s_len, 0));

  for (int i = 0; i < s_len; ++i) v(0, i) = theta(0, i, 0);
  for (int t = 1; t < t_len; ++t) {
    for (int i = 0; i < s_len; ++i) {
      double best_score = -std::numeric_limits<double>::infinity();
      for (int j = 0; j < s_len; ++j) {
        const double score = theta(t, i, j) + v(t - 1, j);
        if (score > best_score) {
          best_score = score;
          best[t][i] = j;
        }
      }
      v(t, i) = best_score;
    }
  }

  HardSequence out;
  int state = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < s_len; ++i) {
    if (v(t_len - 1, i) > best_score) {
      best_score = v(t_len - 1, i);
      state = i;
    }
  }
  out.value = best_score;
  out.states.assign(t_len, 0);
  out.states[t_len - 1] = state;
  for (int t = t_len - 1; t > 0; --t) {
    state = best[t][state];
    out.states[t - 1] = state;
  }
  return out;
}

Tensor3 linear_potentials(const Matrix& x, const Matrix& w,
                          std::span<const double> b, const Matrix& trans) {
  const int t_len = x.rows, s_len = w.rows, dim = x.cols;
  if (w.cols != dim)
    throw std::invalid_argument("linear_potentials: feature dimension mismatch");
  if (static_cast<int>(b.size()) != s_len || trans.rows != s_len ||
      trans.cols != s_len)
    throw std::invalid_argument("linear_potentials: state dimension mismatch");

  Tensor3 theta(t_len, s_len, s_len);
  for (int t = 0; t < t_len; ++t) {
    for (int i = 0; i < s_len; ++i) {
      double emit = b[i];
      for (int d = 0; d < dim; ++d) emit += w(i, d) * x(t, d);
      for (int j = 0; j < s_len; ++j)
        theta(t, i, j) = t == 0 ? emit : emit + trans(i, j);
    }
  }
  return theta;
}

Tensor3 parse_potentials_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& err) {
    throw std::invalid_argument(std::string("potentials json: ") + err.what());
  }
  if (!doc.contains("T") || !doc.contains("S") || !doc.contains("theta"))
    throw std::invalid_argument("potentials json: need fields T, S, theta");
  const int t_len = doc["T"].get<int>();
  const int s_len = doc["S"].get<int>();
  if (t_len < 1 || s_len < 1)
    throw std::invalid_argument("potentials json: T and S must be >= 1");

  const auto& nested = doc["theta"];
  if (!nested.is_array() || static_cast<int>(nested.size()) != t_len)
    throw std::invalid_argument("potentials json: theta must be a T x S x S array");
  Tensor3 theta(t_len, s_len, s_len);
  for (int t = 0; t < t_len; ++t) {
    const auto& slice = nested[t];
    if (!slice.is_array() || static_cast<int>(slice.size()) != s_len)
      throw std::invalid_argument("potentials json: theta must be a T x S x S array");
    for (int i = 0; i < s_len; ++i) {
      const auto& row = slice[i];
      if (!row.is_array() || static_cast<int>(row.size()) != s_len)
        throw std::invalid_argument("potentials json: theta must be a T x S x S array");
      for (int j = 0; j < s_len; ++j) {
        if (!row[j].is_number())
          throw std::invalid_argument("potentials json: entries must be numbers");
        theta(t, i, j) = row[j].get<double>();
      }
    }
  }
  validate_potentials(theta);
  return theta;
}

Tensor3 load_potentials_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open potentials file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_potentials_json(buffer.str());
}

}  // namespace ddp
