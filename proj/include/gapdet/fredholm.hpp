#pragma once

// Nystrom discretization of (matrix-valued) integral operators and the
// determinant engine built on it: det(I - K) by pivoted LU, the Carleman
// det2 by the eigenvalue product, resolvent solves and Jacobi log-derivatives.

#include <Eigen/Dense>
#include <cmath>
#include <concepts>
#include <span>
#include <vector>

#include "gapdet/core.hpp"

namespace gapdet {

/// One row/column of a discretized operator: a quadrature node carrying one
/// vector component of the C^n-valued function space.
struct NodeInfo {
  std::size_t component = 0;  // contour component (or time index for interval grids)
  int group = 0;              // orthogonality group of the component
  std::size_t block = 0;      // vector component, 0 <= block < n
  std::size_t node = 0;       // index inside the component grid
  Complex point{};
  Complex weight{};
};

struct DetDiagnostics {
  double condition = 1.0;  // 1 / rcond estimate of I - M
  double truncation_radius = 0.0;
  int m = 0;
  double max_imag = 0.0;  // |Im det|
};

struct DetResult {
  Complex value{1.0, 0.0};
  Complex log_value{};
  DetDiagnostics diagnostics;
};

class DiscreteOperator {
 public:
  DiscreteOperator() = default;

  /// Wraps kernel samples K[r,c] (with respect to the contour measure) into
  /// sqrt(w_r) K sqrt(w_c) when symmetrized, else K w_c.
  DiscreteOperator(std::vector<NodeInfo> layout, const Eigen::MatrixXcd& kernel, bool symmetrize = true)
      : layout_(std::move(layout)), symmetrized_(symmetrize) {
    const auto n = static_cast<Eigen::Index>(layout_.size());
    if (kernel.rows() != n || kernel.cols() != n) {
      throw std::invalid_argument("kernel sample matrix does not match the node layout");
    }
    sqrt_w_.resize(n);
    for (Eigen::Index r = 0; r < n; ++r) sqrt_w_[r] = std::sqrt(layout_[r].weight);
    if (!kernel.allFinite()) throw NumericalError("non-finite kernel sample");
    if (symmetrized_) {
      matrix_ = sqrt_w_.asDiagonal() * kernel * sqrt_w_.asDiagonal();
    } else {
      Eigen::VectorXcd w(n);
      for (Eigen::Index r = 0; r < n; ++r) w[r] = layout_[r].weight;
      matrix_ = kernel * w.asDiagonal();
    }
  }

  std::size_t size() const { return layout_.size(); }
  const Eigen::MatrixXcd& matrix() const { return matrix_; }
  std::span<const NodeInfo> layout() const { return layout_; }
  bool symmetrized() const { return symmetrized_; }
  const Eigen::VectorXcd& sqrt_weights() const { return sqrt_w_; }

  /// Optional bookkeeping copied into DetResult diagnostics.
  double truncation_radius = 0.0;
  int m = 0;

 private:
  std::vector<NodeInfo> layout_;
  Eigen::MatrixXcd matrix_;
  Eigen::VectorXcd sqrt_w_;
  bool symmetrized_ = true;
};

/// Samples kernel(row, col) on every node pair.
template <class Sampler>
DiscreteOperator assemble(std::vector<NodeInfo> layout, Sampler&& kernel, bool symmetrize = true) {
  const auto n = static_cast<Eigen::Index>(layout.size());
  Eigen::MatrixXcd k(n, n);
  for (Eigen::Index c = 0; c < n; ++c)
    for (Eigen::Index r = 0; r < n; ++r) k(r, c) = kernel(layout[r], layout[c]);
  return DiscreteOperator(std::move(layout), k, symmetrize);
}

namespace detail {

inline Eigen::MatrixXcd identity_minus(const DiscreteOperator& op) {
  const auto n = static_cast<Eigen::Index>(op.size());
  return Eigen::MatrixXcd::Identity(n, n) - op.matrix();
}

inline void check_conditioning(double rcond) {
  if (!(rcond > 1e-14)) throw NumericalError("operator I - K is numerically singular");
}

}  // namespace detail

/// det(I - M) by partial-pivot LU. The log is accumulated from the pivots.
inline DetResult det(const DiscreteOperator& op) {
  DetResult out;
  out.diagnostics.truncation_radius = op.truncation_radius;
  out.diagnostics.m = op.m;
  if (op.size() == 0) return out;
  const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(detail::identity_minus(op));
  const Eigen::MatrixXcd& u = lu.matrixLU();
  Complex log_sum{};
  for (Eigen::Index k = 0; k < u.rows(); ++k) log_sum += std::log(u(k, k));
  if (lu.permutationP().determinant() < 0) log_sum += Complex(0.0, pi);
  out.log_value = Complex(log_sum.real(), std::remainder(log_sum.imag(), 2 * pi));
  out.value = std::exp(out.log_value);
  const double rc = lu.rcond();
  out.diagnostics.condition = rc > 0 ? 1.0 / rc : std::numeric_limits<double>::infinity();
  out.diagnostics.max_imag = std::abs(out.value.imag());
  return out;
}

/// Carleman det2(I - M) = prod_k (1 - lambda_k) e^{lambda_k} over the spectrum of M.
inline DetResult det2(const DiscreteOperator& op) {
  DetResult out;
  out.diagnostics.truncation_radius = op.truncation_radius;
  out.diagnostics.m = op.m;
  if (op.size() == 0) return out;
  const Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(op.matrix(), false);
  if (es.info() != Eigen::Success) throw NumericalError("eigenvalue iteration failed in det2");
  Complex log_sum{};
  for (const Complex& lam : es.eigenvalues()) log_sum += std::log(1.0 - lam) + lam;
  out.log_value = Complex(log_sum.real(), std::remainder(log_sum.imag(), 2 * pi));
  out.value = std::exp(out.log_value);
  out.diagnostics.max_imag = std::abs(out.value.imag());
  return out;
}

inline Complex trace(const DiscreteOperator& op) { return op.matrix().trace(); }

/// Solves (I - K) F = f for node values f (one column per right-hand side).
/// Symmetrized operators are solved as (I - M)(sqrt(w) F) = sqrt(w) f.
inline Eigen::MatrixXcd solve_resolvent(const DiscreteOperator& op, const Eigen::MatrixXcd& rhs) {
  const auto n = static_cast<Eigen::Index>(op.size());
  if (rhs.rows() != n) throw std::invalid_argument("right-hand side does not match operator size");
  if (n == 0) return rhs;
  const Eigen::MatrixXcd a = detail::identity_minus(op);
  const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a);
  detail::check_conditioning(lu.rcond());

  Eigen::MatrixXcd b = rhs;
  if (op.symmetrized()) {
    for (Eigen::Index r = 0; r < n; ++r) {
      if (op.sqrt_weights()[r] == Complex{}) throw NumericalError("zero quadrature weight in resolvent solve");
    }
    b = op.sqrt_weights().asDiagonal() * rhs;
  }
  Eigen::MatrixXcd y = lu.solve(b);
  const double scale = std::max(b.norm(), std::numeric_limits<double>::min());
  if ((a * y - b).norm() / scale > 1e-10) throw NumericalError("resolvent residual above tolerance");
  if (op.symmetrized()) y = op.sqrt_weights().cwiseInverse().asDiagonal() * y;
  return y;
}

/// Jacobi's formula: d log det(I - K) = -Tr((I + R) dK) = -Tr((I - K)^{-1} dK).
/// `dop` must be assembled on the same layout and with the same symmetrization.
inline Complex logdet_derivative(const DiscreteOperator& op, const DiscreteOperator& dop) {
  if (op.size() == 0) return {};
  if (dop.size() != op.size() || dop.symmetrized() != op.symmetrized()) {
    throw std::invalid_argument("derivative operator layout differs from the operator");
  }
  const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(detail::identity_minus(op));
  detail::check_conditioning(lu.rcond());
  return -lu.solve(dop.matrix()).trace();
}

/// Same, with dK given as a sampler over the layout of `op`.
template <class Sampler>
  requires std::invocable<Sampler&, const NodeInfo&, const NodeInfo&>
Complex logdet_derivative(const DiscreteOperator& op, Sampler&& dkernel) {
  std::vector<NodeInfo> layout(op.layout().begin(), op.layout().end());
  return logdet_derivative(op, assemble(std::move(layout), dkernel, op.symmetrized()));
}

/// IIKS kernel f^T(lambda) g(mu) / (lambda - mu) sampled on a node layout.
///
/// Row r of f and g holds the C^p vector column belonging to nodes[r].block at
/// nodes[r].point; any diagonal gauge has already been applied. Within a group
/// flagged orthogonal the kernel vanishes identically. On other groups,
/// coincident points use the removable limit f'(lambda)^T g(lambda), which
/// needs df (the lambda-derivative of f).
struct IntegrableKernel {
  std::vector<NodeInfo> nodes;
  Eigen::MatrixXcd f;
  Eigen::MatrixXcd g;
  Eigen::MatrixXcd df;
  std::vector<bool> orthogonal_group;
  double truncation_radius = 0.0;
  int m = 0;

  bool orthogonal(int group) const {
    return group >= 0 && static_cast<std::size_t>(group) < orthogonal_group.size() &&
           orthogonal_group[group];
  }

  Complex entry(std::size_t r, std::size_t c) const {
    const NodeInfo& a = nodes[r];
    const NodeInfo& b = nodes[c];
    if (a.group == b.group && orthogonal(a.group)) return {};
    const Complex gap = a.point - b.point;
    if (gap == Complex{}) {
      if (df.size() == 0) throw NumericalError("coincident nodes without a removable-limit rule");
      return df.row(r).transpose().cwiseProduct(g.row(c).transpose()).sum();
    }
    return f.row(r).transpose().cwiseProduct(g.row(c).transpose()).sum() / gap;
  }
};

/// Parameter derivative of an IntegrableKernel (same layout, same gauge).
/// d2f holds d/dlambda of df_param and is needed only for coincident nodes.
struct IntegrableKernelDerivative {
  Eigen::MatrixXcd df_param;
  Eigen::MatrixXcd dg_param;
  Eigen::MatrixXcd d2f;
};

inline DiscreteOperator assemble_integrable(const IntegrableKernel& kernel, bool symmetrize = true) {
  const auto n = static_cast<Eigen::Index>(kernel.nodes.size());
  Eigen::MatrixXcd k(n, n);
  // Dense f g^T once, then divide; orthogonal blocks and coincident points are patched.
  const Eigen::MatrixXcd num = kernel.f * kernel.g.transpose();
  for (Eigen::Index c = 0; c < n; ++c) {
    for (Eigen::Index r = 0; r < n; ++r) {
      const NodeInfo& a = kernel.nodes[r];
      const NodeInfo& b = kernel.nodes[c];
      if (a.group == b.group && kernel.orthogonal(a.group)) {
        k(r, c) = 0.0;
      } else if (a.point == b.point) {
        k(r, c) = kernel.entry(r, c);
      } else {
        k(r, c) = num(r, c) / (a.point - b.point);
      }
    }
  }
  DiscreteOperator op(kernel.nodes, k, symmetrize);
  op.truncation_radius = kernel.truncation_radius;
  op.m = kernel.m;
  return op;
}

/// d log det(I - K) for an integrable kernel and an analytic parameter derivative.
inline Complex logdet_derivative(const DiscreteOperator& op, const IntegrableKernel& kernel,
                                 const IntegrableKernelDerivative& d) {
  const auto n = static_cast<Eigen::Index>(kernel.nodes.size());
  const Eigen::MatrixXcd num = d.df_param * kernel.g.transpose() + kernel.f * d.dg_param.transpose();
  Eigen::MatrixXcd dk(n, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    for (Eigen::Index r = 0; r < n; ++r) {
      const NodeInfo& a = kernel.nodes[r];
      const NodeInfo& b = kernel.nodes[c];
      if (a.group == b.group && kernel.orthogonal(a.group)) {
        dk(r, c) = 0.0;
      } else if (a.point == b.point) {
        if (d.d2f.size() == 0 || kernel.df.size() == 0) {
          throw NumericalError("coincident nodes without a removable-limit rule");
        }
        dk(r, c) = d.d2f.row(r).transpose().cwiseProduct(kernel.g.row(c).transpose()).sum() +
                   kernel.df.row(r).transpose().cwiseProduct(d.dg_param.row(c).transpose()).sum();
      } else {
        dk(r, c) = num(r, c) / (a.point - b.point);
      }
    }
  }
  return logdet_derivative(op, DiscreteOperator(kernel.nodes, dk, op.symmetrized()));
}

}  // namespace gapdet
