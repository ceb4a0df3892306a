#pragma once

// Jump matrices, exponent matrices, resolvent moments Gamma_1, Gamma_2 and the
// finite-difference checks of the log-derivative formulas.

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "gapdet/gap.hpp"

namespace gapdet {

/// (f, g) as p x n matrices at lambda on contour group `group`, ungauged.
inline std::pair<Eigen::MatrixXcd, Eigen::MatrixXcd> iiks_vectors(const GapProblem& pb, int group, Complex lambda) {
  if (pb.process == Process::airy) {
    auto fg = airy::fg_on_group(group, lambda, pb.endpoints, pb.times);
    return {std::move(fg.f), std::move(fg.g)};
  }
  auto fg = pearcey::fg_on_group(group, lambda, pb.endpoints, pb.times);
  return {std::move(fg.f), std::move(fg.g)};
}

/// G(lambda) = f(lambda) g(lambda)^T (p x p); f carries 1/(2 pi i), so the
/// Riemann-Hilbert jump is 1 - 2 pi i G.
inline Eigen::MatrixXcd jump_matrix(const GapProblem& pb, int group, Complex lambda) {
  const auto [f, g] = iiks_vectors(pb, group, lambda);
  return f * g.transpose();
}

inline Eigen::MatrixXcd jump_matrix(const GapProblem& pb, const ContourSystem& sys, Complex lambda) {
  return jump_matrix(pb, sys.component(sys.locate(lambda)).group, lambda);
}

/// Diagonal of the traceless exponent matrix T(lambda).
inline Eigen::VectorXcd exponent_matrix(const GapProblem& pb, Complex lambda) {
  const IIKSLayout layout = IIKSLayout::from(pb.endpoints);
  Eigen::VectorXcd t(static_cast<Eigen::Index>(layout.p));
  Complex total{};
  for (std::size_t i = 0; i < pb.times.size(); ++i) {
    for (std::size_t l = 0; l < pb.endpoints.count(i); ++l) {
      const double a = pb.endpoints(i, l);
      const Complex v = pb.process == Process::airy ? airy::theta(a, lambda - pb.times[i])
                                                    : pearcey::Theta(pb.times[i], a, lambda);
      t[layout.row(i, l)] = -v;
      total += v;
    }
  }
  const Complex t0 = total / static_cast<double>(layout.p);
  t.array() += t0;
  t[0] = t0;
  return t;
}

/// 2 pi i e^{-T} G e^{T}.
inline Eigen::MatrixXcd conjugated_jump(const GapProblem& pb, int group, Complex lambda) {
  const Eigen::MatrixXcd g = jump_matrix(pb, group, lambda);
  const Eigen::VectorXcd t = exponent_matrix(pb, lambda);
  Eigen::MatrixXcd out(g.rows(), g.cols());
  for (Eigen::Index r = 0; r < g.rows(); ++r)
    for (Eigen::Index c = 0; c < g.cols(); ++c) out(r, c) = two_pi_i * g(r, c) * std::exp(t[c] - t[r]);
  return out;
}

struct JumpReport {
  double nilpotency = 0.0;          // max ||G^2|| / ||G||^2
  double integer_deviation = 0.0;   // max distance of 2 pi i e^{-T} G e^{T} entries from {0, +-1}
  double lambda_variation = 0.0;    // max change of the conjugated jump along a component
  double trace_T = 0.0;             // max |Tr T| / max(1, max_r |T_rr|)
  double same_contour = 0.0;        // max |f^T(lambda) g(mu)| for lambda, mu on a common orthogonal contour
  double integrability = 0.0;       // max |f^T(lambda) g(lambda)| on non-orthogonal contours
  int samples = 0;
};

/// Samples `per_component` nodes on every IIKS contour component.
inline JumpReport check_jump_algebra(const GapProblem& pb, int per_component = 20) {
  const ContourSystem sys = iiks_contours(pb);
  const bool airy = pb.process == Process::airy;
  JumpReport rep;
  std::vector<int> ortho_groups;
  for (std::size_t k = 0; k < sys.size(); ++k) {
    const ContourComponent& comp = sys.component(k);
    const QuadratureGrid& grid = sys.grid(k);
    const bool orthogonal = airy || comp.group == pearcey::cross_group;
    const std::size_t stride = std::max<std::size_t>(1, grid.size() / static_cast<std::size_t>(per_component));
    Eigen::MatrixXcd reference;
    std::vector<Complex> picked;
    for (std::size_t q = 0; q < grid.size() && picked.size() < static_cast<std::size_t>(per_component); q += stride)
      picked.push_back(grid.nodes[q]);
    for (const Complex z : picked) {
      const Eigen::MatrixXcd g = jump_matrix(pb, comp.group, z);
      const double gn = g.norm();
      if (gn > 0.0) rep.nilpotency = std::max(rep.nilpotency, (g * g).norm() / (gn * gn));
      const Eigen::MatrixXcd c = conjugated_jump(pb, comp.group, z);
      for (Eigen::Index r = 0; r < c.rows(); ++r)
        for (Eigen::Index s = 0; s < c.cols(); ++s) {
          const Complex v = c(r, s);
          const double nearest = std::clamp(std::round(v.real()), -1.0, 1.0);
          rep.integer_deviation = std::max(rep.integer_deviation, std::abs(v - nearest));
        }
      if (reference.size() == 0) reference = c;
      rep.lambda_variation = std::max(rep.lambda_variation, (c - reference).cwiseAbs().maxCoeff());
      const Eigen::VectorXcd t = exponent_matrix(pb, z);
      rep.trace_T = std::max(rep.trace_T, std::abs(t.sum()) / std::max(1.0, t.cwiseAbs().maxCoeff()));
      const auto [f, gg] = iiks_vectors(pb, comp.group, z);
      if (orthogonal) {
        for (const Complex w : picked) {
          const auto [f2, g2] = iiks_vectors(pb, comp.group, w);
          rep.same_contour = std::max(rep.same_contour, (f.transpose() * g2).cwiseAbs().maxCoeff());
        }
      } else {
        rep.integrability = std::max(rep.integrability, (f.transpose() * gg).cwiseAbs().maxCoeff());
      }
      ++rep.samples;
    }
  }
  return rep;
}

/// Resolvent moments Gamma_k = int F(mu) g^T(mu) mu^{k-1} dmu, F = (Id - K)^{-1} f.
struct GammaMoments {
  Eigen::MatrixXcd first;
  Eigen::MatrixXcd second;
  IIKSLayout layout;
};

inline GammaMoments gamma_moments(const IntegrableKernel& kernel, const DiscreteOperator& op, const IIKSLayout& layout) {
  GammaMoments out;
  out.layout = layout;
  const auto p = static_cast<Eigen::Index>(layout.p);
  out.first = Eigen::MatrixXcd::Zero(p, p);
  out.second = Eigen::MatrixXcd::Zero(p, p);
  if (kernel.nodes.empty()) return out;
  const Eigen::MatrixXcd F = solve_resolvent(op, kernel.f);
  const auto n = static_cast<Eigen::Index>(kernel.nodes.size());
  Eigen::VectorXcd w(n), wz(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    w[r] = kernel.nodes[r].weight;
    wz[r] = kernel.nodes[r].weight * kernel.nodes[r].point;
  }
  out.first = F.transpose() * w.asDiagonal() * kernel.g;
  out.second = F.transpose() * wz.asDiagonal() * kernel.g;
  return out;
}

inline GammaMoments gamma_moments(const GapProblem& pb) {
  const IIKSLayout layout = IIKSLayout::from(pb.endpoints);
  if (pb.endpoints.total() == 0) return gamma_moments(IntegrableKernel{}, DiscreteOperator{}, layout);
  const ContourSystem sys = iiks_contours(pb);
  const IntegrableKernel k = iiks_kernel(pb, sys);
  return gamma_moments(k, assemble_integrable(k), layout);
}

/// d log det / d a_i^(l) = -(Gamma_1)_{rr}, r = row(i, l).
inline Complex endpoint_derivative(const GammaMoments& gm, std::size_t i, std::size_t l) {
  const auto r = static_cast<Eigen::Index>(gm.layout.row(i, l));
  return -gm.first(r, r);
}

/// d log det / d tau_i from the moment formulas of either process.
inline Complex time_derivative(const GapProblem& pb, const GammaMoments& gm, std::size_t i) {
  const Eigen::MatrixXcd g1sq = gm.first * gm.first;
  Complex s{};
  for (std::size_t l = 0; l < pb.endpoints.count(i); ++l) {
    const auto r = static_cast<Eigen::Index>(gm.layout.row(i, l));
    if (pb.process == Process::airy) {
      s += 2.0 * pb.times[i] * gm.first(r, r) + g1sq(r, r) - 2.0 * gm.second(r, r);
    } else {
      s += 0.5 * (g1sq(r, r) - 2.0 * gm.second(r, r));
    }
  }
  return s;
}

struct DerivativeCheck {
  std::string parameter;           // "a[i][l]" or "tau[i]"
  double formula = 0.0;            // Gamma-moment value
  std::vector<double> steps;
  std::vector<double> fd;          // central differences of log det
  std::vector<double> rel_error;   // |fd - formula| / max(|formula|, 1e-6 * largest |formula| in the report)
  std::vector<double> ratios;      // rel_error[k] / rel_error[k + 1]
  bool significant = true;         // false when the derivative itself is below that floor
  double best_error() const { return rel_error.empty() ? 0.0 : rel_error.back(); }
};

struct DerivativeReport {
  std::vector<DerivativeCheck> checks;
  double log_det = 0.0;

  double max_error() const {
    double m = 0.0;
    for (const auto& c : checks) m = std::max(m, c.best_error());
    return m;
  }
  /// Smallest convergence ratio over checks whose errors are above `floor`.
  double min_ratio(double floor = 1e-9) const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& c : checks)
      for (std::size_t k = 0; c.significant && k < c.ratios.size(); ++k)
        if (c.rel_error[k + 1] > floor) m = std::min(m, c.ratios[k]);
    return m;
  }
};

inline std::vector<double> default_fd_steps() { return {0.02, 0.01, 0.005}; }

namespace detail {
inline double log_det_real(const GapProblem& pb, Representation rep) { return determinant(pb, rep).log_value.real(); }

inline void finish_checks(std::vector<DerivativeCheck>& checks) {
  double largest = 0.0;
  for (const auto& c : checks) largest = std::max(largest, std::abs(c.formula));
  const double floor = std::max(1e-6 * largest, std::numeric_limits<double>::min());
  for (auto& c : checks) {
    c.significant = std::abs(c.formula) >= floor;
    const double denom = std::max(std::abs(c.formula), floor);
    for (double v : c.fd) c.rel_error.push_back(std::abs(v - c.formula) / denom);
    for (std::size_t k = 0; k + 1 < c.rel_error.size(); ++k)
      c.ratios.push_back(c.rel_error[k] / std::max(c.rel_error[k + 1], std::numeric_limits<double>::min()));
  }
}
}  // namespace detail

/// Compares central differences of log det (physical representation, the
/// independent side) against the Gamma-moment formulas for every endpoint
/// and every time.
inline DerivativeReport check_derivatives(const GapProblem& pb, std::vector<double> steps = default_fd_steps(),
                                          Representation fd_rep = Representation::physical) {
  DerivativeReport rep;
  rep.log_det = detail::log_det_real(pb, fd_rep);
  const GammaMoments gm = gamma_moments(pb);
  for (std::size_t i = 0; i < pb.times.size(); ++i) {
    for (std::size_t l = 0; l < pb.endpoints.count(i); ++l) {
      std::vector<double> fd;
      for (double h : steps) {
        const double up = detail::log_det_real(pb.with_endpoints(pb.endpoints.shifted(i, l, h)), fd_rep);
        const double dn = detail::log_det_real(pb.with_endpoints(pb.endpoints.shifted(i, l, -h)), fd_rep);
        fd.push_back((up - dn) / (2 * h));
      }
      rep.checks.push_back({"a[" + std::to_string(i) + "][" + std::to_string(l) + "]",
                            endpoint_derivative(gm, i, l).real(), steps, std::move(fd), {}, {}});
    }
  }
  for (std::size_t i = 0; i < pb.times.size(); ++i) {
    if (pb.endpoints.count(i) == 0) continue;
    std::vector<double> fd;
    for (double h : steps) {
      std::vector<double> up(pb.times.values().begin(), pb.times.values().end()), dn = up;
      up[i] += h;
      dn[i] -= h;
      fd.push_back((detail::log_det_real(pb.with_times(TimeGrid(up)), fd_rep) -
                    detail::log_det_real(pb.with_times(TimeGrid(dn)), fd_rep)) / (2 * h));
    }
    rep.checks.push_back({"tau[" + std::to_string(i) + "]", time_derivative(pb, gm, i).real(), steps, std::move(fd),
                          {}, {}});
  }
  detail::finish_checks(rep.checks);
  return rep;
}

inline DerivativeReport check_airy_derivatives(const GapProblem& pb, std::vector<double> steps = default_fd_steps()) {
  if (pb.process != Process::airy) throw ConfigError("check_airy_derivatives needs an Airy problem");
  return check_derivatives(pb, std::move(steps));
}

inline DerivativeReport check_pearcey_derivatives(const GapProblem& pb,
                                                  std::vector<double> steps = default_fd_steps()) {
  if (pb.process != Process::pearcey) throw ConfigError("check_pearcey_derivatives needs a Pearcey problem");
  return check_derivatives(pb, std::move(steps));
}

}  // namespace gapdet
