#pragma once

// Multi-time Airy kernel: the phase theta, the Gaussian bridge B, the
// double-contour kernel A = A~ - B on intervals, and the integrable (IIKS)
// data f_A, g_A on gamma_R and the per-time contours.

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "gapdet/contour.hpp"
#include "gapdet/core.hpp"
#include "gapdet/fredholm.hpp"
#include "gapdet/intervals.hpp"

namespace gapdet::airy {

inline Complex theta(double x, Complex mu) { return mu * mu * mu / 3.0 - x * mu; }

/// Gaussian bridge term; zero unless tau_i < tau_j.
inline double gaussian_B(std::size_t i, std::size_t j, double x, double y, const TimeGrid& times) {
  const double dt = times[j] - times[i];
  if (!(dt > 0.0)) return 0.0;
  return std::exp(dt * dt * dt / 12.0 - (x - y) * (x - y) / (4.0 * dt) - dt * (x + y) / 2.0) /
         std::sqrt(4.0 * pi * dt);
}

inline EndpointSet endpoints(std::vector<std::vector<double>> per_time) {
  return EndpointSet(std::move(per_time), EndpointParity::any);
}

// ---------------------------------------------------------------------------
// Double-contour kernel on intervals
// ---------------------------------------------------------------------------

/// Default apex of the left ray pair carrying the lambda variable.
inline double default_left_apex(const TimeGrid& times) { return std::min(0.0, times.front()) - 0.5; }

/// Radii for (gamma_R, left rays) so that e^{theta(x, u - tau_i)} and
/// e^{-theta(y, lambda)} fall below eps over every interval.
inline std::vector<double> physical_radii(const TimeGrid& times, const EndpointSet& ends, double C,
                                          double c_left, double t_cut, double eps) {
  std::vector<IntervalRange> ranges;
  for (std::size_t j = 0; j < ends.times(); ++j) ranges.push_back(interval_range(ends, j, t_cut));
  ContourComponent mu{ContourKind::ray_pair, Complex(C, 0), pi / 3, -pi / 3, 1.0, "gamma_R", 0};
  ContourComponent lam{ContourKind::ray_pair, Complex(c_left, 0), -2 * pi / 3, 2 * pi / 3, 1.0, "gamma_L", 1};
  const double r_mu = decay_radius(mu, [&](Complex u) {
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < ranges.size(); ++i) {
      if (ranges[i].empty) continue;
      for (double x : {ranges[i].lo, ranges[i].hi}) worst = std::max(worst, theta(x, u - times[i]).real());
    }
    return worst;
  }, eps);
  const double r_lam = decay_radius(lam, [&](Complex l) {
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& rg : ranges) {
      if (rg.empty) continue;
      for (double y : {rg.lo, rg.hi}) worst = std::max(worst, -theta(y, l).real());
    }
    return worst;
  }, eps);
  return {r_mu, r_lam};
}

namespace detail {
inline void check_physical_system(const ContourSystem& sys) {
  if (sys.size() != 2) throw ContourError("double-contour Airy kernel needs (gamma_R, left rays)");
}
}  // namespace detail

/// A_ij(x, y) = A~_ij(x, y) - B_ij(x, y) with A~ by double quadrature over
/// mu + tau_i in gamma_R (component 0) and lambda on the left rays (component 1).
inline Complex physical_A_entry(std::size_t i, std::size_t j, double x, double y, const ContourSystem& sys,
                                const TimeGrid& times) {
  detail::check_physical_system(sys);
  const QuadratureGrid& gu = sys.grid(0);
  const QuadratureGrid& gl = sys.grid(1);
  Complex sum{};
  for (std::size_t a = 0; a < gu.size(); ++a) {
    const Complex u = gu.nodes[a];
    const Complex eu = gu.weights[a] * std::exp(theta(x, u - times[i]));
    Complex inner{};
    for (std::size_t b = 0; b < gl.size(); ++b) {
      const Complex den = gl.nodes[b] + times[j] - u;
      if (std::abs(den) < 1e-12) throw ContourError("contour collision in the Airy double integral");
      inner += gl.weights[b] * std::exp(-theta(y, gl.nodes[b])) / den;
    }
    sum += eu * inner;
  }
  return sum / (two_pi_i * two_pi_i) - gaussian_B(i, j, x, y, times);
}

/// Nystrom operator of chi_I A on the interval grid (rows: node x at time i).
inline DiscreteOperator physical_operator(const TimeGrid& times, const EndpointSet& ends, const ContourSystem& sys,
                                          const IntervalGrid& grid, bool symmetrize = true) {
  detail::check_physical_system(sys);
  if (ends.times() != times.size()) throw ConfigError("one endpoint list per time is required");
  const QuadratureGrid& gu = sys.grid(0);
  const QuadratureGrid& gl = sys.grid(1);
  const auto nu = static_cast<Eigen::Index>(gu.size());
  const auto nl = static_cast<Eigen::Index>(gl.size());
  const std::size_t n = times.size();

  std::vector<NodeInfo> layout;
  std::vector<Eigen::Index> start(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    start[i] = static_cast<Eigen::Index>(layout.size());
    for (std::size_t k = 0; k < grid.nodes[i].size(); ++k) {
      layout.push_back({i, static_cast<int>(i), i, k, Complex(grid.nodes[i][k], 0.0),
                        Complex(grid.weights[i][k], 0.0)});
    }
  }
  start[n] = static_cast<Eigen::Index>(layout.size());
  Eigen::MatrixXcd kernel = Eigen::MatrixXcd::Zero(start[n], start[n]);

  for (std::size_t j = 0; j < n; ++j) {
    const auto ny = start[j + 1] - start[j];
    if (ny == 0) continue;
    // (D_j F_j)[u, y] = sum_lambda w_lambda e^{-theta(y, lambda)} / (lambda + tau_j - u)
    Eigen::MatrixXcd den(nu, nl);
    for (Eigen::Index a = 0; a < nu; ++a)
      for (Eigen::Index b = 0; b < nl; ++b) {
        const Complex d = gl.nodes[b] + times[j] - gu.nodes[a];
        if (std::abs(d) < 1e-12) throw ContourError("contour collision in the Airy double integral");
        den(a, b) = 1.0 / d;
      }
    Eigen::MatrixXcd right(nl, ny);
    for (Eigen::Index b = 0; b < nl; ++b)
      for (Eigen::Index q = 0; q < ny; ++q)
        right(b, q) = gl.weights[b] * std::exp(-theta(grid.nodes[j][q], gl.nodes[b]));
    const Eigen::MatrixXcd inner = den * right;
    for (std::size_t i = 0; i < n; ++i) {
      const auto nx = start[i + 1] - start[i];
      if (nx == 0) continue;
      Eigen::MatrixXcd left(nx, nu);
      for (Eigen::Index p = 0; p < nx; ++p)
        for (Eigen::Index a = 0; a < nu; ++a)
          left(p, a) = gu.weights[a] * std::exp(theta(grid.nodes[i][p], gu.nodes[a] - times[i]));
      Eigen::MatrixXcd block = left * inner / (two_pi_i * two_pi_i);
      for (Eigen::Index p = 0; p < nx; ++p)
        for (Eigen::Index q = 0; q < ny; ++q)
          block(p, q) -= gaussian_B(i, j, grid.nodes[i][p], grid.nodes[j][q], times);
      kernel.block(start[i], start[j], nx, ny) = block;
    }
  }
  DiscreteOperator op(std::move(layout), kernel, symmetrize);
  op.truncation_radius = sys.max_radius();
  op.m = sys.nodes_per_component();
  return op;
}

// ---------------------------------------------------------------------------
// Integrable (IIKS) representation
// ---------------------------------------------------------------------------

enum class Block { F, G, H };

/// Block kernels of K_A = [[0, F], [G, H]] with respect to dmu / (2 pi i).
/// `out` is the output variable (first argument), `in` the integration variable.
inline Complex iiks_block_entry(Block block, std::size_t i, std::size_t j, Complex out, Complex in,
                                const EndpointSet& ends, const TimeGrid& times) {
  switch (block) {
    case Block::F:
      return std::exp(0.5 * theta(0.0, out - times[i]) - theta(0.0, in - times[j])) / (out - in);
    case Block::G: {
      if (i != j) return {};
      const Complex xi = out - times[i];
      const Complex mu = in - times[i];
      Complex s{};
      for (std::size_t l = 0; l < ends.count(i); ++l)
        s += alternating_sign(l) * std::exp(0.5 * theta(0.0, mu) - ends(i, l) * (mu - xi));
      return s / (out - in);
    }
    case Block::H: {
      if (!(times[i] < times[j])) return {};
      Complex s{};
      for (std::size_t l = 0; l < ends.count(i); ++l) {
        const double a = ends(i, l);
        s += alternating_sign(l) *
             std::exp(theta(a, in - times[i]) - theta(0.0, in - times[j]) + a * (out - times[i]));
      }
      return s / (out - in);
    }
  }
  return {};
}

/// Contour group of the Airy IIKS system: 0 is gamma_R, j + 1 is time j.
inline constexpr int outer_group = 0;
inline constexpr int time_group(std::size_t j) { return static_cast<int>(j) + 1; }

/// Column `col` of f_A (including the 1/(2 pi i)) at lambda on contour group `group`.
inline Eigen::VectorXcd f_column(int group, std::size_t col, Complex lambda, const EndpointSet& ends,
                                 const TimeGrid& times, const IIKSLayout& layout) {
  Eigen::VectorXcd f = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(layout.p));
  const Complex li = lambda - times[col];
  if (group == outer_group) {
    f[0] = std::exp(0.5 * theta(0.0, li));
  } else if (group == time_group(col)) {
    for (std::size_t l = 0; l < ends.count(col); ++l) f[layout.row(col, l)] = std::exp(ends(col, l) * li);
  }
  return f / two_pi_i;
}

/// Column `col` of g_A at mu on contour group `group`.
inline Eigen::VectorXcd g_column(int group, std::size_t col, Complex mu, const EndpointSet& ends,
                                 const TimeGrid& times, const IIKSLayout& layout) {
  Eigen::VectorXcd g = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(layout.p));
  const Complex mj = mu - times[col];
  if (group == outer_group) {
    for (std::size_t l = 0; l < ends.count(col); ++l)
      g[layout.row(col, l)] = alternating_sign(l) * std::exp(0.5 * theta(0.0, mj) - ends(col, l) * mj);
  } else if (group == time_group(col)) {
    g[0] = std::exp(-theta(0.0, mj));
    for (std::size_t k = 0; k < col; ++k) {
      const Complex mk = mu - times[k];
      for (std::size_t l = 0; l < ends.count(k); ++l)
        g[layout.row(k, l)] = alternating_sign(l) * std::exp(theta(ends(k, l), mk) - theta(0.0, mj));
    }
  }
  return g;
}

struct FG {
  Eigen::MatrixXcd f;  // p x n
  Eigen::MatrixXcd g;  // p x n
};

inline FG fg_on_group(int group, Complex lambda, const EndpointSet& ends, const TimeGrid& times) {
  const IIKSLayout layout = IIKSLayout::from(ends);
  const auto n = static_cast<Eigen::Index>(times.size());
  FG out{Eigen::MatrixXcd(layout.p, n), Eigen::MatrixXcd(layout.p, n)};
  for (Eigen::Index c = 0; c < n; ++c) {
    out.f.col(c) = f_column(group, c, lambda, ends, times, layout);
    out.g.col(c) = g_column(group, c, lambda, ends, times, layout);
  }
  return out;
}

/// (f_A(lambda), g_A(lambda)) for lambda on a component of `sys`.
inline FG iiks_fg(Complex lambda, const ContourSystem& sys, const EndpointSet& ends, const TimeGrid& times) {
  return fg_on_group(sys.component(sys.locate(lambda)).group, lambda, ends, times);
}

/// n x n kernel value f^T(lambda) g(mu) / (lambda - mu); zero on a common contour.
inline Eigen::MatrixXcd iiks_K_entry(Complex lambda, Complex mu, const ContourSystem& sys, const EndpointSet& ends,
                                     const TimeGrid& times) {
  const int gl = sys.component(sys.locate(lambda)).group;
  const int gm = sys.component(sys.locate(mu)).group;
  const auto n = static_cast<Eigen::Index>(times.size());
  if (gl == gm) return Eigen::MatrixXcd::Zero(n, n);
  if (lambda == mu) throw ContourError("coincident points on distinct contours");
  const FG a = fg_on_group(gl, lambda, ends, times);
  const FG b = fg_on_group(gm, mu, ends, times);
  return a.f.transpose() * b.g / (lambda - mu);
}

/// Row gauge e^{-a_j^(1) lambda_j} on time-j contours; identity elsewhere.
inline Complex gauge_factor(int group, Complex lambda, const EndpointSet& ends, const TimeGrid& times) {
  if (group == outer_group) return 1.0;
  const auto j = static_cast<std::size_t>(group - 1);
  if (ends.count(j) == 0) return 1.0;
  return std::exp(-ends(j, 0) * (lambda - times[j]));
}

namespace detail {
inline double log_max_abs(const Eigen::VectorXcd& v) {
  double m = 0.0;
  for (Eigen::Index k = 0; k < v.size(); ++k) m = std::max(m, std::abs(v[k]));
  return m > 0.0 ? std::log(m) : -std::numeric_limits<double>::infinity();
}
}  // namespace detail

/// IIKS contour radii: where max|f| * max|g| (per vector component, gauged)
/// drops below eps on every component.
inline std::vector<double> iiks_radii(const TimeGrid& times, const EndpointSet& ends, double C, bool deform,
                                      double eps) {
  const IIKSLayout layout = IIKSLayout::from(ends);
  const std::vector<double> unit(1, 1.0);
  const ContourSystem probe = build_airy_system(times, C, deform, unit, 4);
  std::vector<double> radii;
  for (std::size_t k = 0; k < probe.size(); ++k) {
    const ContourComponent& comp = probe.component(k);
    radii.push_back(decay_radius(comp, [&](Complex z) {
      double worst = -std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < times.size(); ++c) {
        if (comp.group != outer_group && comp.group != time_group(c)) continue;
        worst = std::max(worst, detail::log_max_abs(f_column(comp.group, c, z, ends, times, layout)) +
                                    detail::log_max_abs(g_column(comp.group, c, z, ends, times, layout)));
      }
      return worst;
    }, eps));
  }
  return radii;
}

/// Gauged IIKS data on the nodes of `sys`: gamma_R carries all n vector
/// components, the contour of time j only component j (the others have
/// identically vanishing kernel rows).
inline IntegrableKernel iiks_kernel(const ContourSystem& sys, const EndpointSet& ends, const TimeGrid& times,
                                    bool gauge = true) {
  if (ends.times() != times.size()) throw ConfigError("one endpoint list per time is required");
  const IIKSLayout layout = IIKSLayout::from(ends);
  IntegrableKernel k;
  for (std::size_t comp = 0; comp < sys.size(); ++comp) {
    const ContourComponent& c = sys.component(comp);
    const QuadratureGrid& grid = sys.grid(comp);
    for (std::size_t b = 0; b < times.size(); ++b) {
      if (c.group != outer_group && c.group != time_group(b)) continue;
      for (std::size_t q = 0; q < grid.size(); ++q)
        k.nodes.push_back({comp, c.group, b, q, grid.nodes[q], grid.weights[q]});
    }
  }
  const auto n = static_cast<Eigen::Index>(k.nodes.size());
  k.f.resize(n, layout.p);
  k.g.resize(n, layout.p);
  for (Eigen::Index r = 0; r < n; ++r) {
    const NodeInfo& nd = k.nodes[r];
    const Complex d = gauge ? gauge_factor(nd.group, nd.point, ends, times) : Complex(1.0);
    k.f.row(r) = d * f_column(nd.group, nd.block, nd.point, ends, times, layout).transpose();
    k.g.row(r) = g_column(nd.group, nd.block, nd.point, ends, times, layout).transpose() / d;
  }
  k.orthogonal_group.assign(times.size() + 1, true);
  k.truncation_radius = sys.max_radius();
  k.m = sys.nodes_per_component();
  return k;
}

/// d/da_i^(l) of the IIKS data, gauge held fixed.
inline IntegrableKernelDerivative iiks_endpoint_derivative(const IntegrableKernel& k, const TimeGrid& times,
                                                           const EndpointSet& ends, std::size_t i, std::size_t l) {
  const IIKSLayout layout = IIKSLayout::from(ends);
  const auto row = static_cast<Eigen::Index>(layout.row(i, l));
  IntegrableKernelDerivative d{Eigen::MatrixXcd::Zero(k.f.rows(), k.f.cols()),
                               Eigen::MatrixXcd::Zero(k.g.rows(), k.g.cols()), {}};
  for (Eigen::Index r = 0; r < k.f.rows(); ++r) {
    const Complex li = k.nodes[r].point - times[i];
    d.df_param(r, row) = li * k.f(r, row);
    d.dg_param(r, row) = -li * k.g(r, row);
  }
  return d;
}

}  // namespace gapdet::airy
