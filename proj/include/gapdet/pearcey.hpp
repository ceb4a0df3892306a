#pragma once

// Multi-time Pearcey kernel: quartic phase, heat-kernel term Q, the
// double-contour kernel P = P~ - Q on bounded intervals, and the IIKS data
// f_P, g_P on the X contour and iR.

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "gapdet/contour.hpp"
#include "gapdet/core.hpp"
#include "gapdet/fredholm.hpp"
#include "gapdet/intervals.hpp"

namespace gapdet::pearcey {

inline Complex Theta(double tau, double x, Complex mu) {
  const Complex mu2 = mu * mu;
  return mu2 * mu2 / 4.0 - tau / 2.0 * mu2 - x * mu;
}

inline Complex Theta(std::size_t i, double x, Complex mu, const TimeGrid& times) {
  return Theta(times[i], x, mu);
}

inline double gaussian_Q(std::size_t i, std::size_t j, double x, double y, const TimeGrid& times) {
  const double dt = times[j] - times[i];
  if (!(dt > 0.0)) return 0.0;
  return std::exp(-(x - y) * (x - y) / (2.0 * dt)) / std::sqrt(2.0 * pi * dt);
}

/// Quadrature of the integral form of Q over a vertical-line grid.
inline Complex gaussian_Q_integral(std::size_t i, std::size_t j, double x, double y, const TimeGrid& times,
                                   const QuadratureGrid& line) {
  const double dt = times[j] - times[i];
  if (!(dt > 0.0)) return {};
  return integrate(line, [&](Complex l) { return std::exp(dt * l * l / 2.0 + (y - x) * l); }) / two_pi_i;
}

inline EndpointSet endpoints(std::vector<std::vector<double>> per_time) {
  return EndpointSet(std::move(per_time), EndpointParity::even);
}

inline constexpr int cross_group = 0;  // gamma_L and gamma_R
inline constexpr int line_group = 1;   // iR

// ---------------------------------------------------------------------------
// Double-contour kernel on intervals
// ---------------------------------------------------------------------------

/// Radii (gamma_R, gamma_L, iR) for the double-contour kernel on the given intervals.
inline std::vector<double> physical_radii(const TimeGrid& times, const EndpointSet& ends, double delta, double eps) {
  std::vector<IntervalRange> ranges;
  for (std::size_t j = 0; j < ends.times(); ++j) ranges.push_back(interval_range(ends, j, 0.0));
  const std::vector<double> unit(1, 1.0);
  const ContourSystem probe = build_pearcey_system(times, delta, unit, 4);
  std::vector<double> radii;
  for (std::size_t k = 0; k < probe.size(); ++k) {
    const double sign = probe.component(k).group == cross_group ? 1.0 : -1.0;
    radii.push_back(decay_radius(probe.component(k), [&](Complex z) {
      double worst = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < ranges.size(); ++i) {
        if (ranges[i].empty) continue;
        for (double x : {ranges[i].lo, ranges[i].hi}) worst = std::max(worst, sign * Theta(times[i], x, z).real());
      }
      return worst;
    }, eps));
  }
  return radii;
}

namespace detail {
struct SplitNodes {
  std::vector<Complex> cross_nodes, cross_weights, line_nodes, line_weights;
};

inline SplitNodes split(const ContourSystem& sys) {
  SplitNodes s;
  for (std::size_t k = 0; k < sys.size(); ++k) {
    const QuadratureGrid& g = sys.grid(k);
    const bool line = sys.component(k).group == line_group;
    auto& nodes = line ? s.line_nodes : s.cross_nodes;
    auto& weights = line ? s.line_weights : s.cross_weights;
    nodes.insert(nodes.end(), g.nodes.begin(), g.nodes.end());
    weights.insert(weights.end(), g.weights.begin(), g.weights.end());
  }
  return s;
}
}  // namespace detail

/// P_ij(x, y) = P~_ij(x, y) - Q_ij(x, y) with mu on gamma_L u gamma_R, lambda on iR.
inline Complex physical_P_entry(std::size_t i, std::size_t j, double x, double y, const ContourSystem& sys,
                                const TimeGrid& times) {
  const detail::SplitNodes s = detail::split(sys);
  Complex sum{};
  for (std::size_t a = 0; a < s.cross_nodes.size(); ++a) {
    const Complex mu = s.cross_nodes[a];
    Complex inner{};
    for (std::size_t b = 0; b < s.line_nodes.size(); ++b) {
      const Complex den = s.line_nodes[b] - mu;
      if (std::abs(den) < 1e-12) throw ContourError("contour collision in the Pearcey double integral");
      inner += s.line_weights[b] * std::exp(-Theta(times[j], y, s.line_nodes[b])) / den;
    }
    sum += s.cross_weights[a] * std::exp(Theta(times[i], x, mu)) * inner;
  }
  return sum / (two_pi_i * two_pi_i) - gaussian_Q(i, j, x, y, times);
}

inline DiscreteOperator physical_operator(const TimeGrid& times, const EndpointSet& ends, const ContourSystem& sys,
                                          const IntervalGrid& grid, bool symmetrize = true) {
  if (ends.times() != times.size()) throw ConfigError("one endpoint list per time is required");
  const detail::SplitNodes s = detail::split(sys);
  const auto nu = static_cast<Eigen::Index>(s.cross_nodes.size());
  const auto nl = static_cast<Eigen::Index>(s.line_nodes.size());
  const std::size_t n = times.size();

  std::vector<NodeInfo> layout;
  std::vector<Eigen::Index> start(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    start[i] = static_cast<Eigen::Index>(layout.size());
    for (std::size_t k = 0; k < grid.nodes[i].size(); ++k)
      layout.push_back({i, static_cast<int>(i), i, k, Complex(grid.nodes[i][k], 0.0),
                        Complex(grid.weights[i][k], 0.0)});
  }
  start[n] = static_cast<Eigen::Index>(layout.size());

  Eigen::MatrixXcd den(nu, nl);
  for (Eigen::Index a = 0; a < nu; ++a)
    for (Eigen::Index b = 0; b < nl; ++b) {
      const Complex d = s.line_nodes[b] - s.cross_nodes[a];
      if (std::abs(d) < 1e-12) throw ContourError("contour collision in the Pearcey double integral");
      den(a, b) = 1.0 / d;
    }

  Eigen::MatrixXcd kernel = Eigen::MatrixXcd::Zero(start[n], start[n]);
  for (std::size_t j = 0; j < n; ++j) {
    const auto ny = start[j + 1] - start[j];
    if (ny == 0) continue;
    Eigen::MatrixXcd right(nl, ny);
    for (Eigen::Index b = 0; b < nl; ++b)
      for (Eigen::Index q = 0; q < ny; ++q)
        right(b, q) = s.line_weights[b] * std::exp(-Theta(times[j], grid.nodes[j][q], s.line_nodes[b]));
    const Eigen::MatrixXcd inner = den * right;
    for (std::size_t i = 0; i < n; ++i) {
      const auto nx = start[i + 1] - start[i];
      if (nx == 0) continue;
      Eigen::MatrixXcd left(nx, nu);
      for (Eigen::Index p = 0; p < nx; ++p)
        for (Eigen::Index a = 0; a < nu; ++a)
          left(p, a) = s.cross_weights[a] * std::exp(Theta(times[i], grid.nodes[i][p], s.cross_nodes[a]));
      Eigen::MatrixXcd block = left * inner / (two_pi_i * two_pi_i);
      for (Eigen::Index p = 0; p < nx; ++p)
        for (Eigen::Index q = 0; q < ny; ++q)
          block(p, q) -= gaussian_Q(i, j, grid.nodes[i][p], grid.nodes[j][q], times);
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

/// Block kernels of K_P = [[0, F], [G, H]] w.r.t. dmu / (2 pi i). F maps iR
/// data to the X contour, G the X contour to iR, H acts on iR. For H at out == in
/// the removable limit e^{(tau_j - tau_i) l^2 / 2} sum_l (-1)^{l+1} a_i^(l) is returned.
inline Complex iiks_P_blocks(Block block, std::size_t i, std::size_t j, Complex out, Complex in,
                             const EndpointSet& ends, const TimeGrid& times) {
  switch (block) {
    case Block::F:
      return std::exp(0.5 * Theta(times[i], 0.0, out) - Theta(times[j], 0.0, in)) / (out - in);
    case Block::G: {
      if (i != j) return {};
      Complex s{};
      for (std::size_t l = 0; l < ends.count(i); ++l)
        s += alternating_sign(l) * std::exp(0.5 * Theta(times[i], 0.0, in) - ends(i, l) * (in - out));
      return s / (out - in);
    }
    case Block::H: {
      if (!(times[i] < times[j])) return {};
      const double dt = times[j] - times[i];
      Complex s{};
      if (out == in) {
        for (std::size_t l = 0; l < ends.count(i); ++l) s += alternating_sign(l) * ends(i, l);
        return s * std::exp(dt * in * in / 2.0);
      }
      for (std::size_t l = 0; l < ends.count(i); ++l)
        s += alternating_sign(l) * std::exp(ends(i, l) * (out - in) + dt * in * in / 2.0);
      return s / (out - in);
    }
  }
  return {};
}

/// Column `col` of f_P at lambda (including 1/(2 pi i)).
inline Eigen::VectorXcd f_column(int group, std::size_t col, Complex lambda, const EndpointSet& ends,
                                 const TimeGrid& times, const IIKSLayout& layout) {
  Eigen::VectorXcd f = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(layout.p));
  if (group == cross_group) {
    f[0] = std::exp(0.5 * Theta(times[col], 0.0, lambda));
  } else {
    for (std::size_t l = 0; l < ends.count(col); ++l) f[layout.row(col, l)] = std::exp(ends(col, l) * lambda);
  }
  return f / two_pi_i;
}

/// d/dlambda of f_column.
inline Eigen::VectorXcd df_column(int group, std::size_t col, Complex lambda, const EndpointSet& ends,
                                  const TimeGrid& times, const IIKSLayout& layout) {
  Eigen::VectorXcd f = f_column(group, col, lambda, ends, times, layout);
  if (group == cross_group) {
    f[0] *= 0.5 * (lambda * lambda * lambda - times[col] * lambda);
  } else {
    for (std::size_t l = 0; l < ends.count(col); ++l) f[layout.row(col, l)] *= ends(col, l);
  }
  return f;
}

inline Eigen::VectorXcd g_column(int group, std::size_t col, Complex mu, const EndpointSet& ends,
                                 const TimeGrid& times, const IIKSLayout& layout) {
  Eigen::VectorXcd g = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(layout.p));
  if (group == cross_group) {
    for (std::size_t l = 0; l < ends.count(col); ++l)
      g[layout.row(col, l)] =
          alternating_sign(l) * std::exp(0.5 * Theta(times[col], 0.0, mu) - ends(col, l) * mu);
  } else {
    g[0] = std::exp(-Theta(times[col], 0.0, mu));
    for (std::size_t k = 0; k < col; ++k) {
      const double dt = times[col] - times[k];
      for (std::size_t l = 0; l < ends.count(k); ++l)
        g[layout.row(k, l)] = alternating_sign(l) * std::exp(-ends(k, l) * mu + dt * mu * mu / 2.0);
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

inline FG iiks_P_fg(Complex lambda, const ContourSystem& sys, const EndpointSet& ends, const TimeGrid& times) {
  return fg_on_group(sys.component(sys.locate(lambda)).group, lambda, ends, times);
}

/// n x n kernel value; zero on the X contour, removable limit at lambda = mu on iR.
inline Eigen::MatrixXcd iiks_P_K_entry(Complex lambda, Complex mu, const ContourSystem& sys,
                                       const EndpointSet& ends, const TimeGrid& times) {
  const int gl = sys.component(sys.locate(lambda)).group;
  const int gm = sys.component(sys.locate(mu)).group;
  const auto n = static_cast<Eigen::Index>(times.size());
  if (gl == cross_group && gm == cross_group) return Eigen::MatrixXcd::Zero(n, n);
  const FG b = fg_on_group(gm, mu, ends, times);
  if (lambda == mu) {
    const IIKSLayout layout = IIKSLayout::from(ends);
    Eigen::MatrixXcd df(layout.p, n);
    for (Eigen::Index c = 0; c < n; ++c) df.col(c) = df_column(gl, c, lambda, ends, times, layout);
    return df.transpose() * b.g;
  }
  const FG a = fg_on_group(gl, lambda, ends, times);
  return a.f.transpose() * b.g / (lambda - mu);
}

namespace detail {
inline double log_max_abs(const Eigen::VectorXcd& v) {
  double m = 0.0;
  for (Eigen::Index k = 0; k < v.size(); ++k) m = std::max(m, std::abs(v[k]));
  return m > 0.0 ? std::log(m) : -std::numeric_limits<double>::infinity();
}
}  // namespace detail

inline std::vector<double> iiks_radii(const TimeGrid& times, const EndpointSet& ends, double delta, double eps) {
  const IIKSLayout layout = IIKSLayout::from(ends);
  const std::vector<double> unit(1, 1.0);
  const ContourSystem probe = build_pearcey_system(times, delta, unit, 4);
  std::vector<double> radii;
  for (std::size_t k = 0; k < probe.size(); ++k) {
    const ContourComponent& comp = probe.component(k);
    radii.push_back(decay_radius(comp, [&](Complex z) {
      double worst = -std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < times.size(); ++c)
        worst = std::max(worst, detail::log_max_abs(f_column(comp.group, c, z, ends, times, layout)) +
                                    detail::log_max_abs(g_column(comp.group, c, z, ends, times, layout)));
      return worst;
    }, eps));
  }
  return radii;
}

/// IIKS data on every node of `sys` times every vector component. The X
/// contour is orthogonal; iR is not and carries the lambda-derivative of f
/// for its coincident points.
inline IntegrableKernel iiks_kernel(const ContourSystem& sys, const EndpointSet& ends, const TimeGrid& times) {
  if (ends.times() != times.size()) throw ConfigError("one endpoint list per time is required");
  const IIKSLayout layout = IIKSLayout::from(ends);
  IntegrableKernel k;
  for (std::size_t comp = 0; comp < sys.size(); ++comp) {
    const ContourComponent& c = sys.component(comp);
    const QuadratureGrid& grid = sys.grid(comp);
    for (std::size_t b = 0; b < times.size(); ++b)
      for (std::size_t q = 0; q < grid.size(); ++q)
        k.nodes.push_back({comp, c.group, b, q, grid.nodes[q], grid.weights[q]});
  }
  const auto n = static_cast<Eigen::Index>(k.nodes.size());
  k.f.resize(n, layout.p);
  k.g.resize(n, layout.p);
  k.df.resize(n, layout.p);
  for (Eigen::Index r = 0; r < n; ++r) {
    const NodeInfo& nd = k.nodes[r];
    k.f.row(r) = f_column(nd.group, nd.block, nd.point, ends, times, layout).transpose();
    k.g.row(r) = g_column(nd.group, nd.block, nd.point, ends, times, layout).transpose();
    k.df.row(r) = df_column(nd.group, nd.block, nd.point, ends, times, layout).transpose();
  }
  k.orthogonal_group = {true, false};
  k.truncation_radius = sys.max_radius();
  k.m = sys.nodes_per_component();
  return k;
}

/// d/da_i^(l) of the IIKS data.
inline IntegrableKernelDerivative iiks_endpoint_derivative(const IntegrableKernel& k, const EndpointSet& ends,
                                                           std::size_t i, std::size_t l) {
  const IIKSLayout layout = IIKSLayout::from(ends);
  const auto row = static_cast<Eigen::Index>(layout.row(i, l));
  const double a = ends(i, l);
  const auto n = k.f.rows();
  IntegrableKernelDerivative d{Eigen::MatrixXcd::Zero(n, k.f.cols()), Eigen::MatrixXcd::Zero(n, k.g.cols()),
                               Eigen::MatrixXcd::Zero(n, k.f.cols())};
  for (Eigen::Index r = 0; r < n; ++r) {
    const Complex z = k.nodes[r].point;
    d.df_param(r, row) = z * k.f(r, row);
    d.d2f(r, row) = (1.0 + a * z) * k.f(r, row);
    d.dg_param(r, row) = -z * k.g(r, row);
  }
  return d;
}

}  // namespace gapdet::pearcey
