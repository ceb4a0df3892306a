#pragma once

#include <vector>

#include "gapdet/core.hpp"
#include "gapdet/quadrature.hpp"

namespace gapdet {

/// Gauss-Legendre nodes on the union of intervals at every time. A trailing
/// semi-infinite interval [a, inf) is truncated to [a, a + t_cut].
struct IntervalGrid {
  std::vector<std::vector<double>> nodes;
  std::vector<std::vector<double>> weights;

  std::size_t times() const { return nodes.size(); }
  std::size_t total() const {
    std::size_t k = 0;
    for (const auto& v : nodes) k += v.size();
    return k;
  }
};

/// Lowest and highest point covered at one time (after truncation).
struct IntervalRange {
  double lo = 0.0;
  double hi = 0.0;
  bool empty = true;
};

inline IntervalRange interval_range(const EndpointSet& ends, std::size_t j, double t_cut) {
  IntervalRange out;
  const auto e = ends.at(j);
  if (e.empty()) return out;
  out.empty = false;
  out.lo = e.front();
  out.hi = ends.semi_infinite(j) ? e.back() + t_cut : e.back();
  return out;
}

inline IntervalGrid make_interval_grid(const EndpointSet& ends, int nodes_per_interval, double t_cut) {
  if (nodes_per_interval < 1) throw ConfigError("interval quadrature needs at least one node");
  if (!(t_cut > 0.0)) throw ConfigError("semi-infinite truncation length must be positive");
  IntervalGrid grid;
  grid.nodes.resize(ends.times());
  grid.weights.resize(ends.times());
  for (std::size_t j = 0; j < ends.times(); ++j) {
    const auto e = ends.at(j);
    for (std::size_t l = 0; l < e.size(); l += 2) {
      const double a = e[l];
      const double b = (l + 1 < e.size()) ? e[l + 1] : a + t_cut;
      const GaussRule rule = gauss_legendre(nodes_per_interval, a, b);
      grid.nodes[j].insert(grid.nodes[j].end(), rule.nodes.begin(), rule.nodes.end());
      grid.weights[j].insert(grid.weights[j].end(), rule.weights.begin(), rule.weights.end());
    }
  }
  return grid;
}

}  // namespace gapdet
