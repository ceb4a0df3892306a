#pragma once

// Finite-difference check of the Adler-van Moerbeke PDE for the two-time
// Airy process, G(tau, E, W) = log P(no points in [E+W, inf) at time 0 and
// in [E-W, inf) at time tau).

#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <vector>

#include "gapdet/gap.hpp"

namespace gapdet {

struct PdePoint {
  double tau = 1.0;
  double E = 0.0;
  double W = 0.0;
};

class LogDetGrid {
 public:
  LogDetGrid() = default;
  LogDetGrid(PdePoint center, std::array<double, 3> steps, int radius)
      : center_(center), steps_(steps), radius_(checked_radius(radius)), side_(2 * radius + 1),
        values_(static_cast<std::size_t>(side_ * side_ * side_), 0.0),
        condition_(values_.size(), 1.0) {}

  PdePoint center() const { return center_; }
  const std::array<double, 3>& steps() const { return steps_; }
  int radius() const { return radius_; }
  std::size_t size() const { return values_.size(); }

  PdePoint point(int i, int j, int k) const {
    return {center_.tau + i * steps_[0], center_.E + j * steps_[1], center_.W + k * steps_[2]};
  }
  double& at(int i, int j, int k) { return values_[index(i, j, k)]; }
  double at(int i, int j, int k) const { return values_[index(i, j, k)]; }
  double& condition(int i, int j, int k) { return condition_[index(i, j, k)]; }
  double max_condition() const { return *std::max_element(condition_.begin(), condition_.end()); }

  bool contains(int i, int j, int k) const {
    return std::abs(i) <= radius_ && std::abs(j) <= radius_ && std::abs(k) <= radius_;
  }

 private:
  static int checked_radius(int r) {
    if (r < 0) throw ConfigError("grid radius must be non-negative");
    return r;
  }

  std::size_t index(int i, int j, int k) const {
    if (!contains(i, j, k)) throw std::out_of_range("stencil point outside the log-det grid");
    return static_cast<std::size_t>(((i + radius_) * side_ + (j + radius_)) * side_ + (k + radius_));
  }

  PdePoint center_;
  std::array<double, 3> steps_{};
  int radius_ = 0;
  int side_ = 1;
  std::vector<double> values_;
  std::vector<double> condition_;
};

/// Two-time Airy problem at one (tau, E, W).
inline GapProblem avm_problem(PdePoint p, const QuadratureOptions& quad = {}) {
  if (!(p.tau > 0.0)) throw ConfigError("the PDE check needs tau > 0");
  return GapProblem::make(Process::airy, {0.0, p.tau}, {{p.E + p.W}, {p.E - p.W}}, quad);
}

/// Fills every grid point. `runner` maps a list of jobs onto workers (serial by default).
inline LogDetGrid build_grid(PdePoint center, std::array<double, 3> steps, int radius,
                             const QuadratureOptions& quad = {}, Representation rep = Representation::physical,
                             const std::function<void(std::size_t, const std::function<void(std::size_t)>&)>& runner = {}) {
  LogDetGrid grid(center, steps, radius);
  std::vector<std::array<int, 3>> idx;
  for (int i = -radius; i <= radius; ++i)
    for (int j = -radius; j <= radius; ++j)
      for (int k = -radius; k <= radius; ++k) idx.push_back({i, j, k});
  auto job = [&](std::size_t n) {
    const auto [i, j, k] = idx[n];
    const DetResult r = determinant(avm_problem(grid.point(i, j, k), quad), rep);
    if (!(r.value.real() > 0.0)) throw NumericalError("non-positive determinant on the PDE grid");
    grid.at(i, j, k) = r.log_value.real();
    grid.condition(i, j, k) = r.diagnostics.condition;
  };
  if (runner) {
    runner(idx.size(), job);
  } else {
    for (std::size_t n = 0; n < idx.size(); ++n) job(n);
  }
  return grid;
}

/// Central-difference derivative of order (o_tau, o_E, o_W), each <= 3.
inline double grid_derivative(const LogDetGrid& g, std::array<int, 3> order) {
  static const std::map<int, std::vector<std::pair<int, double>>> stencils{
      {0, {{0, 1.0}}},
      {1, {{-1, -0.5}, {1, 0.5}}},
      {2, {{-1, 1.0}, {0, -2.0}, {1, 1.0}}},
      {3, {{-2, -0.5}, {-1, 1.0}, {1, -1.0}, {2, 0.5}}},
  };
  double s = 0.0;
  for (const auto& [i, ci] : stencils.at(order[0]))
    for (const auto& [j, cj] : stencils.at(order[1]))
      for (const auto& [k, ck] : stencils.at(order[2])) s += ci * cj * ck * g.at(i, j, k);
  return s / (std::pow(g.steps()[0], order[0]) * std::pow(g.steps()[1], order[1]) * std::pow(g.steps()[2], order[2]));
}

struct AvmResidual {
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;
  double scale = 0.0;       // max(|lhs|, |rhs|, eps)
  double term_scale = 0.0;  // largest individual term on either side
  double relative() const { return residual / term_scale; }
};

/// (tau^2/2 d_W - W d_E)(d_E^2 - d_W^2) G + 2 tau d_{tau E W} G
///   = d_E(G_EW) G_EE - G_EW d_E(G_EE).
inline AvmResidual avm_residual(const LogDetGrid& g) {
  const double t = g.center().tau;
  const double w = g.center().W;
  const double eew = grid_derivative(g, {0, 2, 1});
  const double www = grid_derivative(g, {0, 0, 3});
  const double eee = grid_derivative(g, {0, 3, 0});
  const double eww = grid_derivative(g, {0, 1, 2});
  const double tew = grid_derivative(g, {1, 1, 1});
  const double ew = grid_derivative(g, {0, 1, 1});
  const double ee = grid_derivative(g, {0, 2, 0});
  AvmResidual r;
  r.lhs = t * t / 2 * (eew - www) - w * (eee - eww) + 2 * t * tew;
  r.rhs = eew * ee - ew * eee;
  r.residual = std::abs(r.lhs - r.rhs);
  r.scale = std::max({std::abs(r.lhs), std::abs(r.rhs), std::numeric_limits<double>::epsilon()});
  r.term_scale = std::max({std::abs(t * t / 2 * eew), std::abs(t * t / 2 * www), std::abs(w * eee),
                           std::abs(w * eww), std::abs(2 * t * tew), std::abs(eew * ee), std::abs(ew * eee),
                           std::numeric_limits<double>::epsilon()});
  return r;
}

}  // namespace gapdet
