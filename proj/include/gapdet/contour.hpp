#pragma once

// Oriented contour components (ray pairs and vertical lines), their
// Gauss-Legendre grids, and the Airy / Pearcey contour systems.

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "gapdet/core.hpp"
#include "gapdet/quadrature.hpp"

namespace gapdet {

enum class ContourKind { ray_pair, vertical_line };
enum class Orientation { upward, downward };

/// Two straight rays sharing an apex, traversed from infinity along
/// e^{i angle_in} into the apex and out to infinity along e^{i angle_out}.
/// A vertical line is the special case angle_in = -pi/2, angle_out = pi/2.
struct ContourComponent {
  ContourKind kind = ContourKind::ray_pair;
  Complex apex{};
  double angle_in = 0.0;
  double angle_out = 0.0;
  double truncation_radius = 1.0;
  std::string label;
  int group = 0;  // Hilbert-space block; kernels vanish within a group when orthogonal

  Complex direction_in() const { return std::polar(1.0, angle_in); }
  Complex direction_out() const { return std::polar(1.0, angle_out); }

  Orientation orientation() const {
    return direction_out().imag() > direction_in().imag() ? Orientation::upward
                                                          : Orientation::downward;
  }

  Complex point(bool outgoing, double r) const {
    return apex + r * (outgoing ? direction_out() : direction_in());
  }

  /// Distance from z to the (untruncated) component.
  double distance(Complex z) const {
    auto ray_distance = [&](Complex dir) {
      const double t = std::max(0.0, std::real((z - apex) * std::conj(dir)));
      return std::abs(z - (apex + t * dir));
    };
    return std::min(ray_distance(direction_in()), ray_distance(direction_out()));
  }
};

/// Nodes in traversal order and complex weights w = (real GL weight) * dλ/dr.
struct QuadratureGrid {
  std::vector<Complex> nodes;
  std::vector<Complex> weights;
  std::size_t parent = 0;

  std::size_t size() const { return nodes.size(); }
};

/// Panel layout along each ray. One panel is the default; more panels are
/// graded geometrically away from the apex.
struct PanelOptions {
  int panels = 1;
  double ratio = 2.0;
};

namespace detail {

// Radial nodes/weights on [0, R] split over graded panels.
inline void radial_rule(int count, double R, const PanelOptions& opt, std::vector<double>& r,
                        std::vector<double>& w) {
  r.clear();
  w.clear();
  const int panels = std::max(1, std::min(opt.panels, count));
  std::vector<double> breaks{0.0};
  if (panels == 1 || opt.ratio == 1.0) {
    for (int k = 1; k <= panels; ++k) breaks.push_back(R * k / panels);
  } else {
    const double first = R * (opt.ratio - 1.0) / (std::pow(opt.ratio, panels) - 1.0);
    double len = first;
    for (int k = 0; k < panels; ++k) {
      breaks.push_back(k + 1 == panels ? R : breaks.back() + len);
      len *= opt.ratio;
    }
  }
  const int base = count / panels;
  const int extra = count % panels;
  for (int k = 0; k < panels; ++k) {
    const int nk = base + (k >= panels - extra ? 1 : 0);
    const GaussRule g = gauss_legendre(nk, breaks[k], breaks[k + 1]);
    r.insert(r.end(), g.nodes.begin(), g.nodes.end());
    w.insert(w.end(), g.weights.begin(), g.weights.end());
  }
}

}  // namespace detail

/// m nodes on one component: floor(m/2) on the incoming ray, the rest outgoing.
inline QuadratureGrid make_grid(const ContourComponent& c, int m, std::size_t parent,
                                const PanelOptions& panels = {}) {
  if (m < 4) throw ConfigError("quadrature needs at least 4 nodes per component");
  if (!(c.truncation_radius > 0.0)) throw ConfigError("truncation radius must be positive");
  QuadratureGrid grid;
  grid.parent = parent;
  grid.nodes.reserve(m);
  grid.weights.reserve(m);
  std::vector<double> r, w;

  const int n_in = m / 2;
  detail::radial_rule(n_in, c.truncation_radius, panels, r, w);
  const Complex din = c.direction_in();
  for (int k = n_in - 1; k >= 0; --k) {
    grid.nodes.push_back(c.apex + r[k] * din);
    grid.weights.push_back(-w[k] * din);
  }
  const int n_out = m - n_in;
  detail::radial_rule(n_out, c.truncation_radius, panels, r, w);
  const Complex dout = c.direction_out();
  for (int k = 0; k < n_out; ++k) {
    grid.nodes.push_back(c.apex + r[k] * dout);
    grid.weights.push_back(w[k] * dout);
  }
  return grid;
}

/// Sum of weights * fn(nodes). No 1/(2 pi i) is applied.
template <class Fn>
Complex integrate(const QuadratureGrid& grid, Fn&& fn) {
  Complex sum{};
  for (std::size_t k = 0; k < grid.size(); ++k) sum += grid.weights[k] * Complex(fn(grid.nodes[k]));
  return sum;
}

/// Smallest r such that log_magnitude stays below log(eps) on both rays from r
/// out to r_max (sampled every `step`). Returns at least `r_min`.
template <class LogMagnitude>
double decay_radius(const ContourComponent& c, LogMagnitude&& log_magnitude, double eps,
                    double r_min = 1.0, double r_max = 60.0, double step = 0.05) {
  const double threshold = std::log(eps);
  double last_above = 0.0;
  for (double r = 0.0; r <= r_max; r += step) {
    const double worst = std::max(log_magnitude(c.point(false, r)), log_magnitude(c.point(true, r)));
    if (!(worst < threshold)) last_above = r;
  }
  return std::max(r_min, last_above + step);
}

class ContourSystem {
 public:
  ContourSystem() = default;
  ContourSystem(std::vector<ContourComponent> components, int m, const PanelOptions& panels = {})
      : components_(std::move(components)), m_(m) {
    grids_.reserve(components_.size());
    for (std::size_t k = 0; k < components_.size(); ++k) {
      grids_.push_back(make_grid(components_[k], m, k, panels));
    }
    if (min_separation() <= 0.0) throw ContourError("contour components intersect");
  }

  std::size_t size() const { return components_.size(); }
  int nodes_per_component() const { return m_; }
  const ContourComponent& component(std::size_t k) const { return components_[k]; }
  const QuadratureGrid& grid(std::size_t k) const { return grids_[k]; }
  std::span<const ContourComponent> components() const { return components_; }

  double max_radius() const {
    double r = 0.0;
    for (const auto& c : components_) r = std::max(r, c.truncation_radius);
    return r;
  }

  /// Minimum distance between quadrature nodes of components in different groups.
  double min_separation() const {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < grids_.size(); ++a) {
      for (std::size_t b = a + 1; b < grids_.size(); ++b) {
        if (components_[a].group == components_[b].group) continue;
        for (const Complex& za : grids_[a].nodes)
          for (const Complex& zb : grids_[b].nodes) best = std::min(best, std::abs(za - zb));
      }
    }
    return best;
  }

  /// Index of the component containing z (within tol), else ContourError.
  std::size_t locate(Complex z, double tol = 1e-9) const {
    for (std::size_t k = 0; k < components_.size(); ++k) {
      if (components_[k].distance(z) <= tol * std::max(1.0, std::abs(z))) return k;
    }
    throw ContourError("point lies on no contour component");
  }

 private:
  std::vector<ContourComponent> components_;
  std::vector<QuadratureGrid> grids_;
  int m_ = 0;
};

namespace detail {
inline double radius_for(std::span<const double> radii, std::size_t k) {
  if (radii.empty()) throw ConfigError("at least one truncation radius is required");
  return radii.size() == 1 ? radii[0] : radii[k];
}
inline void check_radii(std::span<const double> radii, std::size_t components) {
  if (radii.size() != 1 && radii.size() != components) {
    throw ConfigError("expected 1 or " + std::to_string(components) + " truncation radii");
  }
}
}  // namespace detail

/// Airy contours: gamma_R (apex C, from inf e^{i pi/3} to inf e^{-i pi/3}) and,
/// per time j, either the upward line iR + tau_j or the ray pair gamma_L + tau_j
/// at angles -2pi/3 -> 2pi/3. Component 0 is gamma_R (group 0); component j+1
/// belongs to time j (group j+1). `radii` holds one value or one per component.
inline ContourSystem build_airy_system(const TimeGrid& times, double C, bool deform,
                                       std::span<const double> radii, int m,
                                       const PanelOptions& panels = {}) {
  if (!(C > times.back())) throw ConfigError("gamma_R apex C must exceed every time");
  const std::size_t n = times.size();
  detail::check_radii(radii, n + 1);
  std::vector<ContourComponent> comps;
  comps.push_back({ContourKind::ray_pair, Complex(C, 0.0), pi / 3, -pi / 3,
                   detail::radius_for(radii, 0), "gamma_R", 0});
  for (std::size_t j = 0; j < n; ++j) {
    ContourComponent c;
    c.apex = Complex(times[j], 0.0);
    c.kind = deform ? ContourKind::ray_pair : ContourKind::vertical_line;
    c.angle_in = deform ? -2 * pi / 3 : -pi / 2;
    c.angle_out = deform ? 2 * pi / 3 : pi / 2;
    c.truncation_radius = detail::radius_for(radii, j + 1);
    c.label = (deform ? "gamma_L+tau" : "iR+tau") + std::to_string(j);
    c.group = static_cast<int>(j + 1);
    comps.push_back(c);
  }
  return ContourSystem(std::move(comps), m, panels);
}

/// Contours for the double-integral Airy kernel: gamma_R at apex C for the
/// mu variable (group 0) and the left ray pair at apex c_left replacing iR for
/// the lambda variable (group 1).
inline ContourSystem build_airy_physical_contours(const TimeGrid& times, double C, double c_left,
                                                  std::span<const double> radii, int m,
                                                  const PanelOptions& panels = {}) {
  if (!(C > times.back())) throw ConfigError("gamma_R apex C must exceed every time");
  if (!(c_left + times.back() < C)) throw ConfigError("left contour apex collides with gamma_R");
  detail::check_radii(radii, 2);
  std::vector<ContourComponent> comps;
  comps.push_back({ContourKind::ray_pair, Complex(C, 0.0), pi / 3, -pi / 3,
                   detail::radius_for(radii, 0), "gamma_R", 0});
  comps.push_back({ContourKind::ray_pair, Complex(c_left, 0.0), -2 * pi / 3, 2 * pi / 3,
                   detail::radius_for(radii, 1), "gamma_L", 1});
  return ContourSystem(std::move(comps), m, panels);
}

/// Pearcey contours: gamma_R (apex +delta, inf e^{i pi/4} -> inf e^{-i pi/4}),
/// gamma_L (apex -delta, inf e^{-3i pi/4} -> inf e^{3i pi/4}) forming the X
/// contour (group 0, components 0 and 1), and the upward line iR (group 1,
/// component 2).
inline ContourSystem build_pearcey_system(const TimeGrid& times, double delta,
                                          std::span<const double> radii, int m,
                                          const PanelOptions& panels = {}) {
  (void)times;
  if (!(delta > 0.0)) throw ConfigError("Pearcey apex offset delta must be positive");
  detail::check_radii(radii, 3);
  std::vector<ContourComponent> comps;
  comps.push_back({ContourKind::ray_pair, Complex(delta, 0.0), pi / 4, -pi / 4,
                   detail::radius_for(radii, 0), "gamma_R", 0});
  comps.push_back({ContourKind::ray_pair, Complex(-delta, 0.0), -3 * pi / 4, 3 * pi / 4,
                   detail::radius_for(radii, 1), "gamma_L", 0});
  comps.push_back({ContourKind::vertical_line, Complex(0.0, 0.0), -pi / 2, pi / 2,
                   detail::radius_for(radii, 2), "iR", 1});
  return ContourSystem(std::move(comps), m, panels);
}

}  // namespace gapdet
