#pragma once

// A gap-probability problem (process, times, intervals, quadrature settings)
// and its determinant in either representation.

#include <optional>
#include <string>

#include "gapdet/airy.hpp"
#include "gapdet/contour.hpp"
#include "gapdet/fredholm.hpp"
#include "gapdet/intervals.hpp"
#include "gapdet/pearcey.hpp"

namespace gapdet {

enum class Process { airy, pearcey };
enum class Representation { physical, iiks };

inline std::string to_string(Process p) { return p == Process::airy ? "airy" : "pearcey"; }
inline std::string to_string(Representation r) { return r == Representation::physical ? "physical" : "iiks"; }

inline Process parse_process(const std::string& s) {
  if (s == "airy") return Process::airy;
  if (s == "pearcey") return Process::pearcey;
  throw ConfigError("process must be \"airy\" or \"pearcey\", got \"" + s + "\"");
}

struct QuadratureOptions {
  int m = 120;                                // nodes per contour component
  std::optional<double> truncation_radius;    // unset: per-component decay radius
  bool deform = true;                         // Airy: gamma_L + tau_j instead of iR + tau_j
  double delta = 0.5;                         // Pearcey apex offset
  double t_cut = 12.0;                        // truncation length of [a, inf)
  int interval_nodes = 60;                    // Gauss-Legendre nodes per interval
  bool gauge = true;                          // Airy IIKS row rebalancing
  std::optional<double> apex;                 // Airy gamma_R apex C (default max tau + 1)
  double tail_eps = 1e-16;
  PanelOptions panels;
};

struct GapProblem {
  Process process = Process::airy;
  TimeGrid times;
  EndpointSet endpoints;
  QuadratureOptions quad;

  static GapProblem make(Process p, std::vector<double> times, std::vector<std::vector<double>> ends,
                         QuadratureOptions q = {}) {
    GapProblem out;
    out.process = p;
    out.times = TimeGrid(std::move(times));
    out.endpoints = EndpointSet(std::move(ends), p == Process::airy ? EndpointParity::any : EndpointParity::even);
    if (out.endpoints.times() != out.times.size()) throw ConfigError("one interval list per time is required");
    if (q.m < 4) throw ConfigError("quadrature.m must be at least 4");
    if (q.truncation_radius && !(*q.truncation_radius > 0.0)) throw ConfigError("quadrature.truncation_radius must be positive");
    if (!(q.delta > 0.0)) throw ConfigError("quadrature.delta must be positive");
    if (!(q.t_cut > 0.0)) throw ConfigError("quadrature.t_cut must be positive");
    if (q.interval_nodes < 1) throw ConfigError("quadrature.interval_nodes must be positive");
    out.quad = q;
    return out;
  }

  double airy_apex() const { return quad.apex.value_or(times.back() + 1.0); }

  GapProblem with_endpoints(EndpointSet e) const {
    GapProblem out = *this;
    out.endpoints = std::move(e);
    return out;
  }
  GapProblem with_times(TimeGrid t) const {
    GapProblem out = *this;
    out.times = std::move(t);
    return out;
  }
};

namespace detail {
inline std::vector<double> radii_or(const std::optional<double>& fixed, std::vector<double> automatic) {
  if (fixed) return {*fixed};
  return automatic;
}
}  // namespace detail

inline ContourSystem physical_contours(const GapProblem& pb) {
  const auto& q = pb.quad;
  if (pb.process == Process::airy) {
    const double C = pb.airy_apex();
    const double cl = airy::default_left_apex(pb.times);
    const auto radii =
        detail::radii_or(q.truncation_radius, airy::physical_radii(pb.times, pb.endpoints, C, cl, q.t_cut, q.tail_eps));
    return build_airy_physical_contours(pb.times, C, cl, radii, q.m, q.panels);
  }
  const auto radii =
      detail::radii_or(q.truncation_radius, pearcey::physical_radii(pb.times, pb.endpoints, q.delta, q.tail_eps));
  return build_pearcey_system(pb.times, q.delta, radii, q.m, q.panels);
}

inline ContourSystem iiks_contours(const GapProblem& pb) {
  const auto& q = pb.quad;
  if (pb.process == Process::airy) {
    const double C = pb.airy_apex();
    const auto radii =
        detail::radii_or(q.truncation_radius, airy::iiks_radii(pb.times, pb.endpoints, C, q.deform, q.tail_eps));
    return build_airy_system(pb.times, C, q.deform, radii, q.m, q.panels);
  }
  const auto radii = detail::radii_or(q.truncation_radius, pearcey::iiks_radii(pb.times, pb.endpoints, q.delta, q.tail_eps));
  return build_pearcey_system(pb.times, q.delta, radii, q.m, q.panels);
}

inline DiscreteOperator physical_operator(const GapProblem& pb, bool symmetrize = true) {
  const ContourSystem sys = physical_contours(pb);
  const IntervalGrid grid = make_interval_grid(pb.endpoints, pb.quad.interval_nodes, pb.quad.t_cut);
  if (pb.process == Process::airy) return airy::physical_operator(pb.times, pb.endpoints, sys, grid, symmetrize);
  return pearcey::physical_operator(pb.times, pb.endpoints, sys, grid, symmetrize);
}

inline IntegrableKernel iiks_kernel(const GapProblem& pb, const ContourSystem& sys) {
  if (pb.process == Process::airy) return airy::iiks_kernel(sys, pb.endpoints, pb.times, pb.quad.gauge);
  return pearcey::iiks_kernel(sys, pb.endpoints, pb.times);
}

inline DiscreteOperator iiks_operator(const GapProblem& pb, bool symmetrize = true) {
  const ContourSystem sys = iiks_contours(pb);
  return assemble_integrable(iiks_kernel(pb, sys), symmetrize);
}

inline DiscreteOperator discretize(const GapProblem& pb, Representation rep, bool symmetrize = true) {
  return rep == Representation::physical ? physical_operator(pb, symmetrize) : iiks_operator(pb, symmetrize);
}

/// det(Id - chi_I K) = P(no points of the process in I_j at time tau_j for all j).
inline DetResult determinant(const GapProblem& pb, Representation rep = Representation::physical) {
  if (pb.endpoints.total() == 0) return {};
  return det(discretize(pb, rep));
}

}  // namespace gapdet
