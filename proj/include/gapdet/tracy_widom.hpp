#pragma once

// Classical Tracy-Widom oracle: Nystrom determinant of the real-line Airy
// kernel on [s, s + t_cut], built from Boost's Airy functions only.

#include <boost/math/special_functions/airy.hpp>
#include <Eigen/Dense>
#include <cmath>

#include "gapdet/quadrature.hpp"

namespace gapdet {

/// K(x, y) = (Ai(x) Ai'(y) - Ai'(x) Ai(y)) / (x - y), with the diagonal
/// Ai'(x)^2 - x Ai(x)^2.
inline double classical_airy_kernel(double x, double y) {
  using boost::math::airy_ai;
  using boost::math::airy_ai_prime;
  if (x == y) {
    const double a = airy_ai(x), da = airy_ai_prime(x);
    return da * da - x * a * a;
  }
  return (airy_ai(x) * airy_ai_prime(y) - airy_ai_prime(x) * airy_ai(y)) / (x - y);
}

/// F_2(s) = det(I - K_Ai) on L^2(s, inf).
inline double tracy_widom_f2(double s, int nodes = 60, double t_cut = 12.0) {
  const GaussRule rule = gauss_legendre(nodes, s, s + t_cut);
  std::vector<double> ai(nodes), dai(nodes);
  for (int k = 0; k < nodes; ++k) {
    ai[k] = boost::math::airy_ai(rule.nodes[k]);
    dai[k] = boost::math::airy_ai_prime(rule.nodes[k]);
  }
  Eigen::MatrixXd m(nodes, nodes);
  for (int r = 0; r < nodes; ++r) {
    for (int c = 0; c < nodes; ++c) {
      const double x = rule.nodes[r], y = rule.nodes[c];
      const double k = r == c ? dai[r] * dai[r] - x * ai[r] * ai[r] : (ai[r] * dai[c] - dai[r] * ai[c]) / (x - y);
      m(r, c) = (r == c ? 1.0 : 0.0) - std::sqrt(rule.weights[r]) * k * std::sqrt(rule.weights[c]);
    }
  }
  return m.partialPivLu().determinant();
}

}  // namespace gapdet
