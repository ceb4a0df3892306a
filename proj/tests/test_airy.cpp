#include <catch_amalgamated.hpp>

#include "gapdet/airy.hpp"
#include "gapdet/gap.hpp"
#include "gapdet/tracy_widom.hpp"
#include "oracles.hpp"

using namespace gapdet;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

ContourSystem physical_system(const TimeGrid& t, const EndpointSet& e, int m = 120) {
  const double C = t.back() + 1.0, cl = airy::default_left_apex(t);
  return build_airy_physical_contours(t, C, cl, airy::physical_radii(t, e, C, cl, 12.0, 1e-16), m);
}

ContourSystem iiks_system(const TimeGrid& t, const EndpointSet& e, int m = 60) {
  const double C = t.back() + 1.0;
  return build_airy_system(t, C, true, airy::iiks_radii(t, e, C, true, 1e-16), m);
}

}  // namespace

TEST_CASE("theta") {
  REQUIRE(airy::theta(0.0, 0.0) == Complex(0.0));
  REQUIRE_THAT(airy::theta(1.0, 1.0).real(), WithinAbs(-2.0 / 3.0, 1e-15));
  const Complex mu(0.3, -1.2);
  REQUIRE(std::abs(airy::theta(0.7, std::conj(mu)) - std::conj(airy::theta(0.7, mu))) < 1e-15);
}

TEST_CASE("Gaussian bridge B") {
  const TimeGrid t({0.0, 2.0});
  REQUIRE(airy::gaussian_B(1, 0, 0.3, 0.1, t) == 0.0);
  REQUIRE(airy::gaussian_B(0, 0, 0.3, 0.1, t) == 0.0);
  REQUIRE_THAT(airy::gaussian_B(0, 1, 0.0, 0.0, t), WithinRel(std::exp(2.0 / 3.0) / std::sqrt(8 * pi), 1e-14));
  REQUIRE(airy::gaussian_B(0, 1, 0.4, -1.1, t) == airy::gaussian_B(0, 1, -1.1, 0.4, t));
}

TEST_CASE("single-time double-contour kernel is the classical Airy kernel") {
  const TimeGrid t({0.0});
  const EndpointSet e = airy::endpoints({{-2.0}});
  const ContourSystem sys = physical_system(t, e);
  // K(0,0) = int_0^inf Ai(s)^2 ds = Ai'(0)^2
  REQUIRE_THAT(airy::physical_A_entry(0, 0, 0.0, 0.0, sys, t).real(),
               WithinAbs(std::pow(oracle::airy_ai_prime_zero(), 2), 1e-12));
  for (auto [x, y] : {std::pair{0.5, 1.0}, std::pair{-1.3, 0.2}, std::pair{1.0, 1.0}}) {
    const Complex v = airy::physical_A_entry(0, 0, x, y, sys, t);
    REQUIRE_THAT(v.real(), WithinAbs(oracle::airy_kernel(x, y), 1e-10));
    if (x == y) REQUIRE(std::abs(v.imag()) < 1e-10);
  }
  const ContourSystem fine = physical_system(t, e, 240);
  REQUIRE(std::abs(airy::physical_A_entry(0, 0, 0.4, -0.4, sys, t) -
                   airy::physical_A_entry(0, 0, 0.4, -0.4, fine, t)) < 1e-8);
}

TEST_CASE("two-time kernel entry is symmetric under the process stationarity") {
  const EndpointSet e = airy::endpoints({{0.0}, {0.0}});
  const TimeGrid t({0.0, 1.0}), s({0.4, 1.4});
  const Complex a = airy::physical_A_entry(0, 1, 0.3, -0.2, physical_system(t, e), t);
  const Complex b = airy::physical_A_entry(0, 1, 0.3, -0.2, physical_system(s, e), s);
  REQUIRE(std::abs(a - b) < 1e-12);
}

TEST_CASE("contour collision is reported") {
  const TimeGrid t({0.0, 1.0});
  // lambda contour equal to gamma_R shifted by -tau_1, so lambda + tau_1 hits mu.
  std::vector<ContourComponent> comps{
      {ContourKind::ray_pair, Complex(2.0, 0), pi / 3, -pi / 3, 4.0, "gamma_R", 0},
      {ContourKind::ray_pair, Complex(1.0, 0), pi / 3, -pi / 3, 4.0, "bad", 1}};
  const ContourSystem sys(comps, 20);
  REQUIRE_THROWS_AS(airy::physical_A_entry(0, 1, 0.0, 0.0, sys, t), ContourError);
}

TEST_CASE("IIKS block kernels") {
  const TimeGrid t({0.0, 1.0});
  const EndpointSet e = airy::endpoints({{-0.5, 0.5, 1.0}, {0.2}});
  REQUIRE(airy::iiks_block_entry(airy::Block::H, 1, 0, Complex(0, 1), Complex(0.5, 2), e, t) == Complex(0.0));
  REQUIRE(airy::iiks_block_entry(airy::Block::G, 0, 1, Complex(0, 1), Complex(3, 1), e, t) == Complex(0.0));
  const TimeGrid t0({0.0});
  const EndpointSet e0 = airy::endpoints({{0.0}});
  const double C = 1.0;
  const Complex lam(0.0, 1.0);
  const Complex expect = std::exp(0.5 * airy::theta(0.0, C) - airy::theta(0.0, lam)) / (C - lam);
  REQUIRE(std::abs(airy::iiks_block_entry(airy::Block::F, 0, 0, C, lam, e0, t0) - expect) < 1e-15);
}

TEST_CASE("f and g supports and integrability") {
  const TimeGrid t({-0.3, 0.0, 1.0});
  const EndpointSet e = airy::endpoints({{-1.0, 0.5}, {0.0}, {-0.4, 0.1, 0.7}});
  const ContourSystem sys = iiks_system(t, e, 30);
  const IIKSLayout layout = IIKSLayout::from(e);
  REQUIRE(layout.p == 7);
  for (std::size_t k = 0; k < sys.size(); ++k) {
    for (const Complex z : sys.grid(k).nodes) {
      const airy::FG v = airy::iiks_fg(z, sys, e, t);
      REQUIRE((v.f.transpose() * v.g).cwiseAbs().maxCoeff() == 0.0);
      if (k == 0) {
        REQUIRE(v.f.bottomRows(layout.p - 1).cwiseAbs().maxCoeff() == 0.0);
        REQUIRE(v.g.row(0).cwiseAbs().maxCoeff() == 0.0);
        for (std::size_t c = 0; c < t.size(); ++c)
          for (std::size_t r = 1; r < layout.p; ++r) {
            const bool own = r >= layout.offset[c] && r < layout.offset[c] + e.count(c);
            if (!own) REQUIRE(v.g(r, c) == Complex(0.0));
          }
      } else {
        const std::size_t j = k - 1;
        REQUIRE(v.f.row(0).cwiseAbs().maxCoeff() == 0.0);
        for (std::size_t c = 0; c < t.size(); ++c)
          if (c != j) {
            REQUIRE(v.f.col(c).cwiseAbs().maxCoeff() == 0.0);
            REQUIRE(v.g.col(c).cwiseAbs().maxCoeff() == 0.0);
          }
        for (std::size_t r = layout.offset[j]; r < layout.p; ++r) REQUIRE(v.g(r, j) == Complex(0.0));
      }
    }
    // same component: f^T(lambda) g(mu) vanishes identically
    const auto& nodes = sys.grid(k).nodes;
    for (std::size_t a = 0; a < nodes.size(); a += 7)
      for (std::size_t b = 0; b < nodes.size(); b += 5) {
        const airy::FG u = airy::iiks_fg(nodes[a], sys, e, t), w = airy::iiks_fg(nodes[b], sys, e, t);
        REQUIRE((u.f.transpose() * w.g).cwiseAbs().maxCoeff() == 0.0);
      }
  }
}

TEST_CASE("K entries reproduce the F, G, H blocks at random node pairs") {
  const TimeGrid t({0.0, 0.6, 1.0});
  const EndpointSet e = airy::endpoints({{-0.5, 0.5, 1.0}, {0.2}, {-0.3, 0.4}});
  const ContourSystem sys = iiks_system(t, e, 40);
  const std::size_t n = t.size();
  std::uniform_int_distribution<std::size_t> comp(0, sys.size() - 1), node(0, 39);
  int checked = 0;
  while (checked < 100) {
    const std::size_t ca = comp(oracle::rng()), cb = comp(oracle::rng());
    if (ca == cb) continue;
    const Complex lam = sys.grid(ca).nodes[node(oracle::rng())];
    const Complex mu = sys.grid(cb).nodes[node(oracle::rng())];
    const Eigen::MatrixXcd k = airy::iiks_K_entry(lam, mu, sys, e, t);
    Eigen::MatrixXcd expect = Eigen::MatrixXcd::Zero(n, n);
    if (ca == 0) {
      for (std::size_t i = 0; i < n; ++i)
        expect(i, cb - 1) = airy::iiks_block_entry(airy::Block::F, i, cb - 1, lam, mu, e, t);
    } else if (cb == 0) {
      expect(ca - 1, ca - 1) = airy::iiks_block_entry(airy::Block::G, ca - 1, ca - 1, lam, mu, e, t);
    } else {
      expect(ca - 1, cb - 1) = airy::iiks_block_entry(airy::Block::H, ca - 1, cb - 1, lam, mu, e, t);
    }
    expect /= two_pi_i;
    const double scale = std::max(1.0, expect.cwiseAbs().maxCoeff());
    REQUIRE((k - expect).cwiseAbs().maxCoeff() < 1e-14 * scale);
    ++checked;
  }
  REQUIRE(airy::iiks_K_entry(sys.grid(1).nodes[3], sys.grid(1).nodes[9], sys, e, t).isZero(0.0));
  REQUIRE_THROWS_AS(airy::iiks_fg(Complex(5.0, 5.0), sys, e, t), ContourError);
}

TEST_CASE("dual representations, gauge and symmetrization agree") {
  const GapProblem pb = GapProblem::make(Process::airy, {0.0, 1.0}, {{0.0}, {0.5}});
  const Complex phys = determinant(pb, Representation::physical).value;
  const Complex iiks = determinant(pb, Representation::iiks).value;
  REQUIRE(std::abs(phys - iiks) < 1e-10);
  GapProblem ungauged = pb;
  ungauged.quad.gauge = false;
  REQUIRE(std::abs(determinant(ungauged, Representation::iiks).value - iiks) < 1e-10);
  REQUIRE(std::abs(det(iiks_operator(pb, false)).value - iiks) < 1e-12);
  REQUIRE(std::abs(det(physical_operator(pb, false)).value - phys) < 1e-12);
  const GapProblem shifted = GapProblem::make(Process::airy, {0.3, 1.3}, {{0.0}, {0.5}});
  REQUIRE(std::abs(determinant(shifted).value - phys) < 1e-10);
}

TEST_CASE("single time reduces to Tracy-Widom") {
  for (double s : {-1.5, 0.0, 0.8}) {
    const GapProblem pb = GapProblem::make(Process::airy, {0.0}, {{s}});
    REQUIRE_THAT(determinant(pb).value.real(), WithinAbs(tracy_widom_f2(s), 1e-12));
    REQUIRE_THAT(determinant(pb, Representation::iiks).value.real(), WithinAbs(tracy_widom_f2(s), 1e-12));
  }
}

TEST_CASE("bounded intervals and odd counts") {
  const GapProblem a = GapProblem::make(Process::airy, {0.0, 0.5}, {{-1.0, 0.0, 1.0}, {-0.5, 0.5}});
  const Complex phys = determinant(a).value, iiks = determinant(a, Representation::iiks).value;
  REQUIRE(std::abs(phys - iiks) < 1e-10);
  REQUIRE(phys.real() > 0.0);
  REQUIRE(phys.real() < 1.0);
  REQUIRE_THROWS_AS(airy::endpoints({{1.0, 0.0}}), ConfigError);
}
