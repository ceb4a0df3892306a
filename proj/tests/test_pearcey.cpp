#include <catch_amalgamated.hpp>

#include "gapdet/gap.hpp"
#include "gapdet/pearcey.hpp"
#include "oracles.hpp"

using namespace gapdet;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

ContourSystem system_for(const TimeGrid& t, const EndpointSet& e, double delta, int m, bool physical) {
  const auto radii = physical ? pearcey::physical_radii(t, e, delta, 1e-16) : pearcey::iiks_radii(t, e, delta, 1e-16);
  return build_pearcey_system(t, delta, radii, m);
}

}  // namespace

TEST_CASE("Theta") {
  REQUIRE(pearcey::Theta(0.3, 0.0, 0.0) == Complex(0.0));
  REQUIRE_THAT(pearcey::Theta(0.0, 1.0, 1.0).real(), WithinAbs(-0.75, 1e-15));
  const double y = 1.3, tau = 0.7;
  const Complex v = pearcey::Theta(tau, 0.0, Complex(0.0, y));
  REQUIRE_THAT(v.real(), WithinAbs(std::pow(y, 4) / 4 + tau * y * y / 2, 1e-14));
  REQUIRE(v.imag() == 0.0);
}

TEST_CASE("heat kernel Q and its contour form") {
  const TimeGrid t({0.0, 1.0});
  REQUIRE(pearcey::gaussian_Q(1, 0, 0.2, 0.1, t) == 0.0);
  REQUIRE(pearcey::gaussian_Q(1, 1, 0.2, 0.1, t) == 0.0);
  REQUIRE_THAT(pearcey::gaussian_Q(0, 1, 0.4, 0.4, t), WithinRel(1.0 / std::sqrt(2 * pi), 1e-15));
  ContourComponent line{ContourKind::vertical_line, Complex(0.0), -pi / 2, pi / 2, 9.0, "iR", 1};
  const QuadratureGrid g = make_grid(line, 120, 0);
  const Complex q = pearcey::gaussian_Q_integral(0, 1, 0.7, 0.0, t, g);
  REQUIRE_THAT(q.real(), WithinAbs(pearcey::gaussian_Q(0, 1, 0.7, 0.0, t), 1e-10));
  REQUIRE(std::abs(q.imag()) < 1e-10);
}

TEST_CASE("double-contour kernel: deformation invariance, symmetry, convergence") {
  const TimeGrid t({0.0});
  const EndpointSet e = pearcey::endpoints({{-1.0, 1.0}});
  const Complex a = pearcey::physical_P_entry(0, 0, 0.0, 0.0, system_for(t, e, 0.25, 120, true), t);
  const Complex b = pearcey::physical_P_entry(0, 0, 0.0, 0.0, system_for(t, e, 0.75, 120, true), t);
  REQUIRE(std::abs(a - b) < 1e-9);
  REQUIRE(a.real() > 0.0);
  const ContourSystem sys = system_for(t, e, 0.5, 120, true);
  const Complex xy = pearcey::physical_P_entry(0, 0, 0.3, -0.6, sys, t);
  const Complex mirrored = pearcey::physical_P_entry(0, 0, -0.3, 0.6, sys, t);
  REQUIRE(std::abs(xy - mirrored) < 1e-9);
  REQUIRE(std::abs(xy.imag()) < 1e-9);
  const Complex fine = pearcey::physical_P_entry(0, 0, 0.3, -0.6, system_for(t, e, 0.5, 240, true), t);
  REQUIRE(std::abs(xy - fine) < 1e-8);
}

TEST_CASE("H block and its diagonal limit") {
  const TimeGrid t({0.0, 1.0});
  const double a = -0.4, b = 0.9;
  const EndpointSet e = pearcey::endpoints({{a, b}, {-1.0, 1.0}});
  REQUIRE(pearcey::iiks_P_blocks(pearcey::Block::H, 1, 0, Complex(0, 1), Complex(0, 2), e, t) == Complex(0.0));
  REQUIRE(pearcey::iiks_P_blocks(pearcey::Block::H, 1, 1, Complex(0, 1), Complex(0, 2), e, t) == Complex(0.0));
  const Complex diag = pearcey::iiks_P_blocks(pearcey::Block::H, 0, 1, 0.0, 0.0, e, t);
  REQUIRE_THAT(diag.real(), WithinAbs(a - b, 1e-15));
  const Complex lam(0.0, 0.8);
  const Complex limit = pearcey::iiks_P_blocks(pearcey::Block::H, 0, 1, lam, lam, e, t);
  const Complex near = pearcey::iiks_P_blocks(pearcey::Block::H, 0, 1, lam + Complex(0, 1e-6), lam, e, t);
  REQUIRE(std::abs(limit - near) < 1e-5);
  // alternating numerator (xi - lambda) H vanishes as xi -> lambda
  for (double h : {1e-3, 1e-6, 1e-9}) {
    const Complex xi = lam + Complex(h, 0.0);
    REQUIRE(std::abs((xi - lam) * pearcey::iiks_P_blocks(pearcey::Block::H, 0, 1, xi, lam, e, t)) < 2 * h);
  }
}

TEST_CASE("f_P, g_P integrability and orthogonality on the X contour") {
  const TimeGrid t({0.0, 0.5, 1.2});
  const EndpointSet e = pearcey::endpoints({{-1.0, 1.0}, {-2.0, -0.5, 0.0, 1.5}, {-0.3, 0.6}});
  const ContourSystem sys = system_for(t, e, 0.5, 30, false);
  REQUIRE(IIKSLayout::from(e).p == 9);
  for (std::size_t k = 0; k < sys.size(); ++k) {
    for (const Complex z : sys.grid(k).nodes) {
      const pearcey::FG v = pearcey::iiks_P_fg(z, sys, e, t);
      const double scale = std::max(1.0, v.f.cwiseAbs().maxCoeff() * v.g.cwiseAbs().maxCoeff());
      REQUIRE((v.f.transpose() * v.g).cwiseAbs().maxCoeff() < 1e-15 * scale);
    }
  }
  for (std::size_t ka : {0, 1})
    for (std::size_t kb : {0, 1})
      for (std::size_t q = 0; q < 30; q += 4) {
        const Complex l = sys.grid(ka).nodes[q], m = sys.grid(kb).nodes[29 - q];
        REQUIRE(pearcey::iiks_P_K_entry(l, m, sys, e, t).isZero(0.0));
      }
}

TEST_CASE("K_P entries reproduce the block kernels at random node pairs") {
  const TimeGrid t({0.0, 0.5, 1.2});
  const EndpointSet e = pearcey::endpoints({{-1.0, 1.0}, {-2.0, -0.5, 0.0, 1.5}, {-0.3, 0.6}});
  const ContourSystem sys = system_for(t, e, 0.5, 40, false);
  const std::size_t n = t.size();
  std::uniform_int_distribution<std::size_t> comp(0, 2), node(0, 39);
  int checked = 0;
  while (checked < 100) {
    const std::size_t ca = comp(oracle::rng()), cb = comp(oracle::rng());
    const bool la = ca == 2, lb = cb == 2;
    if (!la && !lb) continue;
    const Complex lam = sys.grid(ca).nodes[node(oracle::rng())];
    const Complex mu = sys.grid(cb).nodes[node(oracle::rng())];
    const Eigen::MatrixXcd k = pearcey::iiks_P_K_entry(lam, mu, sys, e, t);
    Eigen::MatrixXcd expect = Eigen::MatrixXcd::Zero(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        if (!la) expect(i, j) = pearcey::iiks_P_blocks(pearcey::Block::F, i, j, lam, mu, e, t);
        else if (!lb) expect(i, j) = pearcey::iiks_P_blocks(pearcey::Block::G, i, j, lam, mu, e, t);
        else expect(i, j) = pearcey::iiks_P_blocks(pearcey::Block::H, i, j, lam, mu, e, t);
      }
    expect /= two_pi_i;
    const double scale = std::max(1.0, expect.cwiseAbs().maxCoeff());
    REQUIRE((k - expect).cwiseAbs().maxCoeff() < 1e-13 * scale);
    ++checked;
  }
  const Complex z = sys.grid(2).nodes[7];
  const Eigen::MatrixXcd d = pearcey::iiks_P_K_entry(z, z, sys, e, t);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      REQUIRE(std::abs(d(i, j) - pearcey::iiks_P_blocks(pearcey::Block::H, i, j, z, z, e, t) / two_pi_i) < 1e-14);
}

TEST_CASE("weights decay below 1e-16 at the truncation radius") {
  const TimeGrid t({0.0, 1.0});
  const EndpointSet e = pearcey::endpoints({{-1.0, 1.0}, {-1.0, 1.0}});
  const ContourSystem sys = system_for(t, e, 0.5, 40, false);
  const IIKSLayout layout = IIKSLayout::from(e);
  for (std::size_t k = 0; k < sys.size(); ++k) {
    const ContourComponent& c = sys.component(k);
    for (bool out : {false, true}) {
      const Complex z = c.point(out, c.truncation_radius);
      for (std::size_t col = 0; col < t.size(); ++col) {
        const double fg = pearcey::f_column(c.group, col, z, e, t, layout).cwiseAbs().maxCoeff() *
                          pearcey::g_column(c.group, col, z, e, t, layout).cwiseAbs().maxCoeff();
        REQUIRE(fg < 1e-16);
      }
    }
  }
}

TEST_CASE("Pearcey determinants: representations and deformations") {
  const GapProblem one = GapProblem::make(Process::pearcey, {0.0}, {{-1.0, 1.0}});
  REQUIRE(std::abs(determinant(one).value - determinant(one, Representation::iiks).value) < 1e-10);
  GapProblem pb = GapProblem::make(Process::pearcey, {0.0, 1.0}, {{-1.0, 1.0}, {-1.0, 1.0}});
  const Complex base = determinant(pb, Representation::iiks).value;
  REQUIRE(std::abs(determinant(pb).value - base) < 1e-10);
  for (double d : {0.25, 0.75}) {
    pb.quad.delta = d;
    REQUIRE(std::abs(determinant(pb, Representation::iiks).value - base) < 1e-10);
    REQUIRE(std::abs(determinant(pb).value - base) < 1e-10);
  }
  REQUIRE(std::abs(det(iiks_operator(pb, false)).value - base) < 1e-12);
  REQUIRE_THROWS_AS(GapProblem::make(Process::pearcey, {0.0}, {{0.0}}), ConfigError);
}
