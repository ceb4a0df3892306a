#include <catch_amalgamated.hpp>

#include "gapdet/isomono.hpp"
#include "oracles.hpp"

using namespace gapdet;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("jump algebra for both processes") {
  const std::vector<GapProblem> problems{
      GapProblem::make(Process::airy, {0.0, 1.0}, {{0.0}, {0.5}}),
      GapProblem::make(Process::airy, {-0.5, 0.0, 0.7}, {{-1.0, 0.0, 0.4}, {}, {0.3, 0.9}}),
      GapProblem::make(Process::pearcey, {0.0, 1.0}, {{-1.0, 1.0}, {-1.0, 1.0}}),
      GapProblem::make(Process::pearcey, {0.0, 0.4, 1.0}, {{-1.0, 1.0}, {-2.0, -1.0, 0.0, 1.5}, {-0.2, 0.3}}),
  };
  for (const auto& pb : problems) {
    const JumpReport r = check_jump_algebra(pb, 20);
    REQUIRE(r.samples > 0);
    REQUIRE(r.nilpotency < 1e-12);
    REQUIRE(r.integer_deviation < 1e-10);
    REQUIRE(r.lambda_variation < 1e-10);
    REQUIRE(r.trace_T < 1e-12);
    REQUIRE(r.same_contour == 0.0);
    REQUIRE(r.integrability < 1e-12);
  }
}

TEST_CASE("exponent matrix is traceless at random points") {
  const GapProblem a = GapProblem::make(Process::airy, {0.0, 1.0}, {{-0.3, 0.2, 0.5}, {0.5}});
  const GapProblem p = GapProblem::make(Process::pearcey, {0.0, 1.0}, {{-1.0, 1.0}, {-0.5, 0.0, 0.5, 2.0}});
  for (int k = 0; k < 50; ++k) {
    const Complex z(oracle::uniform(-3, 3), oracle::uniform(-3, 3));
    REQUIRE(std::abs(exponent_matrix(a, z).sum()) < 1e-12);
    REQUIRE(std::abs(exponent_matrix(p, z).sum()) < 1e-12);
  }
}

TEST_CASE("Pearcey D-block signs") {
  const GapProblem pb = GapProblem::make(Process::pearcey, {0.0, 1.0}, {{-1.0, 1.0}, {-0.5, 0.0, 0.5, 2.0}});
  const IIKSLayout layout = IIKSLayout::from(pb.endpoints);
  const Complex lam(0.0, 1.3);
  const Eigen::MatrixXcd g = jump_matrix(pb, pearcey::line_group, lam);
  const std::size_t i = 1, j = 0;
  for (std::size_t s = 0; s < pb.endpoints.count(i); ++s)
    for (std::size_t t = 0; t < pb.endpoints.count(j); ++t) {
      const Complex e = std::exp((pb.endpoints(i, s) - pb.endpoints(j, t)) * lam +
                                 (pb.times[i] - pb.times[j]) / 2.0 * lam * lam);
      const Complex sign = two_pi_i * g(layout.row(i, s), layout.row(j, t)) / e;
      REQUIRE(std::abs(sign - alternating_sign(t)) < 1e-13);
    }
}

TEST_CASE("empty intervals give vanishing moments") {
  const GapProblem pb = GapProblem::make(Process::airy, {0.0}, {{}});
  const GammaMoments gm = gamma_moments(pb);
  REQUIRE(gm.first.isZero(0.0));
  REQUIRE(gm.second.isZero(0.0));
}

TEST_CASE("single-time endpoint identity and refinement stability") {
  const double a = 0.3, h = 1e-4;
  const GapProblem pb = GapProblem::make(Process::airy, {0.0}, {{a}});
  auto logdet = [&](double s) { return determinant(pb.with_endpoints(airy::endpoints({{s}}))).log_value.real(); };
  const double fd = (logdet(a + h) - logdet(a - h)) / (2 * h);
  const GammaMoments gm = gamma_moments(pb);
  REQUIRE_THAT(endpoint_derivative(gm, 0, 0).real(), WithinRel(fd, 1e-5));

  GapProblem fine = pb;
  fine.quad.m = 240;
  const GammaMoments gf = gamma_moments(fine);
  REQUIRE((gm.first - gf.first).cwiseAbs().maxCoeff() < 1e-6);
  REQUIRE((gm.second - gf.second).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("Airy derivative identities, two times") {
  const GapProblem pb = GapProblem::make(Process::airy, {0.0, 1.0}, {{0.0}, {0.0}});
  const DerivativeReport r = check_airy_derivatives(pb, {2e-3, 1e-3});
  REQUIRE(r.checks.size() == 4);
  REQUIRE(r.max_error() < 1e-4);
  const DerivativeReport conv = check_airy_derivatives(pb);
  REQUIRE(conv.min_ratio() > 3.5);
  REQUIRE(conv.max_error() < 1e-4);
}

TEST_CASE("two-time determinant depends on time differences only") {
  const GapProblem a = GapProblem::make(Process::airy, {0.4, 1.1}, {{0.0}, {0.2}});
  const GapProblem b = GapProblem::make(Process::airy, {0.0, 0.7}, {{0.0}, {0.2}});
  REQUIRE(std::abs(determinant(a).value - determinant(b).value) < 1e-8);
}

TEST_CASE("Pearcey derivative identities") {
  const GapProblem one = GapProblem::make(Process::pearcey, {0.0}, {{-1.0, 1.0}});
  const DerivativeReport r1 = check_pearcey_derivatives(one);
  REQUIRE(r1.max_error() < 1e-4);
  REQUIRE(r1.min_ratio() > 3.5);
  const GapProblem two = GapProblem::make(Process::pearcey, {0.0, 1.0}, {{-1.0, 1.0}, {-0.5, 1.5}});
  const DerivativeReport r2 = check_pearcey_derivatives(two);
  REQUIRE(r2.checks.size() == 6);
  REQUIRE(r2.max_error() < 1e-4);
  REQUIRE_THROWS_AS(check_airy_derivatives(two), ConfigError);
}

TEST_CASE("degenerate Pearcey interval") {
  const double a = 0.4;
  const GapProblem pb = GapProblem::make(Process::pearcey, {0.0}, {{a, a}});
  REQUIRE_THAT(determinant(pb, Representation::iiks).value.real(), WithinAbs(1.0, 1e-14));
  const GammaMoments gm = gamma_moments(pb);
  const ContourSystem phys = physical_contours(GapProblem::make(Process::pearcey, {0.0}, {{a - 1, a + 1}}));
  const double rho = pearcey::physical_P_entry(0, 0, a, a, phys, pb.times).real();
  REQUIRE(rho > 0.0);
  REQUIRE_THAT(endpoint_derivative(gm, 0, 0).real(), WithinRel(rho, 1e-8));
  REQUIRE_THAT(endpoint_derivative(gm, 0, 1).real(), WithinRel(-rho, 1e-8));
}
