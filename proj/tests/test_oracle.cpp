#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <array>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "reference.hpp"
#include "ringpot/oracle.hpp"
#include "ringpot/solver.hpp"

using namespace ringpot;
constexpr double pi = std::numbers::pi;

TEST_CASE("stencil annihilates constants") {
  double res = discrete_laplacian([](const PlanarPoint&) { return 2.718281828; },
                                  PlanarPoint{1.4, 0.3}, 1e-3);
  CHECK(std::abs(res) < 1e-12);
}

TEST_CASE("stencil is second order on log|x|") {
  auto f = [](const PlanarPoint& p) { return std::log(norm(p)); };
  PlanarPoint x{1.2, 0.5};
  double res_h = std::abs(discrete_laplacian(f, x, 1e-2));
  double res_h2 = std::abs(discrete_laplacian(f, x, 5e-3));
  double order = std::log2(res_h / res_h2);
  CHECK(order > 1.5);
  CHECK(order < 2.5);
}

TEST_CASE("regular part is discretely harmonic with second-order residual") {
  Annulus ann(1.0, 2.0);
  PolarPoint y(1.5, 0.0);
  std::array<PolarPoint, 3> samples{PolarPoint(1.4, pi / 3), PolarPoint(1.7, 2.2),
                                    PolarPoint(1.25, 4.0)};
  FDReport rep = fd_harmonic_check(ann, y, samples, 1e-3);
  CHECK(rep.residual_h < 1e-3);
  CHECK(rep.order_estimate > 1.5);
  CHECK(rep.order_estimate < 2.5);
  // second-order stencil: halving h divides the residual by ~4
  double ratio = rep.residual_h / rep.residual_h2;
  CHECK(ratio > 3.4);
  CHECK(ratio < 4.6);
}

TEST_CASE("fd_harmonic_check rejects samples near the boundary or pole") {
  Annulus ann(1.0, 2.0);
  PolarPoint y(1.5, 0.0);
  std::array<PolarPoint, 1> near_boundary{PolarPoint(1.0005, 0.0)};
  CHECK_THROWS_AS(fd_harmonic_check(ann, y, near_boundary, 1e-3), std::invalid_argument);
  std::array<PolarPoint, 1> near_pole{PolarPoint(1.5001, 0.0)};
  CHECK_THROWS_AS(fd_harmonic_check(ann, y, near_pole, 1e-3), std::invalid_argument);
}

TEST_CASE("boundary residual shrinks below tol at the resolved order") {
  Annulus ann(1.0, 2.0);
  PolarPoint y(1.5, 0.0);
  double q = std::max(pair_ratio(ann, 2.0, 1.5), pair_ratio(ann, 1.0, 1.5));
  int M = truncation_for_ratio(q, 1e-10).m_used;
  CHECK(boundary_residual(ann, y, M, 64) < 1e-9);
}

TEST_CASE("boundary residual at M = 0 equals the log-series magnitude") {
  Annulus ann(1.0, 2.0);
  PolarPoint y(1.5, 0.0);
  // with only the log terms kept, the residual at angle 0 on the outer circle
  // is -log(1 - |y|/b) exactly, and that is where the maximum sits
  double expected = -std::log(1.0 - 1.5 / 2.0);
  CHECK(boundary_residual(ann, y, 0, 64) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("doubling the order never raises the boundary residual") {
  Annulus ann(1.0, 2.0);
  PolarPoint y(1.5, 0.0);
  double prev = std::numeric_limits<double>::infinity();
  for (int M : {0, 1, 2, 4, 8, 16, 32, 64}) {
    double res = boundary_residual(ann, y, M, 64);
    CHECK(res <= prev);
    prev = res;
  }
}

TEST_CASE("boundary residual enforces the ratio cap") {
  Annulus ann(1.0, 2.0);
  CHECK_THROWS_AS(boundary_residual(ann, PolarPoint(1.96, 0.0), 16, 32),
                  std::invalid_argument);
  CHECK_THROWS_AS(boundary_residual(ann, PolarPoint(1.02, 0.0), 16, 32),
                  std::invalid_argument);
}

TEST_CASE("poisson solve conserves flux and reflects symmetrically") {
  Annulus ann(1.0, 2.0);
  PolarPoint y(1.5, 0.0);
  PoissonGrid grid = fd_poisson_green(ann, y, 64, 64);
  CHECK(std::abs(grid.flux - two_pi) / two_pi < 0.01);
  // y on the theta = 0 axis: discrete problem symmetric under j -> n - j
  for (int i = 1; i < grid.n_r; i += 7) {
    for (int j = 1; j < grid.n_theta / 2; j += 5) {
      CHECK(grid.value(i, j) ==
            doctest::Approx(grid.value(i, grid.n_theta - j)).epsilon(1e-10));
    }
  }
}

TEST_CASE("poisson solve approaches the series away from the source") {
  Annulus ann(1.0, 2.0);
  PolarPoint y(1.5, 0.0);
  PoissonGrid grid = fd_poisson_green(ann, y, 128, 128);
  double gap = poisson_series_gap(grid, ann, y, 0.2);
  CHECK(gap < 3e-2);  // discretization level at 128^2; the 256^2 bound is 5e-3
}

TEST_CASE("poisson solve requires the pole on a node") {
  Annulus ann(1.0, 2.0);
  CHECK_THROWS_AS(fd_poisson_green(ann, PolarPoint(1.503, 0.0), 64, 64),
                  std::invalid_argument);
  CHECK_THROWS_AS(fd_poisson_green(ann, PolarPoint(1.5, 0.0), 32, 64), std::invalid_argument);
}

TEST_CASE("coarse grid sweep already localizes the antipodal optimum") {
  Annulus ann(1.0, 2.0);
  GridSearchResult best = grid_minimize_two_point(ann, 8);
  CHECK(std::abs(best.delta_theta - pi) <= two_pi / 8.0);  // one of the two bins next to pi
  CHECK(distance(best.config.points[0], best.config.points[1]) > 0.5 * best.cell_dr);
}

TEST_CASE("grid sweep at moderate resolution brackets r0") {
  Annulus ann(1.0, 2.0);
  double r0 = solve_r0(ann, 1e-12).r0;
  GridSearchResult best = grid_minimize_two_point(ann, 32);
  CHECK(std::abs(best.delta_theta - pi) < two_pi / 32.0);
  CHECK(std::abs(best.r1 - r0) < 1.0 / 32.0);
  CHECK(std::abs(best.r2 - r0) < 1.0 / 32.0);
}

TEST_CASE("central_gradient matches an elementary function") {
  auto f = [](const PlanarPoint& p) { return p.x1 * p.x1 + 3.0 * p.x2; };
  PlanarPoint g = central_gradient(f, {1.5, -2.0}, 1e-6);
  CHECK(g.x1 == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(g.x2 == doctest::Approx(3.0).epsilon(1e-9));
}
