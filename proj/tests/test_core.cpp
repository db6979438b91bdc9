#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <array>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "ringpot/core.hpp"
#include "ringpot/green.hpp"

using namespace ringpot;

TEST_CASE("to_polar on axis points") {
  PolarPoint p = to_polar({1.0, 0.0});
  CHECK(p.r == doctest::Approx(1.0));
  CHECK(p.theta == doctest::Approx(0.0));

  p = to_polar({0.0, 2.0});
  CHECK(p.r == doctest::Approx(2.0));
  CHECK(p.theta == doctest::Approx(std::numbers::pi / 2));

  p = to_polar({-1.5, 0.0});
  CHECK(p.r == doctest::Approx(1.5));
  CHECK(p.theta == doctest::Approx(std::numbers::pi));
}

TEST_CASE("to_polar rejects the origin") {
  CHECK_THROWS_AS(to_polar({0.0, 0.0}), std::domain_error);
}

TEST_CASE("polar/planar round trip on 1000 random points") {
  SplitMix64 rng(17);
  for (int i = 0; i < 1000; ++i) {
    PolarPoint p(0.1 + 10.0 * rng.uniform(), two_pi * rng.uniform());
    PolarPoint q = to_polar(to_planar(p));
    CHECK(std::abs(q.r - p.r) <= 1e-14 * p.r);
    double dtheta = std::abs(q.theta - p.theta);
    dtheta = std::min(dtheta, two_pi - dtheta);
    CHECK(dtheta <= 1e-13);
  }
}

TEST_CASE("annulus membership is strictly open") {
  Annulus ann(1.0, 2.0);
  CHECK(ann.contains(PolarPoint(1.5, 0.0)));
  CHECK_FALSE(ann.contains(PolarPoint(1.0, 0.0)));
  CHECK_FALSE(ann.contains(PolarPoint(2.3, 0.0)));
  CHECK(ann.contains_closed(PolarPoint(1.0, 0.0)));
}

TEST_CASE("annulus construction validates radii") {
  CHECK_THROWS_AS(Annulus(2.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(Annulus(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(Annulus(1.0, 1.0), std::invalid_argument);
}

namespace {

// independent evaluation of the stated tail rule
int expected_order(double q, double tol, int m_max) {
  int m = 1;
  double qpow = q * q;
  while (qpow / ((m + 1) * (1.0 - q)) >= tol && m < m_max) {
    ++m;
    qpow *= q;
  }
  return m;
}

}  // namespace

TEST_CASE("auto_truncation matches the tail rule at q = 0.5625") {
  Annulus ann(1.0, 2.0);
  std::array<double, 2> radii{1.5, 1.5};
  SeriesControl c = auto_truncation(ann, radii, 1e-12);
  double q = std::max(1.5 * 1.5 / 4.0, 1.0 / (1.5 * 1.5));
  CHECK(q == doctest::Approx(0.5625));
  CHECK(c.m_used == expected_order(q, 1e-12, 512));
  CHECK(c.m_used <= 60);
  CHECK(c.bound < 1e-12);
}

TEST_CASE("auto_truncation saturates near the boundary") {
  Annulus ann(1.0, 2.0);
  std::array<double, 1> radii{1.999};
  SeriesControl c = auto_truncation(ann, radii, 1e-12);
  CHECK(c.m_used == c.m_max);
  CHECK(c.bound > 1e-12);
}

TEST_CASE("auto_truncation needs very few terms on a wide annulus") {
  Annulus ann(0.01, 100.0);
  std::array<double, 1> radii{1.0};
  SeriesControl c = auto_truncation(ann, radii, 1e-12);
  CHECK(c.m_used <= 5);
  CHECK(c.bound < 1e-12);
}

TEST_CASE("auto_truncation is monotone in tol") {
  Annulus ann(1.0, 2.0);
  SplitMix64 rng(3);
  for (int i = 0; i < 50; ++i) {
    double r1 = 1.05 + 0.9 * rng.uniform();
    double r2 = 1.05 + 0.9 * rng.uniform();
    std::array<double, 2> radii{r1, r2};
    int prev = 0;
    for (double tol : {1e-4, 1e-6, 1e-8, 1e-10, 1e-12}) {
      int m = auto_truncation(ann, radii, tol).m_used;
      CHECK(m >= prev);
      prev = m;
    }
  }
}

TEST_CASE("empirical tail: doubling the order moves the value by less than tol") {
  Annulus ann(1.0, 2.0);
  SplitMix64 rng(11);
  const double tol = 1e-10;
  int tested = 0;
  while (tested < 200) {
    PolarPoint x(1.0 + rng.uniform(), two_pi * rng.uniform());
    PolarPoint y(1.0 + rng.uniform(), two_pi * rng.uniform());
    if (!ann.contains(x) || !ann.contains(y)) continue;
    std::array<double, 2> radii{x.r, y.r};
    SeriesControl c = auto_truncation(ann, radii, tol);
    if (c.m_used >= c.m_max) continue;
    ++tested;
    double at_m = regular_part_fixed(ann, x, y, c.m_used);
    double at_2m = regular_part_fixed(ann, x, y, 2 * c.m_used);
    CHECK(std::abs(at_2m - at_m) < tol);
  }
}

TEST_CASE("auto_truncation rejects radii outside the closed annulus") {
  Annulus ann(1.0, 2.0);
  std::array<double, 1> radii{2.5};
  CHECK_THROWS_AS(auto_truncation(ann, radii, 1e-10), std::domain_error);
}
