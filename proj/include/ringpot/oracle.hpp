#pragma once

// Independent brute-force validators. These deliberately avoid the analytic
// gradient code: they check the series values against a finite-difference
// Poisson solve, the regular part against discrete harmonicity and the
// boundary data, and the solver result against an exhaustive grid sweep.

#include <functional>
#include <span>
#include <vector>

#include "ringpot/functional.hpp"

namespace ringpot {

// 5-point stencil (f(x+h,e1)+f(x-h,e1)+f(x+h,e2)+f(x-h,e2)-4f(x))/h^2
double discrete_laplacian(const std::function<double(const PlanarPoint&)>& f,
                          const PlanarPoint& x, double h);

PlanarPoint central_gradient(const std::function<double(const PlanarPoint&)>& f,
                             const PlanarPoint& x, double h);

struct FDReport {
  double h = 0.0;
  double residual_h = 0.0;    // max |discrete Laplacian| at h
  double residual_h2 = 0.0;   // same at h/2
  double order_estimate = 0.0;  // log2(residual_h / residual_h2), ~2 for the stencil
};

// Discrete Laplacian of the regular part u(.,y) at the samples; u is harmonic,
// so the residual is pure stencil error and must shrink at second order.
FDReport fd_harmonic_check(const Annulus& ann, const PolarPoint& y,
                           std::span<const PolarPoint> samples, double h);

struct PoissonGrid {
  double a = 0.0, b = 0.0;
  int n_r = 0, n_theta = 0;
  double dr = 0.0, dtheta = 0.0;
  std::vector<double> values;  // (n_r+1) x n_theta, boundary rows zero
  double flux = 0.0;           // -integral of dG/dn over both circles, ~ 2 pi

  double radius(int i) const { return a + i * dr; }
  double angle(int j) const { return j * dtheta; }
  double value(int i, int j) const { return values[static_cast<std::size_t>(i) * n_theta + j]; }
};

// Direct solve of -Laplace u = 2 pi delta_y on the polar grid (conservative
// 5-point scheme, Dirichlet rows eliminated, single-cell source of total mass
// 2 pi). y must sit on a grid node.
PoissonGrid fd_poisson_green(const Annulus& ann, const PolarPoint& y, int n_r, int n_theta);

// max |grid - green| over nodes at distance > exclude from y (the single-cell
// source is only first-order accurate nearby)
double poisson_series_gap(const PoissonGrid& grid, const Annulus& ann, const PolarPoint& y,
                          double exclude, double series_tol = 1e-10);

// max over sampled boundary angles, both circles, of |u(x,y) - log|x-y|| at
// truncation order m_trunc; requires a/|y| <= 0.95 and |y|/b <= 0.95 so the
// boundary series ratio stays controlled.
double boundary_residual(const Annulus& ann, const PolarPoint& y, int m_trunc, int n_samples);

struct GridSearchResult {
  Configuration config;  // theta_1 fixed to 0 by rotation invariance
  double value = 0.0;
  double r1 = 0.0, r2 = 0.0, delta_theta = 0.0;
  double cell_dr = 0.0, cell_dtheta = 0.0;
};

// Exhaustive sweep of F over (r1, r2, dtheta) cell centers: minimizes over
// the radii the angular maximum of F (the critical configuration is a saddle,
// so a raw extremum would sit in boundary or diagonal cells). Diagonal cells
// are skipped. Serves as an initialization-free check that the optimum is
// near-antipodal at r0.
GridSearchResult grid_minimize_two_point(const Annulus& ann, int n_grid);

}  // namespace ringpot
