#include "ringpot/oracle.hpp"

#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>

#include "ringpot/green.hpp"

namespace ringpot {

double discrete_laplacian(const std::function<double(const PlanarPoint&)>& f,
                          const PlanarPoint& x, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("discrete_laplacian: h must be positive");
  double cross = (f({x.x1 + h, x.x2}) + f({x.x1 - h, x.x2})) +
                 (f({x.x1, x.x2 + h}) + f({x.x1, x.x2 - h}));
  return (cross - 4.0 * f(x)) / (h * h);
}

PlanarPoint central_gradient(const std::function<double(const PlanarPoint&)>& f,
                             const PlanarPoint& x, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("central_gradient: h must be positive");
  return {(f({x.x1 + h, x.x2}) - f({x.x1 - h, x.x2})) / (2.0 * h),
          (f({x.x1, x.x2 + h}) - f({x.x1, x.x2 - h})) / (2.0 * h)};
}

FDReport fd_harmonic_check(const Annulus& ann, const PolarPoint& y,
                           std::span<const PolarPoint> samples, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("fd_harmonic_check: h must be positive");
  if (samples.empty()) throw std::invalid_argument("fd_harmonic_check: no sample points");
  std::vector<double> radii{y.r};
  for (const auto& s : samples) {
    if (s.r - ann.a < 4.0 * h || ann.b - s.r < 4.0 * h) {
      throw std::invalid_argument(
          "fd_harmonic_check: sample closer than 4h to a boundary circle");
    }
    if (distance(s, y) < 4.0 * h) {
      throw std::invalid_argument("fd_harmonic_check: sample closer than 4h to the pole y");
    }
    radii.push_back(s.r + h);  // widest stencil radius
    radii.push_back(s.r - h);
  }
  // one fixed truncation for every stencil evaluation: the truncated series
  // is itself exactly harmonic, so the residual is pure stencil error
  SeriesControl ctrl = auto_truncation(ann, radii, 1e-15, 2048);
  auto u = [&](const PlanarPoint& p) { return regular_part(ann, to_polar(p), y, ctrl); };

  FDReport rep;
  rep.h = h;
  for (double hh : {h, 0.5 * h}) {
    double worst = 0.0;
    for (const auto& s : samples) {
      worst = std::max(worst, std::abs(discrete_laplacian(u, to_planar(s), hh)));
    }
    (hh == h ? rep.residual_h : rep.residual_h2) = worst;
  }
  rep.order_estimate = std::log2(rep.residual_h / rep.residual_h2);
  return rep;
}

PoissonGrid fd_poisson_green(const Annulus& ann, const PolarPoint& y, int n_r, int n_theta) {
  if (n_r < 64 || n_theta < 64) {
    throw std::invalid_argument("fd_poisson_green: grid resolutions must be >= 64");
  }
  PoissonGrid grid;
  grid.a = ann.a;
  grid.b = ann.b;
  grid.n_r = n_r;
  grid.n_theta = n_theta;
  grid.dr = ann.width() / n_r;
  grid.dtheta = two_pi / n_theta;

  // pole must sit on a node
  double fi = (y.r - ann.a) / grid.dr;
  double fj = y.theta / grid.dtheta;
  int iy = static_cast<int>(std::lround(fi));
  int jy = static_cast<int>(std::lround(fj)) % n_theta;
  if (std::abs(fi - std::lround(fi)) > 1e-9 || std::abs(fj - std::lround(fj)) > 1e-9 ||
      iy < 1 || iy > n_r - 1) {
    throw std::invalid_argument("fd_poisson_green: pole y must lie on an interior grid node");
  }

  // conservative scheme for -div(r grad u) = r f, row i scaled by r_i so the
  // matrix is symmetric positive definite:
  //   (r_{i+1/2}(u_{i+1}-u_i) - r_{i-1/2}(u_i-u_{i-1}))/dr^2
  //   + (u_{j+1}-2u_j+u_{j-1})/(r_i dtheta^2)
  const int rows = n_r - 1;
  const auto N = static_cast<Eigen::Index>(rows) * n_theta;
  auto idx = [&](int i, int j) {
    return static_cast<Eigen::Index>(i - 1) * n_theta + ((j % n_theta + n_theta) % n_theta);
  };

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(N) * 5);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(N);
  const double dr2 = grid.dr * grid.dr;
  const double dth2 = grid.dtheta * grid.dtheta;

  for (int i = 1; i <= rows; ++i) {
    double r = grid.radius(i);
    double rp = r + 0.5 * grid.dr;
    double rm = r - 0.5 * grid.dr;
    double cth = 1.0 / (r * dth2);
    for (int j = 0; j < n_theta; ++j) {
      trips.emplace_back(idx(i, j), idx(i, j), (rp + rm) / dr2 + 2.0 * cth);
      if (i + 1 <= rows) trips.emplace_back(idx(i, j), idx(i + 1, j), -rp / dr2);
      if (i - 1 >= 1) trips.emplace_back(idx(i, j), idx(i - 1, j), -rm / dr2);
      trips.emplace_back(idx(i, j), idx(i, j + 1), -cth);
      trips.emplace_back(idx(i, j), idx(i, j - 1), -cth);
    }
  }
  // single-cell source: density 2pi/(r dr dtheta) in the pole cell; the row
  // scaling by r leaves 2pi/(dr dtheta)
  rhs[idx(iy, jy)] = two_pi / (grid.dr * grid.dtheta);

  Eigen::SparseMatrix<double> A(N, N);
  A.setFromTriplets(trips.begin(), trips.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(A);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("fd_poisson_green: factorization failed");
  }
  Eigen::VectorXd u = solver.solve(rhs);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("fd_poisson_green: solve failed");
  }

  grid.values.assign(static_cast<std::size_t>(n_r + 1) * n_theta, 0.0);
  for (int i = 1; i <= rows; ++i) {
    for (int j = 0; j < n_theta; ++j) {
      grid.values[static_cast<std::size_t>(i) * n_theta + j] = u[idx(i, j)];
    }
  }

  // -dG/dn over both circles with one-sided second-order differences
  double flux = 0.0;
  for (int j = 0; j < n_theta; ++j) {
    double dudr_b = (4.0 * grid.value(n_r - 1, j) - grid.value(n_r - 2, j)) / (2.0 * grid.dr);
    double dudr_a = (4.0 * grid.value(1, j) - grid.value(2, j)) / (2.0 * grid.dr);
    flux += dudr_b * ann.b * grid.dtheta;  // -du/dr at r=b, u(b)=0
    flux += dudr_a * ann.a * grid.dtheta;  // +du/dr at r=a
  }
  grid.flux = flux;
  return grid;
}

double poisson_series_gap(const PoissonGrid& grid, const Annulus& ann, const PolarPoint& y,
                          double exclude, double series_tol) {
  SeriesControl policy;
  policy.tol = series_tol;
  double worst = 0.0;
  for (int i = 1; i <= grid.n_r - 1; ++i) {
    for (int j = 0; j < grid.n_theta; ++j) {
      PolarPoint x(grid.radius(i), grid.angle(j));
      if (distance(x, y) <= exclude) continue;
      worst = std::max(worst, std::abs(grid.value(i, j) - green(ann, x, y, policy)));
    }
  }
  return worst;
}

double boundary_residual(const Annulus& ann, const PolarPoint& y, int m_trunc, int n_samples) {
  if (m_trunc < 0) throw std::invalid_argument("boundary_residual: m_trunc must be >= 0");
  if (n_samples < 1) throw std::invalid_argument("boundary_residual: need n_samples >= 1");
  if (ann.a / y.r > 0.95 || y.r / ann.b > 0.95) {
    throw std::invalid_argument(
        "boundary_residual: need a/|y| <= 0.95 and |y|/b <= 0.95 to cap the boundary ratio");
  }
  double worst = 0.0;
  for (double rc : {ann.a, ann.b}) {
    for (int k = 0; k < n_samples; ++k) {
      PolarPoint x(rc, two_pi * k / n_samples);
      double res = regular_part_fixed(ann, x, y, m_trunc) - std::log(distance(x, y));
      worst = std::max(worst, std::abs(res));
    }
  }
  return worst;
}

GridSearchResult grid_minimize_two_point(const Annulus& ann, int n_grid) {
  if (n_grid < 4) throw std::invalid_argument("grid_minimize_two_point: need n_grid >= 4");

  GridSearchResult best;
  best.cell_dr = ann.width() / n_grid;
  best.cell_dtheta = two_pi / n_grid;
  best.value = std::numeric_limits<double>::infinity();

  SeriesControl policy;  // resolved per pair inside green/robin
  std::vector<double> radii(n_grid), robin_at(n_grid);
  for (int i = 0; i < n_grid; ++i) {
    radii[i] = ann.a + (i + 0.5) * best.cell_dr;
    robin_at[i] = robin(ann, PolarPoint(radii[i], 0.0), policy);
  }

  // The two-point critical configuration is a saddle of F: F blows up to
  // +inf when a point approaches the boundary (through the Robin part) and to
  // -inf on the diagonal (through the Green part). So sweep the minimax
  // structure instead of a raw extremum: for each radius pair take the
  // angular maximum of F, then minimize that over the radii. Its optimum is
  // exactly the antipodal configuration at the common radius.
  const double min_dist = 0.5 * best.cell_dr;  // diagonal guard
  for (int i1 = 0; i1 < n_grid; ++i1) {
    PolarPoint p1(radii[i1], 0.0);
    for (int i2 = i1; i2 < n_grid; ++i2) {  // F symmetric under relabeling
      double angular_max = -std::numeric_limits<double>::infinity();
      double arg_dtheta = 0.0;
      for (int j = 0; j < n_grid; ++j) {
        double dtheta = (j + 0.5) * best.cell_dtheta;
        PolarPoint p2(radii[i2], dtheta);
        if (distance(p1, p2) < min_dist) continue;
        double value = robin_at[i1] + robin_at[i2] - 2.0 * green(ann, p1, p2, policy);
        if (value > angular_max) {
          angular_max = value;
          arg_dtheta = dtheta;
        }
      }
      if (angular_max < best.value) {
        best.value = angular_max;
        best.r1 = radii[i1];
        best.r2 = radii[i2];
        best.delta_theta = arg_dtheta;
      }
    }
  }
  best.config.points = {PolarPoint(best.r1, 0.0), PolarPoint(best.r2, best.delta_theta)};
  return best;
}

}  // namespace ringpot
