#pragma once

// Root-finding for the common blow-up radius r0, multi-start search for
// critical points of the functional, antipodality verification for two-point
// configurations, and the regular-polygon exploration mode.
//
// The scalar equation behind r0 reads f(r) = g(r) with
//   f(r) = 2 log(r/b)/log(a/b) - 1/2            (decreasing, zero at a^(1/4) b^(3/4))
//   g(r) = sum_m ((-1)^m + 1)(r^2m - (ab)^2m r^-2m)/(b^2m - a^2m)
//                                               (increasing, zero at sqrt(ab))
// so f - g brackets a unique root on [sqrt(ab), a^(1/4) b^(3/4)].

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "ringpot/functional.hpp"

namespace ringpot {

struct ProfilePoint {
  double r = 0.0;
  double f = 0.0;
  double g = 0.0;
};

// Odd m drops out of g ((-1)^m + 1 = 0), so the sum runs over even m with
// weight 2.
ProfilePoint profile(const Annulus& ann, double r, const SeriesControl& ctrl = {});

struct RootReport {
  double r0 = 0.0;
  double residual = 0.0;   // |f(r0) - g(r0)|
  double bracket_lo = 0.0; // sqrt(ab)
  double bracket_hi = 0.0; // a^(1/4) b^(3/4)
  double final_width = 0.0;
  int iterations = 0;
};

// Bisection into the proven bracket, then bracket-guarded Newton on f - g.
RootReport solve_r0(const Annulus& ann, double tol = 1e-12);

struct SolveOptions {
  std::uint64_t seed = 0;
  double series_tol = 1e-10;
  double residual_tol = 1e-9;
  double step_tol = 1e-12;
  int max_iterations = 500;  // per start
  int max_resamples = 200;
  double boundary_margin_frac = 0.05;   // random starts keep this margin
  double min_separation_frac = 0.10;    // and this pairwise separation
  double cluster_tol = 1e-5;
  // invoked after every accepted iterate (start index, iteration, state)
  std::function<void(int, int, const Configuration&)> on_iterate;
};

struct CriticalPointReport {
  Configuration config;
  double residual_norm = 0.0;
  bool converged = false;
  int iterations = 0;
  int resamples = 0;
  int start_index = 0;
  int cluster_id = -1;  // assigned over converged reports, modulo rotation + relabeling
  // two-point diagnostics
  std::optional<double> antipodality_gap;  // |P1 + P2|
  std::optional<double> radius_gap;        // max_i ||P_i| - r0|
  // polygon diagnostics (l >= 3)
  std::optional<double> radius_spread;     // max |P_i| - min |P_i|
  std::optional<double> angle_gap_spread;  // max - min consecutive angular gap
};

// Damped Gauss-Newton on the stacked residual map, with a finite-difference
// Jacobian and truncated-SVD pseudoinverse, in the rotation gauge that pins
// the first point to its ray (F is rotation invariant, so critical points
// come in circles; the gauge removes that null direction). Norm-decrease
// backtracking supplies the damping. Critical points of any type are
// admissible: the two-point configuration is a saddle of F, so a plain
// ascent/descent on F itself would run off to the boundary or the diagonal.
CriticalPointReport refine_critical_point(const Annulus& ann, const Configuration& start,
                                          const SolveOptions& opts = {}, int start_index = 0);

// Random multi-start driver; non-converged runs are reported, not dropped.
std::vector<CriticalPointReport> find_critical_points(const Annulus& ann, int l, int n_starts,
                                                      const SolveOptions& opts = {});

struct TwoPointReport {
  CriticalPointReport report;
  // the two sides of the radial comparison identity
  //   (|P2|^2 - |P1|^2)/|P2 - P1|^2
  //     = sum_m (|P1|^2m - |P2|^2m)/(b^2m - a^2m) *
  //       [1 + (ab)^2m/(|P1||P2|)^2m - 2 a^2m cos(m dtheta)/(|P1||P2|)^m]
  double subtract_lhs = 0.0;
  double subtract_rhs = 0.0;
  double subtract_gap = 0.0;  // lhs - rhs; equals e2.P2 - e1.P1
  // min over m <= m_checked of bracket_m - (1 - (ab)^m/(|P1||P2|)^m)^2,
  // nonnegative by the proof estimate
  double bracket_margin_min = 0.0;
  int m_checked = 0;
};

TwoPointReport verify_two_point(const Annulus& ann, const Configuration& config,
                                double tol = 1e-12);

// find_critical_points at l = m vertices with polygon diagnostics; purely
// exploratory, nothing here asserts the regular-polygon conjecture.
std::vector<CriticalPointReport> polygon_explore(const Annulus& ann, int m, int n_starts,
                                                 const SolveOptions& opts = {});

// Distance between configurations modulo rotation and relabeling (used for
// clustering; exposed for tests).
double config_distance(const Configuration& c, const Configuration& d);

}  // namespace ringpot
