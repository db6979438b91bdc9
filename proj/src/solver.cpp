#include "ringpot/solver.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>

namespace ringpot {
namespace {

double profile_f(const Annulus& ann, double r) {
  return 2.0 * std::log(r / ann.b) / std::log(ann.a / ann.b) - 0.5;
}

double profile_f_prime(const Annulus& ann, double r) {
  return 2.0 / (r * std::log(ann.a / ann.b));
}

// smallest even M with the even-m geometric tail 2 q^(M+2)/(1-q^2) < tol
int g_order(const Annulus& ann, double r, double tol, int m_max) {
  double q = std::max((r / ann.b) * (r / ann.b), (ann.a / r) * (ann.a / r));
  int m = 2;
  double qpow = q * q * q * q;  // q^(M+2) at M = 2
  while (2.0 * qpow / (1.0 - q * q) >= tol && m + 2 <= m_max) {
    m += 2;
    qpow *= q * q;
  }
  return m;
}

double g_value(const Annulus& ann, double r, int m_top) {
  double u = (r / ann.b) * (r / ann.b);
  double v = (ann.a / r) * (ann.a / r);
  double w = (ann.a / ann.b) * (ann.a / ann.b);
  double u2 = u * u, v2 = v * v, w2 = w * w;
  CompensatedSum s;
  double um = 1.0, vm = 1.0, wm = 1.0;  // powers u^m, v^m, w^m over even m
  for (int m = 2; m <= m_top; m += 2) {
    um = (m == 2) ? u2 : um * u2;
    vm = (m == 2) ? v2 : vm * v2;
    wm = (m == 2) ? w2 : wm * w2;
    s.add(2.0 * (um - vm) / (1.0 - wm));
  }
  return s.value();
}

double g_prime(const Annulus& ann, double r, int m_top) {
  double u = (r / ann.b) * (r / ann.b);
  double v = (ann.a / r) * (ann.a / r);
  double w = (ann.a / ann.b) * (ann.a / ann.b);
  double u2 = u * u, v2 = v * v, w2 = w * w;
  CompensatedSum s;
  double um = 1.0, vm = 1.0, wm = 1.0;
  for (int m = 2; m <= m_top; m += 2) {
    um = (m == 2) ? u2 : um * u2;
    vm = (m == 2) ? v2 : vm * v2;
    wm = (m == 2) ? w2 : wm * w2;
    s.add(2.0 * (2.0 * m / r) * (um + vm) / (1.0 - wm));
  }
  return s.value();
}

SplitMix64 rng_for_start(std::uint64_t seed, int start_index) {
  SplitMix64 mixer(seed);
  std::uint64_t s = mixer.next() ^
                    ((static_cast<std::uint64_t>(start_index) + 1) * 0xD1B54A32D192ED03ull);
  return SplitMix64(s);
}

double min_separation(const Configuration& c) {
  double sep = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < c.points.size(); ++i) {
    for (std::size_t j = i + 1; j < c.points.size(); ++j) {
      sep = std::min(sep, distance(c.points[i], c.points[j]));
    }
  }
  return sep;
}

// Move every point in polar coordinates: point i shifts by t * dr_i radially
// and t * ds_i along its circle (ds is arc length, divided by the current
// radius to give the angle increment). Angular moves follow the circles
// exactly, so a step along the weak rotational modes does not inflate the
// radii the way a straight Cartesian step would. Empty optional when a point
// leaves the margin band or the configuration degenerates.
std::optional<Configuration> moved_polar(const Annulus& ann, const Configuration& c,
                                         const std::vector<double>& dr,
                                         const std::vector<double>& ds, double t,
                                         double margin, double sep_floor) {
  Configuration out;
  out.points.reserve(c.points.size());
  for (std::size_t i = 0; i < c.points.size(); ++i) {
    double r = c.points[i].r + t * dr[i];
    if (!(r > ann.a + margin && r < ann.b - margin)) return std::nullopt;
    out.points.emplace_back(r, c.points[i].theta + t * ds[i] / c.points[i].r);
  }
  if (out.size() >= 2 && min_separation(out) < sep_floor) return std::nullopt;
  return out;
}

void fill_diagnostics(CriticalPointReport& rep, std::optional<double> r0) {
  const auto& pts = rep.config.points;
  if (pts.size() == 2) {
    rep.antipodality_gap = norm(to_planar(pts[0]) + to_planar(pts[1]));
    if (r0) {
      rep.radius_gap = std::max(std::abs(pts[0].r - *r0), std::abs(pts[1].r - *r0));
    }
  } else if (pts.size() >= 3) {
    double rmin = pts[0].r, rmax = pts[0].r;
    std::vector<double> angles;
    angles.reserve(pts.size());
    for (const auto& p : pts) {
      rmin = std::min(rmin, p.r);
      rmax = std::max(rmax, p.r);
      angles.push_back(p.theta);
    }
    std::sort(angles.begin(), angles.end());
    double gmin = std::numeric_limits<double>::infinity(), gmax = 0.0;
    for (std::size_t k = 0; k < angles.size(); ++k) {
      double gap = (k + 1 < angles.size()) ? angles[k + 1] - angles[k]
                                           : angles[0] + two_pi - angles[k];
      gmin = std::min(gmin, gap);
      gmax = std::max(gmax, gap);
    }
    rep.radius_spread = rmax - rmin;
    rep.angle_gap_spread = gmax - gmin;
  }
}

CriticalPointReport refine_impl(const Annulus& ann, const Configuration& start,
                                const SolveOptions& opts, int start_index,
                                std::optional<double> r0) {
  validate_configuration(ann, start);
  const int l = start.size();
  const int n_rows = 2 * l;
  const int n_cols = 2 * l - 1;  // rotation gauge: point 0 moves along its ray only
  const double width = ann.width();
  const double margin = 0.005 * width;
  const double sep_feas = 0.02 * width;
  SeriesControl sctrl;
  sctrl.tol = opts.series_tol;

  CriticalPointReport rep;
  rep.start_index = start_index;

  // working copy clamped into the margin band (user seeds may touch it)
  Configuration X = start;
  for (auto& p : X.points) {
    p = PolarPoint(std::clamp(p.r, ann.a + margin, ann.b - margin), p.theta);
  }

  auto sep_floor = [&](const Configuration& c) {
    if (l < 2) return 0.0;
    return std::min(sep_feas, 0.9 * min_separation(c));
  };

  auto eval_residual = [&](const Configuration& c, Eigen::VectorXd& out) {
    CharResidual cr = char_residual(ann, c, sctrl);
    out.resize(n_rows);
    for (int i = 0; i < l; ++i) {
      out[2 * i] = cr.per_point[i].vector.x1;
      out[2 * i + 1] = cr.per_point[i].vector.x2;
    }
    return cr.norm;
  };

  // gauge coordinates: column 0 is the radial move of point 0; columns
  // 2i-1, 2i are the radial and arc-length moves of point i. Pinning point 0
  // to its ray removes the rotation null direction; the coordinates are
  // rotation equivariant.
  auto unpack = [&](const Eigen::VectorXd& step, std::vector<double>& dr,
                    std::vector<double>& ds) {
    dr.assign(l, 0.0);
    ds.assign(l, 0.0);
    dr[0] = step[0];
    for (int i = 1; i < l; ++i) {
      dr[i] = step[2 * i - 1];
      ds[i] = step[2 * i];
    }
  };

  Eigen::VectorXd e(n_rows);
  double rn = eval_residual(X, e);
  double last_step = std::numeric_limits<double>::infinity();
  const double fd_h = 1e-6 * width;
  int iter = 0;
  std::vector<double> dr, ds;

  while (iter < opts.max_iterations) {
    if (rn < opts.residual_tol && last_step < opts.step_tol) {
      rep.converged = true;
      break;
    }

    Eigen::MatrixXd J(n_rows, n_cols);
    {
      Eigen::VectorXd ep(n_rows), em(n_rows);
      Eigen::VectorXd unit = Eigen::VectorXd::Zero(n_cols);
      bool fd_ok = true;
      for (int k = 0; k < n_cols && fd_ok; ++k) {
        unit.setZero();
        unit[k] = 1.0;
        unpack(unit, dr, ds);
        auto xp = moved_polar(ann, X, dr, ds, fd_h, 0.0, 0.0);
        auto xm = moved_polar(ann, X, dr, ds, -fd_h, 0.0, 0.0);
        if (!xp || !xm) {
          fd_ok = false;
          break;
        }
        eval_residual(*xp, ep);
        eval_residual(*xm, em);
        J.col(k) = (ep - em) / (2.0 * fd_h);
      }
      if (!fd_ok) break;  // iterate pinned on the margin; report as-is
    }

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(J, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(1e-12);
    Eigen::VectorXd step = -svd.solve(e);

    double step_inf = step.lpNorm<Eigen::Infinity>();
    if (step_inf > 0.2 * width) step *= 0.2 * width / step_inf;
    unpack(step, dr, ds);

    // Backtracking in two tiers. The strong forcing keeps the Newton endgame
    // honest: when only noise-level decreases remain below the residual
    // target, the iteration stops instead of wandering. The weak tier lets
    // the far field grind through strongly nonlinear stretches where a full
    // Gauss-Newton model is poor.
    const double en2 = e.norm();
    const double floor_sep = sep_floor(X);
    bool accepted = false;
    double s_acc = 1.0;
    Configuration Xnew;
    Eigen::VectorXd enew(n_rows);
    double rnnew = 0.0;

    Configuration Xweak;
    Eigen::VectorXd eweak(n_rows);
    double rnweak = 0.0, sweak = 0.0;
    bool weak_available = false;

    double s = 1.0;
    for (int bt = 0; bt < 30 && !accepted; ++bt, s *= 0.5) {
      auto cand = moved_polar(ann, X, dr, ds, s, margin, floor_sep);
      if (!cand) continue;
      double rtry = eval_residual(*cand, enew);
      double nn = enew.norm();
      if (nn <= (1.0 - 0.3 * s) * en2) {
        Xnew = std::move(*cand);
        rnnew = rtry;
        s_acc = s;
        accepted = true;
      } else if (!weak_available && nn <= (1.0 - 1e-4 * s) * en2) {
        Xweak = std::move(*cand);
        eweak = enew;
        rnweak = rtry;
        sweak = s;
        weak_available = true;
      }
    }

    if (!accepted) {
      if (rn < opts.residual_tol) {
        // meaningful progress is exhausted below the residual target
        rep.converged = true;
        ++iter;
        break;
      }
      if (weak_available) {
        Xnew = std::move(Xweak);
        enew = std::move(eweak);
        rnnew = rnweak;
        s_acc = sweak;
        accepted = true;
      } else {
        // steepest-descent (Cauchy point) fallback for stretches where the
        // Gauss-Newton direction itself fails
        Eigen::VectorXd g = J.transpose() * e;
        double denom = (J * g).squaredNorm();
        if (g.norm() > 0.0 && denom > 0.0) {
          step = -(g.squaredNorm() / denom) * g;
          step_inf = step.lpNorm<Eigen::Infinity>();
          if (step_inf > 0.2 * width) step *= 0.2 * width / step_inf;
          unpack(step, dr, ds);
          s = 1.0;
          for (int bt = 0; bt < 40 && !accepted; ++bt, s *= 0.5) {
            auto cand = moved_polar(ann, X, dr, ds, s, margin, floor_sep);
            if (!cand) continue;
            double rtry = eval_residual(*cand, enew);
            if (enew.norm() <= (1.0 - 1e-4 * s) * en2) {
              Xnew = std::move(*cand);
              rnnew = rtry;
              s_acc = s;
              accepted = true;
            }
          }
        }
      }
    }

    ++iter;
    if (!accepted) break;  // stationary for the residual norm away from a root
    X = std::move(Xnew);
    e = std::move(enew);
    rn = rnnew;
    last_step = s_acc * step.norm();
    if (opts.on_iterate) opts.on_iterate(start_index, iter, X);
  }

  rep.config = X;
  rep.residual_norm = rn;
  rep.iterations = iter;
  fill_diagnostics(rep, r0);
  return rep;
}

}  // namespace

ProfilePoint profile(const Annulus& ann, double r, const SeriesControl& ctrl) {
  if (!(ann.a < r && r < ann.b)) {
    throw std::domain_error("profile: radius must lie strictly between a and b");
  }
  int m_top = ctrl.resolved() ? ctrl.m_used : g_order(ann, r, ctrl.tol, ctrl.m_max);
  return {r, profile_f(ann, r), g_value(ann, r, m_top)};
}

RootReport solve_r0(const Annulus& ann, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("solve_r0: tol must be positive");
  const double lo0 = std::sqrt(ann.a * ann.b);
  const double hi0 = std::pow(ann.a, 0.25) * std::pow(ann.b, 0.75);
  const double gtol = std::min(1e-15, 0.001 * tol);
  const int gmax = 8192;

  auto h = [&](double r) { return profile_f(ann, r) - g_value(ann, r, g_order(ann, r, gtol, gmax)); };
  auto hp = [&](double r) {
    return profile_f_prime(ann, r) - g_prime(ann, r, g_order(ann, r, gtol, gmax));
  };

  RootReport rep;
  rep.bracket_lo = lo0;
  rep.bracket_hi = hi0;

  double lo = lo0, hi = hi0;
  int iters = 0;

  // h(lo) = f(sqrt(ab)) = 1/2 > 0 and h(hi) = -g(hi) < 0 by monotonicity;
  // keep the signed bracket through every phase
  auto place = [&](double r, double hr) { (hr > 0.0 ? lo : hi) = r; };

  // bisection down to a Newton-friendly width
  while (hi - lo > 1e-3) {
    double mid = 0.5 * (lo + hi);
    place(mid, h(mid));
    ++iters;
  }

  double x = 0.5 * (lo + hi);
  double hx = h(x);
  ++iters;
  place(x, hx);

  for (int k = 0; k < 60 && std::abs(hx) >= 0.25 * tol; ++k) {
    double d = hp(x);
    double cand = x - hx / d;
    if (!std::isfinite(cand) || cand <= lo || cand >= hi) cand = 0.5 * (lo + hi);
    double hc = h(cand);
    ++iters;
    place(cand, hc);
    if (cand == x) break;
    x = cand;
    hx = hc;
  }

  // shrink the bracket itself below tol
  while (hi - lo >= tol && iters < 400) {
    double mid = 0.5 * (lo + hi);
    double hm = h(mid);
    ++iters;
    place(mid, hm);
    if (std::abs(hm) < std::abs(hx)) {
      x = mid;
      hx = hm;
    }
  }

  rep.r0 = x;
  rep.residual = std::abs(hx);
  rep.final_width = hi - lo;
  rep.iterations = iters;
  return rep;
}

CriticalPointReport refine_critical_point(const Annulus& ann, const Configuration& start,
                                          const SolveOptions& opts, int start_index) {
  std::optional<double> r0;
  if (start.size() == 2) r0 = solve_r0(ann, 1e-12).r0;
  return refine_impl(ann, start, opts, start_index, r0);
}

std::vector<CriticalPointReport> find_critical_points(const Annulus& ann, int l, int n_starts,
                                                      const SolveOptions& opts) {
  if (l < 1) throw std::invalid_argument("find_critical_points: need l >= 1");
  if (n_starts < 1) throw std::invalid_argument("find_critical_points: need n_starts >= 1");

  std::optional<double> r0;
  if (l == 2) r0 = solve_r0(ann, 1e-12).r0;

  const double width = ann.width();
  const double delta = opts.boundary_margin_frac * width;
  const double minsep = opts.min_separation_frac * width;

  std::vector<CriticalPointReport> reports;
  reports.reserve(n_starts);

  for (int start = 0; start < n_starts; ++start) {
    SplitMix64 rng = rng_for_start(opts.seed, start);
    Configuration c;
    int resamples = 0;
    for (int attempt = 0; attempt <= opts.max_resamples; ++attempt) {
      c.points.clear();
      for (int i = 0; i < l; ++i) {
        double r = ann.a + delta + (width - 2.0 * delta) * rng.uniform();
        double theta = two_pi * rng.uniform();
        c.points.emplace_back(r, theta);
      }
      if (l < 2 || min_separation(c) >= minsep) break;
      c.points.clear();
      ++resamples;
    }
    if (c.points.empty()) {
      // sampler exhausted (practically unreachable for sane l); report it
      CriticalPointReport rep;
      rep.start_index = start;
      rep.resamples = resamples;
      reports.push_back(std::move(rep));
      continue;
    }
    CriticalPointReport rep = refine_impl(ann, c, opts, start, r0);
    rep.resamples = resamples;
    reports.push_back(std::move(rep));
  }

  // cluster converged configurations modulo rotation + relabeling
  std::vector<std::pair<Configuration, int>> representatives;
  int next_id = 0;
  for (auto& rep : reports) {
    if (!rep.converged) continue;
    int id = -1;
    for (const auto& [repr, rid] : representatives) {
      if (config_distance(rep.config, repr) <= opts.cluster_tol) {
        id = rid;
        break;
      }
    }
    if (id < 0) {
      id = next_id++;
      representatives.emplace_back(rep.config, id);
    }
    rep.cluster_id = id;
  }
  return reports;
}

double config_distance(const Configuration& c, const Configuration& d) {
  if (c.size() != d.size() || c.size() == 0) {
    return std::numeric_limits<double>::infinity();
  }
  const int l = c.size();
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < l; ++i) {
    for (int j = 0; j < l; ++j) {
      Configuration cr = c.rotated(d.points[j].theta - c.points[i].theta);
      std::vector<bool> used(l, false);
      double maxdist = 0.0;
      for (int p = 0; p < l; ++p) {
        double bestp = std::numeric_limits<double>::infinity();
        int arg = -1;
        for (int q = 0; q < l; ++q) {
          if (used[q]) continue;
          double dist = distance(cr.points[p], d.points[q]);
          if (dist < bestp) {
            bestp = dist;
            arg = q;
          }
        }
        used[arg] = true;
        maxdist = std::max(maxdist, bestp);
      }
      best = std::min(best, maxdist);
    }
  }
  return best;
}

TwoPointReport verify_two_point(const Annulus& ann, const Configuration& config, double tol) {
  if (config.size() != 2) {
    throw std::invalid_argument("verify_two_point: configuration must have exactly two points");
  }
  validate_configuration(ann, config);
  if (!(tol > 0.0)) throw std::invalid_argument("verify_two_point: tol must be positive");

  const PolarPoint& P1 = config.points[0];
  const PolarPoint& P2 = config.points[1];
  const double r1 = P1.r, r2 = P2.r;
  const double dphi = P1.theta - P2.theta;

  TwoPointReport out;
  out.report.config = config;
  out.report.start_index = 0;

  SeriesControl sctrl;
  sctrl.tol = std::min(tol, 1e-12);
  sctrl.m_max = 2048;
  out.report.residual_norm = char_residual(ann, config, sctrl).norm;
  out.report.converged = out.report.residual_norm < 1e-9;
  fill_diagnostics(out.report, solve_r0(ann, std::min(tol, 1e-12)).r0);

  // subtract identity, all ratios in (0,1):
  //   u1=(r1/b)^2 u2=(r2/b)^2 u3=(a/r2)^2 u4=(a/r1)^2
  //   u5=a^2 r1/(b^2 r2) u6=a^2 r2/(b^2 r1) w=(a/b)^2
  const double b2 = ann.b * ann.b, a2 = ann.a * ann.a;
  const double u1 = r1 * r1 / b2, u2 = r2 * r2 / b2;
  const double u3 = a2 / (r2 * r2), u4 = a2 / (r1 * r1);
  const double u5 = a2 * r1 / (b2 * r2), u6 = a2 * r2 / (b2 * r1);
  const double w = a2 / b2;

  double d = distance(P1, P2);
  out.subtract_lhs = (r2 * r2 - r1 * r1) / (d * d);

  std::array<double, 2> radii{r1, r2};
  SeriesControl sc = auto_truncation(ann, radii, std::min(tol, 1e-12), 2048,
                                     SeriesKind::derivative);
  CompensatedSum rhs;
  double q1 = 1.0, q2 = 1.0, q3 = 1.0, q4 = 1.0, q5 = 1.0, q6 = 1.0, wm = 1.0;
  for (int m = 1; m <= sc.m_used; ++m) {
    q1 *= u1;
    q2 *= u2;
    q3 *= u3;
    q4 *= u4;
    q5 *= u5;
    q6 *= u6;
    wm *= w;
    rhs.add((q1 - q2 + q3 - q4 - 2.0 * std::cos(m * dphi) * (q5 - q6)) / (1.0 - wm));
  }
  out.subtract_rhs = rhs.value();
  out.subtract_gap = out.subtract_lhs - out.subtract_rhs;

  // per-m nonnegativity of the bracketed factor:
  //   1 + T^2 - 2 T S cos(m dphi) >= (1 - T)^2,  T=(ab/(r1 r2))^m, S=(a/b)^m
  out.m_checked = 50;
  double margin_min = std::numeric_limits<double>::infinity();
  for (int m = 1; m <= out.m_checked; ++m) {
    double T = std::pow(ann.a * ann.b / (r1 * r2), m);
    double S = std::pow(ann.a / ann.b, m);
    double bracket = 1.0 + T * T - 2.0 * T * S * std::cos(m * dphi);
    double low = (1.0 - T) * (1.0 - T);
    double margin = bracket - low;  // = 2T(1 - S cos), nonnegative since a < b
    if (margin < -1e-12 * (1.0 + T * T)) {
      throw std::logic_error("verify_two_point: bracketed factor fell below its proven bound");
    }
    margin_min = std::min(margin_min, margin);
  }
  out.bracket_margin_min = margin_min;
  return out;
}

std::vector<CriticalPointReport> polygon_explore(const Annulus& ann, int m, int n_starts,
                                                 const SolveOptions& opts) {
  if (m < 3) {
    throw std::invalid_argument(
        "polygon_explore: need m >= 3 (use verify_two_point for two-point configurations)");
  }
  return find_critical_points(ann, m, n_starts, opts);
}

}  // namespace ringpot
