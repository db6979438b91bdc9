#include "ringpot/green.hpp"

#include <cmath>

namespace ringpot {
namespace {

// The series are summed with the four scale-free ratios
//   p1 = rx ry / b^2            (from Am |x|^m, leading part)
//   p2 = (a/b)^2 rx / ry        (from Am |x|^m, reflected part)
//   p3 = a^2 / (rx ry)          (from Bm |x|^-m, leading part)
//   p4 = (a/b)^2 ry / rx        (from Bm |x|^-m, reflected part)
//   w  = (a/b)^2                (denominator b^2m - a^2m, factored)
// so that
//   Am |x|^m + Bm |x|^-m = (p1^m - p2^m + p3^m - p4^m) / (1 - w^m).
// All five ratios stay below one for any pair the truncation rule admits
// (pair ratio q < 1), so the running powers never overflow and underflow is
// harmless.
struct PairRatios {
  double p1, p2, p3, p4, w;

  PairRatios(const Annulus& ann, double rx, double ry) {
    double ab2 = (ann.a / ann.b) * (ann.a / ann.b);
    p1 = rx * ry / (ann.b * ann.b);
    p2 = ab2 * rx / ry;
    p3 = ann.a * ann.a / (rx * ry);
    p4 = ab2 * ry / rx;
    w = ab2;
  }
};

void check_interior(const Annulus& ann, const PolarPoint& p, const char* who) {
  if (!ann.contains(p)) {
    throw std::domain_error(std::string(who) + ": point must lie strictly inside the annulus");
  }
}

void check_closed(const Annulus& ann, const PolarPoint& p, const char* who) {
  if (!ann.contains_closed(p)) {
    throw std::domain_error(std::string(who) + ": point must lie in the closed annulus");
  }
}

SeriesControl resolve_pair(const Annulus& ann, double rx, double ry, const SeriesControl& ctrl,
                           SeriesKind kind) {
  if (ctrl.resolved()) return ctrl;
  return truncation_for_ratio(pair_ratio(ann, rx, ry), ctrl.tol, ctrl.m_max, kind);
}

double a0_coeff(const Annulus& ann, double ry) {
  return std::log(ann.b) * std::log(ann.a / ry) / std::log(ann.a / ann.b);
}

double b0_coeff(const Annulus& ann, double ry) {
  return std::log(ry / ann.b) / std::log(ann.a / ann.b);
}

// sum_{m=1}^{M} (1/m) (Am rx^m + Bm rx^-m) cos(m phi)
double series_value(const Annulus& ann, double rx, double ry, double phi, int M) {
  PairRatios p(ann, rx, ry);
  CompensatedSum s;
  double q1 = 1.0, q2 = 1.0, q3 = 1.0, q4 = 1.0, wm = 1.0;
  for (int m = 1; m <= M; ++m) {
    q1 *= p.p1;
    q2 *= p.p2;
    q3 *= p.p3;
    q4 *= p.p4;
    wm *= p.w;
    double comb = (q1 - q2 + q3 - q4) / (1.0 - wm);
    s.add(comb * std::cos(m * phi) / m);
  }
  return s.value();
}

}  // namespace

FourierCoefficients coefficients(const Annulus& ann, const PolarPoint& y, int m) {
  check_closed(ann, y, "coefficients");
  if (m < 0) throw std::invalid_argument("coefficients: order m must be >= 0");
  if (m == 0) return {0, a0_coeff(ann, y.r), b0_coeff(ann, y.r)};
  double den = 1.0 - std::pow(ann.a / ann.b, 2 * m);
  double b2 = ann.b * ann.b;
  double A = (std::pow(y.r / b2, m) - std::pow(ann.a * ann.a / (y.r * b2), m)) / den;
  double B = (std::pow(ann.a * ann.a / y.r, m) - std::pow(ann.a * ann.a * y.r / b2, m)) / den;
  return {m, A, B};
}

double regular_part(const Annulus& ann, const PolarPoint& x, const PolarPoint& y,
                    const SeriesControl& ctrl) {
  check_closed(ann, x, "regular_part");
  check_closed(ann, y, "regular_part");
  SeriesControl c = resolve_pair(ann, x.r, y.r, ctrl, SeriesKind::value);
  return a0_coeff(ann, y.r) + b0_coeff(ann, y.r) * std::log(x.r) -
         series_value(ann, x.r, y.r, x.theta - y.theta, c.m_used);
}

double regular_part_fixed(const Annulus& ann, const PolarPoint& x, const PolarPoint& y,
                          int m_terms) {
  check_closed(ann, x, "regular_part");
  check_closed(ann, y, "regular_part");
  if (m_terms < 0) throw std::invalid_argument("regular_part_fixed: m_terms must be >= 0");
  return a0_coeff(ann, y.r) + b0_coeff(ann, y.r) * std::log(x.r) -
         series_value(ann, x.r, y.r, x.theta - y.theta, m_terms);
}

double green(const Annulus& ann, const PolarPoint& x, const PolarPoint& y,
             const SeriesControl& ctrl) {
  check_interior(ann, x, "green");
  check_interior(ann, y, "green");
  double d = distance(x, y);
  if (d == 0.0) {
    throw std::domain_error("green: singular at x = y (use robin for the regular limit)");
  }
  return -std::log(d) + regular_part(ann, x, y, ctrl);
}

double robin(const Annulus& ann, const PolarPoint& y, const SeriesControl& ctrl) {
  check_interior(ann, y, "robin");
  SeriesControl c = resolve_pair(ann, y.r, y.r, ctrl, SeriesKind::value);
  double lab = std::log(ann.a / ann.b);
  double lyb = std::log(y.r / ann.b);
  // (|y|/b)^2m - 2 (a/b)^2m + (a/|y|)^2m over 1 - (a/b)^2m, with 1/m
  double u = (y.r / ann.b) * (y.r / ann.b);
  double v = (ann.a / y.r) * (ann.a / y.r);
  double w = (ann.a / ann.b) * (ann.a / ann.b);
  CompensatedSum s;
  double um = 1.0, vm = 1.0, wm = 1.0;
  for (int m = 1; m <= c.m_used; ++m) {
    um *= u;
    vm *= v;
    wm *= w;
    s.add((um - 2.0 * wm + vm) / (m * (1.0 - wm)));
  }
  return -lyb * lyb / lab - std::log(ann.b) + s.value();
}

GradientValue grad_green_x(const Annulus& ann, const PolarPoint& x, const PolarPoint& y,
                           const SeriesControl& ctrl) {
  check_interior(ann, x, "grad_green_x");
  check_interior(ann, y, "grad_green_x");
  double d = distance(x, y);
  if (d == 0.0) throw std::domain_error("grad_green_x: singular at x = y");
  SeriesControl c = resolve_pair(ann, x.r, y.r, ctrl, SeriesKind::derivative);

  double phi = x.theta - y.theta;
  PairRatios p(ann, x.r, y.r);
  CompensatedSum sum_rad;  // (Am rx^m - Bm rx^-m) cos(m phi)
  CompensatedSum sum_tan;  // (Am rx^m + Bm rx^-m) sin(m phi)
  double q1 = 1.0, q2 = 1.0, q3 = 1.0, q4 = 1.0, wm = 1.0;
  for (int m = 1; m <= c.m_used; ++m) {
    q1 *= p.p1;
    q2 *= p.p2;
    q3 *= p.p3;
    q4 *= p.p4;
    wm *= p.w;
    double am_xm = (q1 - q2) / (1.0 - wm);
    double bm_xm = (q3 - q4) / (1.0 - wm);
    sum_rad.add((am_xm - bm_xm) * std::cos(m * phi));
    sum_tan.add((am_xm + bm_xm) * std::sin(m * phi));
  }

  PlanarPoint xc = to_planar(x);
  PlanarPoint yc = to_planar(y);
  PlanarPoint xhat = (1.0 / x.r) * xc;
  PlanarPoint xhat_perp = perp(xhat);
  PlanarPoint diff = xc - yc;

  GradientValue g;
  g.vector = (-1.0 / (d * d)) * diff +
             ((b0_coeff(ann, y.r) - sum_rad.value()) / x.r) * xhat +
             (sum_tan.value() / x.r) * xhat_perp;
  g.radial_part = dot(g.vector, xhat);
  g.tangential_part = dot(g.vector, xhat_perp);
  return g;
}

GradientValue grad_robin(const Annulus& ann, const PolarPoint& y, const SeriesControl& ctrl) {
  check_interior(ann, y, "grad_robin");
  SeriesControl c = resolve_pair(ann, y.r, y.r, ctrl, SeriesKind::derivative);

  double u = (y.r / ann.b) * (y.r / ann.b);
  double v = (ann.a / y.r) * (ann.a / y.r);
  double w = (ann.a / ann.b) * (ann.a / ann.b);
  CompensatedSum s;
  double um = 1.0, vm = 1.0, wm = 1.0;
  for (int m = 1; m <= c.m_used; ++m) {
    um *= u;
    vm *= v;
    wm *= w;
    s.add((um - vm) / (1.0 - wm));
  }
  double r_prime = 2.0 * (-b0_coeff(ann, y.r) + s.value()) / y.r;

  GradientValue g;
  g.vector = r_prime * (1.0 / y.r) * to_planar(y);
  g.radial_part = r_prime;
  g.tangential_part = 0.0;
  return g;
}

}  // namespace ringpot
