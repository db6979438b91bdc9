#include "ringpot/core.hpp"

#include <algorithm>

namespace ringpot {

PolarPoint to_polar(const PlanarPoint& p) {
  double r = std::hypot(p.x1, p.x2);
  if (r == 0.0) {
    throw std::domain_error("to_polar: degenerate point at the origin");
  }
  if (!std::isfinite(r)) {
    throw std::domain_error("to_polar: coordinates must be finite");
  }
  return {r, normalize_angle(std::atan2(p.x2, p.x1))};
}

PlanarPoint to_planar(const PolarPoint& p) {
  return {p.r * std::cos(p.theta), p.r * std::sin(p.theta)};
}

double pair_ratio(const Annulus& ann, double r1, double r2) {
  if (!(ann.a <= r1 && r1 <= ann.b) || !(ann.a <= r2 && r2 <= ann.b)) {
    throw std::domain_error("pair_ratio: radius outside the closed annulus");
  }
  double prod = r1 * r2;
  return std::max(prod / (ann.b * ann.b), ann.a * ann.a / prod);
}

double slowest_ratio(const Annulus& ann, std::span<const double> radii) {
  if (radii.empty()) {
    throw std::invalid_argument("slowest_ratio: need at least one radius");
  }
  double q = 0.0;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    for (std::size_t j = i; j < radii.size(); ++j) {
      q = std::max(q, pair_ratio(ann, radii[i], radii[j]));
    }
  }
  return q;
}

SeriesControl truncation_for_ratio(double q, double tol, int m_max, SeriesKind kind) {
  if (!(tol > 0.0)) throw std::invalid_argument("truncation_for_ratio: tol must be positive");
  if (m_max < 1) throw std::invalid_argument("truncation_for_ratio: m_max must be >= 1");
  if (!(0.0 <= q && q < 1.0)) {
    // q >= 1 cannot happen while an interior radius is involved
    throw std::domain_error("truncation_for_ratio: series ratio must satisfy 0 <= q < 1");
  }

  SeriesControl ctrl;
  ctrl.tol = tol;
  ctrl.m_max = m_max;
  double qpow = q * q;  // q^(M+1) at M = 1
  int m = 1;
  auto tail = [&](int order) {
    double t = qpow / (1.0 - q);
    return kind == SeriesKind::value ? t / (order + 1) : t;
  };
  while (tail(m) >= tol && m < m_max) {
    ++m;
    qpow *= q;
  }
  ctrl.m_used = m;
  ctrl.bound = tail(m);
  return ctrl;
}

SeriesControl auto_truncation(const Annulus& ann, std::span<const double> radii, double tol,
                              int m_max, SeriesKind kind) {
  return truncation_for_ratio(slowest_ratio(ann, radii), tol, m_max, kind);
}

}  // namespace ringpot
