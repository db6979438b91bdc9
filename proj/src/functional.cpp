#include "ringpot/functional.hpp"

#include <cmath>

namespace ringpot {

Configuration Configuration::rotated(double alpha) const {
  Configuration out;
  out.points.reserve(points.size());
  for (const auto& p : points) out.points.push_back(ringpot::rotated(p, alpha));
  return out;
}

void validate_configuration(const Annulus& ann, const Configuration& config) {
  if (config.points.empty()) {
    throw std::domain_error("configuration: need at least one point");
  }
  for (const auto& p : config.points) {
    if (!ann.contains(p)) {
      throw std::domain_error("configuration: point must lie strictly inside the annulus");
    }
  }
  for (std::size_t i = 0; i < config.points.size(); ++i) {
    for (std::size_t j = i + 1; j < config.points.size(); ++j) {
      if (distance(config.points[i], config.points[j]) == 0.0) {
        throw std::domain_error("configuration: coincident points (diagonal set excluded)");
      }
    }
  }
}

SeriesControl resolve_for(const Annulus& ann, const Configuration& config,
                          const SeriesControl& ctrl, SeriesKind kind) {
  if (ctrl.resolved()) return ctrl;
  std::vector<double> radii;
  radii.reserve(config.points.size());
  for (const auto& p : config.points) radii.push_back(p.r);
  return auto_truncation(ann, radii, ctrl.tol, ctrl.m_max, kind);
}

double hamiltonian(const Annulus& ann, const Configuration& config, const SeriesControl& ctrl) {
  validate_configuration(ann, config);
  SeriesControl c = resolve_for(ann, config, ctrl, SeriesKind::value);
  CompensatedSum s;
  for (const auto& p : config.points) s.add(robin(ann, p, c));
  // ordered double sum = twice each unordered pair, G symmetric
  for (std::size_t i = 0; i < config.points.size(); ++i) {
    for (std::size_t j = i + 1; j < config.points.size(); ++j) {
      s.add(-2.0 * green(ann, config.points[i], config.points[j], c));
    }
  }
  return s.value();
}

CharResidual char_residual(const Annulus& ann, const Configuration& config,
                           const SeriesControl& ctrl) {
  validate_configuration(ann, config);
  SeriesControl c = resolve_for(ann, config, ctrl, SeriesKind::derivative);

  CharResidual res;
  res.per_point.reserve(config.points.size());
  for (std::size_t i = 0; i < config.points.size(); ++i) {
    const PolarPoint& pi = config.points[i];
    PlanarPoint e = 0.5 * grad_robin(ann, pi, c).vector;
    for (std::size_t j = 0; j < config.points.size(); ++j) {
      if (j == i) continue;
      e = e - grad_green_x(ann, pi, config.points[j], c).vector;
    }
    PlanarPoint phat = (1.0 / pi.r) * to_planar(pi);
    GradientValue gv;
    gv.vector = e;
    gv.radial_part = dot(e, phat);
    gv.tangential_part = dot(e, perp(phat));
    res.per_point.push_back(gv);
    res.norm = std::max(res.norm, norm(e));
  }
  return res;
}

std::vector<GradientValue> grad_hamiltonian(const Annulus& ann, const Configuration& config,
                                            const SeriesControl& ctrl) {
  // dF/dp_i = grad R(p_i) - 2 sum_{j != i} grad_x G(p_i, p_j) = 2 e_i
  CharResidual res = char_residual(ann, config, ctrl);
  std::vector<GradientValue> out;
  out.reserve(res.per_point.size());
  for (const auto& e : res.per_point) {
    GradientValue g;
    g.vector = 2.0 * e.vector;
    g.radial_part = 2.0 * e.radial_part;
    g.tangential_part = 2.0 * e.tangential_part;
    out.push_back(g);
  }
  return out;
}

}  // namespace ringpot
