#pragma once

// Kirchhoff-Routh type functional on l-point configurations,
//   F(p_1..p_l) = sum_i R(p_i) - sum_{i != j} G(p_i, p_j)
// (ordered pairs, so each unordered pair is counted twice; F(p) = R(p) for
// l = 1), its gradient, and the blow-up characterization residual
//   e_i = (1/2) grad R(p_i) - sum_{j != i} grad_x G(p_i, p_j).
// grad F at p_i equals 2 e_i, so grad F = 0 iff every e_i vanishes.

#include <vector>

#include "ringpot/core.hpp"
#include "ringpot/green.hpp"

namespace ringpot {

struct Configuration {
  std::vector<PolarPoint> points;

  int size() const { return static_cast<int>(points.size()); }
  Configuration rotated(double alpha) const;
};

// Throws when a point leaves the open annulus or two points coincide (the
// diagonal set is outside the functional's domain).
void validate_configuration(const Annulus& ann, const Configuration& config);

// One truncation order for the whole configuration, from the max series
// ratio over all point pairs.
SeriesControl resolve_for(const Annulus& ann, const Configuration& config,
                          const SeriesControl& ctrl, SeriesKind kind);

double hamiltonian(const Annulus& ann, const Configuration& config,
                   const SeriesControl& ctrl = {});

std::vector<GradientValue> grad_hamiltonian(const Annulus& ann, const Configuration& config,
                                            const SeriesControl& ctrl = {});

struct CharResidual {
  std::vector<GradientValue> per_point;  // e_i, decomposed along p_i
  double norm = 0.0;                     // max_i |e_i|
};

CharResidual char_residual(const Annulus& ann, const Configuration& config,
                           const SeriesControl& ctrl = {});

}  // namespace ringpot
