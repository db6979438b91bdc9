#pragma once

// Dirichlet Green function of the annulus in Fourier form, the Robin
// function, and their gradients.
//
// Normalization: -Laplace_x G = 2 pi delta_y, G = 0 on both circles, so
//   G(x,y) = -log|x-y| + u(x,y),
//   u(x,y) = A0(y) + B0(y) log|x|
//            - sum_{m>=1} (1/m) (Am(y)|x|^m + Bm(y)|x|^-m) cos m(theta-theta_y),
// with u harmonic in x, and R(y) = -u(y,y).

#include "ringpot/core.hpp"

namespace ringpot {

struct FourierCoefficients {
  int m = 0;
  double A = 0.0;
  double B = 0.0;
};

// Exact coefficient values for a <= |y| <= b:
//   A0 = log b * log(a/|y|) / log(a/b),   B0 = log(|y|/b) / log(a/b),
//   Am = (|y|^m - (a^2/|y|)^m) / (b^2m - a^2m),
//   Bm = a^2m ((b^2/|y|)^m - |y|^m) / (b^2m - a^2m).
FourierCoefficients coefficients(const Annulus& ann, const PolarPoint& y, int m);

struct GradientValue {
  PlanarPoint vector;
  double radial_part = 0.0;      // component along x/|x|
  double tangential_part = 0.0;  // component along (-x2,x1)/|x|
};

// G(x,y) for strictly interior x != y.
double green(const Annulus& ann, const PolarPoint& x, const PolarPoint& y,
             const SeriesControl& ctrl = {});

// u(x,y) = G(x,y) + log|x-y|, defined on the closed annulus (x = y allowed).
double regular_part(const Annulus& ann, const PolarPoint& x, const PolarPoint& y,
                    const SeriesControl& ctrl = {});

// u with exactly m_terms series terms (m_terms = 0 keeps only the log part);
// boundary/validation entry used by the boundary-residual oracle.
double regular_part_fixed(const Annulus& ann, const PolarPoint& x, const PolarPoint& y,
                          int m_terms);

// R(y) = -u(y,y); radial, strictly interior y.
double robin(const Annulus& ann, const PolarPoint& y, const SeriesControl& ctrl = {});

// grad_x G(x,y), strictly interior, x != y.
GradientValue grad_green_x(const Annulus& ann, const PolarPoint& x, const PolarPoint& y,
                           const SeriesControl& ctrl = {});

// Full gradient of R (not the halved form the characterization uses); purely
// radial.
GradientValue grad_robin(const Annulus& ann, const PolarPoint& y, const SeriesControl& ctrl = {});

}  // namespace ringpot
