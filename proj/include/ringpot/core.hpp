#pragma once

// Domain geometry and series-control policy shared by the whole library:
// annulus a < |x| < b, polar/planar point types, and the geometric-tail
// truncation rule for the Fourier series evaluated in green.hpp.

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>

namespace ringpot {

inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr const char* version = "0.1.0";

struct PlanarPoint {
  double x1 = 0.0;
  double x2 = 0.0;
};

inline PlanarPoint operator+(PlanarPoint p, PlanarPoint q) { return {p.x1 + q.x1, p.x2 + q.x2}; }
inline PlanarPoint operator-(PlanarPoint p, PlanarPoint q) { return {p.x1 - q.x1, p.x2 - q.x2}; }
inline PlanarPoint operator*(double c, PlanarPoint p) { return {c * p.x1, c * p.x2}; }
inline double dot(PlanarPoint p, PlanarPoint q) { return p.x1 * q.x1 + p.x2 * q.x2; }
inline double norm(PlanarPoint p) { return std::hypot(p.x1, p.x2); }
// rotation of p by +pi/2: (-x2, x1)
inline PlanarPoint perp(PlanarPoint p) { return {-p.x2, p.x1}; }

// Angle in radians folded into [0, 2*pi).
inline double normalize_angle(double theta) {
  double t = std::fmod(theta, two_pi);
  if (t < 0.0) t += two_pi;
  if (t >= two_pi) t = 0.0;  // fmod can land exactly on 2*pi after the shift
  return t;
}

struct PolarPoint {
  double r = 1.0;
  double theta = 0.0;

  PolarPoint() = default;
  PolarPoint(double r_, double theta_) : r(r_), theta(normalize_angle(theta_)) {
    if (!(r > 0.0) || !std::isfinite(r)) {
      throw std::domain_error("PolarPoint: radius must be positive and finite");
    }
  }
};

PolarPoint to_polar(const PlanarPoint& p);
PlanarPoint to_planar(const PolarPoint& p);

inline PolarPoint rotated(const PolarPoint& p, double alpha) { return {p.r, p.theta + alpha}; }
inline double distance(const PolarPoint& x, const PolarPoint& y) {
  // (rx - ry)^2 + 4 rx ry sin^2(phi/2): stable near x = y, unlike the cosine form
  double s = std::sin(0.5 * (x.theta - y.theta));
  double d2 = (x.r - y.r) * (x.r - y.r) + 4.0 * x.r * y.r * s * s;
  return std::sqrt(d2);
}

struct Annulus {
  double a;
  double b;

  Annulus(double a_, double b_) : a(a_), b(b_) {
    if (!std::isfinite(a) || !std::isfinite(b) || !(0.0 < a) || !(a < b)) {
      throw std::invalid_argument("Annulus: need 0 < a < b (inner radius must be less than outer)");
    }
  }

  bool contains(const PolarPoint& p) const { return a < p.r && p.r < b; }
  bool contains_closed(const PolarPoint& p) const { return a <= p.r && p.r <= b; }
  double width() const { return b - a; }
};

// Truncation policy for the Fourier series. tol/m_max are inputs; m_used and
// bound are filled by auto_truncation (bound = tail bound actually achieved,
// which exceeds tol when m_max saturates).
struct SeriesControl {
  double tol = 1e-10;
  int m_max = 512;
  int m_used = 0;  // 0 = not yet resolved against a point set
  double bound = std::numeric_limits<double>::infinity();

  bool resolved() const { return m_used >= 1; }
};

// Two tail shapes occur: value series carry a 1/m factor, derivative series
// do not.
enum class SeriesKind { value, derivative };

// Smallest M with the geometric tail bound below tol for decay ratio q:
//   value:      sum_{m>M} q^m / m  <=  q^(M+1) / ((M+1)(1-q))  < tol
//   derivative: sum_{m>M} q^m      <=  q^(M+1) / (1-q)         < tol
// Capped at m_max; the achieved bound is reported either way.
SeriesControl truncation_for_ratio(double q, double tol, int m_max = 512,
                                   SeriesKind kind = SeriesKind::value);

// Decay ratio of the two-point series between radii r1 and r2: the terms fall
// off like max(r1 r2 / b^2, a^2 / (r1 r2))^m. With r1 = r2 = r this covers the
// single-point (Robin) series as well. One of the radii may sit on a boundary
// circle; then the ratio is governed by the other radius alone.
double pair_ratio(const Annulus& ann, double r1, double r2);

// Slowest-decaying ratio over every pair of the given radii, self-pairs
// included (a point set evaluates both its Robin terms and all mutual Green
// terms).
double slowest_ratio(const Annulus& ann, std::span<const double> radii);

// truncation_for_ratio at the slowest ratio of the point set.
SeriesControl auto_truncation(const Annulus& ann, std::span<const double> radii, double tol,
                              int m_max = 512, SeriesKind kind = SeriesKind::value);

// splitmix64 stream; std:: distributions are implementation-defined, this
// seeds and runs identically on any platform
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }  // [0,1)

 private:
  std::uint64_t state_;
};

// Neumaier compensated accumulation; series terms decay geometrically and the
// cos m(theta - theta_y) factors alternate in sign.
class CompensatedSum {
 public:
  void add(double x) {
    double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      c_ += (sum_ - t) + x;
    } else {
      c_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + c_; }

 private:
  double sum_ = 0.0;
  double c_ = 0.0;
};

}  // namespace ringpot
