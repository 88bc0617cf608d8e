#pragma once

// Meridian-plane computations in the hyperboloid model
// {p in L^3 : <p,p> = -1/a^2, p0 > 0}, <x,y> = -x0 y0 + x1 y1 + x2 y2.

#include <cmath>

namespace hflow::detail {

struct LPoint {
  double x0, x1, x2;
};

inline double lorentz_dot(const LPoint& p, const LPoint& q) {
  return -p.x0 * q.x0 + p.x1 * q.x1 + p.x2 * q.x2;
}

inline LPoint polar_point(double a, double rho, double beta) {
  const double s = std::sinh(a * rho) / a;
  return {std::cosh(a * rho) / a, s * std::cos(beta), s * std::sin(beta)};
}

struct Polar {
  double rho;
  double beta;
};

inline Polar to_polar(double a, const LPoint& p) {
  const double planar = std::hypot(p.x1, p.x2);
  return {std::asinh(a * planar) / a, std::atan2(p.x2, p.x1)};
}

inline double distance(double a, const LPoint& p, const LPoint& q) {
  const double c = -a * a * lorentz_dot(p, q);
  return c <= 1.0 ? 0.0 : std::acosh(c) / a;
}

// Isometry moving the origin a distance d toward polar direction psi while
// keeping directions parallel: R(psi) B(d) R(-psi).
class Translation {
 public:
  Translation(double a, double d, double psi)
      : ch_(std::cosh(a * d)), sh_(std::sinh(a * d)), c_(std::cos(psi)), s_(std::sin(psi)) {}

  LPoint apply(const LPoint& p) const {
    // rotate by -psi
    const double y1 = c_ * p.x1 + s_ * p.x2;
    const double y2 = -s_ * p.x1 + c_ * p.x2;
    // boost along axis 1
    const double z0 = ch_ * p.x0 + sh_ * y1;
    const double z1 = sh_ * p.x0 + ch_ * y1;
    // rotate back by psi
    return {z0, c_ * z1 - s_ * y2, s_ * z1 + c_ * y2};
  }

 private:
  double ch_, sh_, c_, s_;
};

}  // namespace hflow::detail
