#pragma once

// Closed-form geometry of hyperbolic space H^{n+1} of curvature -a^2 in
// geodesic polar coordinates, and exact values for geodesic balls.

namespace hflow {

struct AmbientParams {
  double a = 1.0;  // curvature scale, sectional curvature is -a^2
  int n = 1;       // hypersurface dimension

  AmbientParams() = default;
  AmbientParams(double a_, int n_);
};

struct Warp {
  double phi;   // a^{-1} sinh(a r)
  double dphi;  // cosh(a r)
};

// Round-metric scale of the geodesic sphere S_r: metric phi(r)^2 sigma.
Warp warp(const AmbientParams& params, double r);

// Principal curvature a coth(a r) of the geodesic sphere of radius r.
double sphere_curvature(const AmbientParams& params, double r);

// |S^m|, the volume of the unit m-sphere (|S^0| = 2).
double unit_sphere_volume(int m);

// Phi_n(r) = int_0^r a^{-n} sinh^n(a s) ds, the radial volume integrand.
double radial_volume_integral(const AmbientParams& params, double r);

// V_{n+1-k}(B_r). k = 0 is the enclosed volume, k >= 1 the normalized
// integral of H_{k-1} over the sphere S_r.
double ball_mixed_volume(const AmbientParams& params, double r, int k);

// Inverse of ball_mixed_volume in r (relative tolerance 1e-12).
double ball_radius_for_mixed_volume(const AmbientParams& params, double volume, int k);

// Binomial coefficient as a double; 0 when k < 0 or k > n.
double binomial(int n, int k);

}  // namespace hflow
