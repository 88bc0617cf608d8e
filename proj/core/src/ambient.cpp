#include "hflow/ambient.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <string>

#include "hflow/errors.hpp"

namespace hflow {

namespace {

void require_positive_radius(double r, const char* op) {
  if (!(r > 0.0) || !std::isfinite(r)) {
    throw DomainError(std::string(op) + ": radius must be positive and finite, got " +
                      std::to_string(r));
  }
}

void require_index(const AmbientParams& params, int k, const char* op) {
  if (k < 0 || k > params.n) {
    throw DomainError(std::string(op) + ": index k=" + std::to_string(k) +
                      " outside {0..n} with n=" + std::to_string(params.n));
  }
}

double quadrature_radial(const AmbientParams& p, double r) {
  auto integrand = [&](double s) { return std::pow(std::sinh(p.a * s) / p.a, p.n); };
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, 0.0, r, 15,
                                                                      1e-13, &err);
}

}  // namespace

AmbientParams::AmbientParams(double a_, int n_) : a(a_), n(n_) {
  if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("AmbientParams: a must be positive");
  if (n < 1) throw DomainError("AmbientParams: n must be >= 1");
}

Warp warp(const AmbientParams& params, double r) {
  require_positive_radius(r, "warp");
  return {std::sinh(params.a * r) / params.a, std::cosh(params.a * r)};
}

double sphere_curvature(const AmbientParams& params, double r) {
  require_positive_radius(r, "sphere_curvature");
  return params.a / std::tanh(params.a * r);
}

double unit_sphere_volume(int m) {
  if (m < 0) throw DomainError("unit_sphere_volume: negative dimension");
  const double half = 0.5 * (m + 1);
  return 2.0 * std::pow(std::numbers::pi, half) / std::tgamma(half);
}

double radial_volume_integral(const AmbientParams& p, double r) {
  if (r == 0.0) return 0.0;
  require_positive_radius(r, "radial_volume_integral");
  const double x = p.a * r;
  const double a2 = p.a * p.a;
  switch (p.n) {
    case 1: {
      const double sh = std::sinh(0.5 * x);
      return 2.0 * sh * sh / a2;
    }
    case 2:
      // sinh(2x)/4 - x/2 cancels catastrophically near 0
      if (x < 0.1) return quadrature_radial(p, r);
      return (0.25 * std::sinh(2.0 * x) - 0.5 * x) / (a2 * p.a);
    case 3: {
      const double sh = std::sinh(0.5 * x);
      const double cm1 = 2.0 * sh * sh;  // cosh(x) - 1
      return cm1 * cm1 * (std::cosh(x) + 2.0) / (3.0 * a2 * a2);
    }
    default:
      return quadrature_radial(p, r);
  }
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double result = 1.0;
  for (int i = 1; i <= k; ++i) result = result * (n - k + i) / i;
  return std::round(result);
}

double ball_mixed_volume(const AmbientParams& p, double r, int k) {
  require_index(p, k, "ball_mixed_volume");
  require_positive_radius(r, "ball_mixed_volume");
  const double sphere = unit_sphere_volume(p.n);
  if (k == 0) return sphere * radial_volume_integral(p, r);
  // H_{k-1}(c e) = C(n, k-1) c^{k-1}
  const double kappa = sphere_curvature(p, r);
  const double hk = binomial(p.n, k - 1) * std::pow(kappa, k - 1);
  const double area = sphere * std::pow(std::sinh(p.a * r) / p.a, p.n);
  return hk * area / binomial(p.n, k - 1);
}

double ball_radius_for_mixed_volume(const AmbientParams& p, double volume, int k) {
  require_index(p, k, "ball_radius_for_mixed_volume");
  if (!(volume > 0.0) || !std::isfinite(volume)) {
    throw DomainError("ball_radius_for_mixed_volume: volume must be positive");
  }
  auto residual = [&](double r) { return ball_mixed_volume(p, r, k) - volume; };

  double lo = 1e-8;
  double hi = 50.0 / p.a;
  while (residual(lo) > 0.0 && lo > 1e-300) lo *= 1e-3;
  while (residual(hi) < 0.0) hi *= 2.0;

  while ((hi - lo) > 1e-6 * hi) {
    const double mid = 0.5 * (lo + hi);
    (residual(mid) < 0.0 ? lo : hi) = mid;
  }

  double r = 0.5 * (lo + hi);
  for (int it = 0; it < 50; ++it) {
    const double h = 1e-6 * r;
    const double slope = (residual(r + h) - residual(r - h)) / (2.0 * h);
    const double step = residual(r) / slope;
    double next = r - step;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    (residual(next) < 0.0 ? lo : hi) = next;
    const bool done = std::abs(next - r) <= 1e-15 * next;
    r = next;
    if (done) break;
  }
  return r;
}

}  // namespace hflow
