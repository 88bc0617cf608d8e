#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "hflow/ambient.hpp"

namespace hflow {

enum class Backend {
  FullCircle,    // n = 1, theta_j = 2 pi j / N, periodic
  Axisymmetric,  // n >= 1, colatitude theta_j = pi (j + 1/2) / N, even across both poles
};

std::string to_string(Backend backend);
Backend backend_from_string(const std::string& name);

// Radial graph u over a geodesic sphere, sampled on a uniform parameter grid.
// Immutable; every value of u must be positive.
class GraphPatch {
 public:
  GraphPatch(Backend backend, AmbientParams params, std::vector<double> u);

  static GraphPatch sphere(Backend backend, AmbientParams params, std::size_t N, double radius);
  static GraphPatch sample(Backend backend, AmbientParams params, std::size_t N,
                           const std::function<double(double)>& u_of_theta);

  // Same grid and ambient, new values.
  GraphPatch with_values(std::vector<double> u) const;

  Backend backend() const noexcept { return backend_; }
  const AmbientParams& params() const noexcept { return params_; }
  int dim() const noexcept { return params_.n; }
  std::size_t size() const noexcept { return u_.size(); }
  std::span<const double> u() const noexcept { return u_; }
  double u(std::size_t j) const { return u_[j]; }
  double spacing() const noexcept;
  double theta(std::size_t j) const noexcept;

  // W_j with sum_j W_j f(theta_j) ~ int_{S^n} f d sigma for zonal f.
  std::span<const double> parameter_weights() const noexcept { return *weights_; }

 private:
  Backend backend_;
  AmbientParams params_;
  std::vector<double> u_;
  std::shared_ptr<const std::vector<double>> weights_;
};

// Integration weights on the staggered colatitude grid that are exact for
// int_0^pi c(theta) sin^{n-1}(theta) d theta when c is a cosine polynomial
// of degree < N. For n = 1 this is the midpoint rule, for n = 2 Fejer's first rule.
std::vector<double> colatitude_weights(int n, std::size_t N);

// Per-node induced geometry of a graph patch. Metric and second fundamental
// form are diagonal in (theta, azimuth) coordinates; azimuthal components are
// stored per unit sin^2(theta), i.e. g_pp = phi^2 and h_pp = h_psipsi / sin^2.
struct GeometryFields {
  int n = 1;
  std::size_t N = 0;
  std::vector<double> du, d2u;
  std::vector<double> phi, dphi;
  std::vector<double> g_tt, g_pp;
  std::vector<double> ginv_tt, ginv_pp;
  std::vector<double> v;
  std::vector<double> grad_norm;  // |Du| = |u'| / phi
  std::vector<double> h_tt, h_pp;
  std::vector<double> kappa_t, kappa_p;  // shape-operator eigenvalues
  std::vector<double> area_density;      // sqrt(g) / sqrt(sigma)
  std::vector<double> chi;               // v / sinh(a u)
  std::vector<double> kappa_flat;        // n entries per node

  std::span<const double> kappa(std::size_t j) const {
    return {kappa_flat.data() + j * static_cast<std::size_t>(n), static_cast<std::size_t>(n)};
  }
  double mean_curvature(std::size_t j) const;
  double min_curvature(std::size_t j) const;
};

GeometryFields build_geometry(const GraphPatch& patch);

// int_M field d mu.
double surface_integral(const GraphPatch& patch, const GeometryFields& geom,
                        std::span<const double> field);
double surface_integral(const GraphPatch& patch, std::span<const double> field);
double area(const GraphPatch& patch, const GeometryFields& geom);

// V_{n+1-k}(M), k in {0..n}.
double mixed_volume(const GraphPatch& patch, const GeometryFields& geom, int k);
double mixed_volume(const GraphPatch& patch, int k);
std::vector<double> all_mixed_volumes(const GraphPatch& patch, const GeometryFields& geom);

// Geodesic translation of the graph's center. FullCircle: distance d toward
// polar direction psi. Axisymmetric: psi must be 0 (toward the theta = 0 pole)
// or pi; a negative distance flips the direction.
struct CenterShift {
  double distance = 0.0;
  double direction = 0.0;
};

GraphPatch recenter(const GraphPatch& patch, const CenterShift& shift);

// Approximate center of a largest enclosed geodesic ball.
CenterShift estimate_inball_center(const GraphPatch& patch);

// Band-limited interpolant of u through the grid values (Fourier on the
// circle, cosine series on the colatitude grid).
class GraphInterpolant {
 public:
  explicit GraphInterpolant(const GraphPatch& patch);
  double operator()(double theta) const;

 private:
  Backend backend_;
  std::vector<double> cos_coef_;
  std::vector<double> sin_coef_;
};

struct Snapshot {
  GraphPatch patch;
  double t;
};

std::string format_snapshot(const GraphPatch& patch, double t);
Snapshot parse_snapshot(const std::string& text);
void write_snapshot(const std::string& path, const GraphPatch& patch, double t);
Snapshot read_snapshot(const std::string& path);

}  // namespace hflow
