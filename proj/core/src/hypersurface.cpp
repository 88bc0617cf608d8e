#include "hflow/hypersurface.hpp"

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <utility>

#include "hflow/curvfn.hpp"
#include "hflow/errors.hpp"
#include "hflow/io.hpp"
#include "hyperboloid.hpp"

namespace hflow {

using std::numbers::pi;

std::string to_string(Backend backend) {
  return backend == Backend::FullCircle ? "FullCircle" : "Axisymmetric";
}

Backend backend_from_string(const std::string& name) {
  if (name == "FullCircle") return Backend::FullCircle;
  if (name == "Axisymmetric") return Backend::Axisymmetric;
  throw DomainError("unknown backend '" + name + "'");
}

// ---------------------------------------------------------------------------
// quadrature

namespace {

// int_0^pi cos(m t) sin^p(t) dt
//   = pi cos(m pi/2) p! / (2^p Gamma(1 + (p+m)/2) Gamma(1 + (p-m)/2))
double cosine_sine_moment(int m, int p) {
  const int quarter = m % 4;
  if (quarter == 1 || quarter == 3) return 0.0;
  const double cos_term = quarter == 0 ? 1.0 : -1.0;
  const double z = 1.0 + 0.5 * (p - m);
  if (z <= 0.0 && z == std::floor(z)) return 0.0;  // 1/Gamma vanishes at the poles
  double sign = 1.0;
  if (z < 0.0) sign = (static_cast<long>(std::ceil(-z)) % 2 == 0) ? 1.0 : -1.0;
  const double log_mag = std::lgamma(p + 1.0) - p * std::log(2.0) -
                         std::lgamma(1.0 + 0.5 * (p + m)) - std::lgamma(z);
  return sign * cos_term * pi * std::exp(log_mag);
}

std::shared_ptr<const std::vector<double>> cached_weights(Backend backend, int n, std::size_t N) {
  static std::mutex mutex;
  static std::map<std::tuple<int, int, std::size_t>, std::shared_ptr<const std::vector<double>>>
      cache;
  std::lock_guard lock(mutex);
  const auto key = std::make_tuple(static_cast<int>(backend), n, N);
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  std::vector<double> w;
  if (backend == Backend::FullCircle) {
    w.assign(N, 2.0 * pi / static_cast<double>(N));
  } else {
    w = colatitude_weights(n, N);
    const double shell = unit_sphere_volume(n - 1);
    for (double& x : w) x *= shell;
  }
  auto ptr = std::make_shared<const std::vector<double>>(std::move(w));
  cache.emplace(key, ptr);
  return ptr;
}

}  // namespace

std::vector<double> colatitude_weights(int n, std::size_t N) {
  if (n < 1 || N < 1) throw DomainError("colatitude_weights: need n >= 1 and N >= 1");
  const int p = n - 1;
  std::vector<double> moments(N);
  for (std::size_t m = 0; m < N; ++m) moments[m] = cosine_sine_moment(static_cast<int>(m), p);
  std::vector<double> w(N);
  const double inv = 1.0 / static_cast<double>(N);
  for (std::size_t j = 0; j < N; ++j) {
    const double t = pi * (static_cast<double>(j) + 0.5) * inv;
    double acc = moments[0];
    for (std::size_t m = 1; m < N; ++m) {
      if (moments[m] != 0.0) acc += 2.0 * moments[m] * std::cos(static_cast<double>(m) * t);
    }
    w[j] = acc * inv;
  }
  return w;
}

// ---------------------------------------------------------------------------
// GraphPatch

GraphPatch::GraphPatch(Backend backend, AmbientParams params, std::vector<double> u)
    : backend_(backend), params_(params), u_(std::move(u)) {
  if (backend_ == Backend::FullCircle && params_.n != 1) {
    throw DomainError("FullCircle backend requires n = 1");
  }
  if (u_.size() < 8) throw DomainError("GraphPatch: need at least 8 grid nodes");
  for (std::size_t j = 0; j < u_.size(); ++j) {
    if (!(u_[j] > 0.0) || !std::isfinite(u_[j])) {
      std::ostringstream os;
      os << "graph value u[" << j << "] = " << u_[j] << " is not positive";
      throw GeometryDegeneracyError(os.str(), j);
    }
  }
  weights_ = cached_weights(backend_, params_.n, u_.size());
}

GraphPatch GraphPatch::sphere(Backend backend, AmbientParams params, std::size_t N, double r) {
  return {backend, params, std::vector<double>(N, r)};
}

GraphPatch GraphPatch::sample(Backend backend, AmbientParams params, std::size_t N,
                              const std::function<double(double)>& u_of_theta) {
  std::vector<double> u(N);
  GraphPatch probe = GraphPatch::sphere(backend, params, N, 1.0);
  for (std::size_t j = 0; j < N; ++j) u[j] = u_of_theta(probe.theta(j));
  return {backend, params, std::move(u)};
}

GraphPatch GraphPatch::with_values(std::vector<double> u) const {
  if (u.size() != u_.size()) throw DomainError("with_values: grid size mismatch");
  return {backend_, params_, std::move(u)};
}

double GraphPatch::spacing() const noexcept {
  const double N = static_cast<double>(u_.size());
  return backend_ == Backend::FullCircle ? 2.0 * pi / N : pi / N;
}

double GraphPatch::theta(std::size_t j) const noexcept {
  const double jj = static_cast<double>(j);
  return backend_ == Backend::FullCircle ? jj * spacing() : (jj + 0.5) * spacing();
}

// ---------------------------------------------------------------------------
// geometry

double GeometryFields::mean_curvature(std::size_t j) const {
  double h = 0.0;
  for (double k : kappa(j)) h += k;
  return h;
}

double GeometryFields::min_curvature(std::size_t j) const {
  const auto k = kappa(j);
  return *std::min_element(k.begin(), k.end());
}

namespace {

// Fourth-order central differences with periodic (circle) or even-reflected
// (staggered colatitude) ghost values.
void differentiate(const GraphPatch& patch, std::vector<double>& du, std::vector<double>& d2u) {
  const auto u = patch.u();
  const std::ptrdiff_t N = static_cast<std::ptrdiff_t>(u.size());
  const bool periodic = patch.backend() == Backend::FullCircle;
  auto at = [&](std::ptrdiff_t i) {
    if (periodic) return u[static_cast<std::size_t>(((i % N) + N) % N)];
    if (i < 0) i = -i - 1;
    if (i >= N) i = 2 * N - 1 - i;
    return u[static_cast<std::size_t>(i)];
  };
  const double h = patch.spacing();
  du.resize(u.size());
  d2u.resize(u.size());
  for (std::ptrdiff_t j = 0; j < N; ++j) {
    const double um2 = at(j - 2), um1 = at(j - 1), u0 = at(j), up1 = at(j + 1), up2 = at(j + 2);
    du[j] = (um2 - 8.0 * um1 + 8.0 * up1 - up2) / (12.0 * h);
    d2u[j] = (-um2 + 16.0 * um1 - 30.0 * u0 + 16.0 * up1 - up2) / (12.0 * h * h);
  }
}

}  // namespace

GeometryFields build_geometry(const GraphPatch& patch) {
  const std::size_t N = patch.size();
  const int n = patch.dim();
  const double a = patch.params().a;
  const bool axisym = patch.backend() == Backend::Axisymmetric;

  GeometryFields g;
  g.n = n;
  g.N = N;
  differentiate(patch, g.du, g.d2u);
  for (auto* field : {&g.phi, &g.dphi, &g.g_tt, &g.g_pp, &g.ginv_tt, &g.ginv_pp, &g.v,
                      &g.grad_norm, &g.h_tt, &g.h_pp, &g.kappa_t, &g.kappa_p, &g.area_density,
                      &g.chi}) {
    field->resize(N);
  }
  g.kappa_flat.resize(N * static_cast<std::size_t>(n));

  for (std::size_t j = 0; j < N; ++j) {
    const double u = patch.u(j);
    const double u1 = g.du[j];
    const double u2 = g.d2u[j];
    const double sh = std::sinh(a * u);
    const double phi = sh / a;
    const double dphi = std::cosh(a * u);

    // g_ij = u_i u_j + phi^2 sigma_ij
    const double gtt = u1 * u1 + phi * phi;
    if (!(gtt > 0.0) || !std::isfinite(gtt)) {
      std::ostringstream os;
      os << "induced metric not positive definite at node " << j << " (g_tt = " << gtt << ")";
      throw GeometryDegeneracyError(os.str(), j);
    }
    const double v = std::sqrt(1.0 + (u1 * u1) / (phi * phi));

    // Christoffel symbols of the induced metric acting on u
    const double gamma_ttt = (u1 * u2 + phi * dphi * u1) / gtt;
    const double hess_tt = u2 - gamma_ttt * u1;
    // v^{-1} h_ij = -u_;ij + hbar_ij, hbar_ij = a coth(a u) gbar_ij = phi phi' sigma_ij
    const double htt = v * (-hess_tt + phi * dphi);

    g.phi[j] = phi;
    g.dphi[j] = dphi;
    g.g_tt[j] = gtt;
    g.g_pp[j] = phi * phi;
    g.ginv_tt[j] = 1.0 / gtt;
    g.ginv_pp[j] = 1.0 / (phi * phi);
    g.v[j] = v;
    g.grad_norm[j] = std::abs(u1) / phi;
    g.h_tt[j] = htt;
    g.kappa_t[j] = htt / gtt;
    g.chi[j] = v / sh;
    g.area_density[j] = std::sqrt(gtt) * std::pow(phi, n - 1);

    double* kap = g.kappa_flat.data() + j * static_cast<std::size_t>(n);
    kap[0] = g.kappa_t[j];
    if (axisym && n > 1) {
      // azimuthal components per unit sin^2(theta); only cot(theta) is needed
      const double t = patch.theta(j);
      const double cot = std::cos(t) / std::sin(t);
      const double gamma_tpp = -(phi * dphi * u1 + phi * phi * cot) / gtt;
      const double hess_pp = -gamma_tpp * u1;
      const double hpp = v * (-hess_pp + phi * dphi);
      g.h_pp[j] = hpp;
      g.kappa_p[j] = hpp / (phi * phi);
      for (int i = 1; i < n; ++i) kap[i] = g.kappa_p[j];
    } else {
      g.h_pp[j] = 0.0;
      g.kappa_p[j] = g.kappa_t[j];
    }
  }
  return g;
}

double surface_integral(const GraphPatch& patch, const GeometryFields& geom,
                        std::span<const double> field) {
  if (field.size() != patch.size() || geom.N != patch.size()) {
    throw DomainError("surface_integral: field has " + std::to_string(field.size()) +
                      " values, grid has " + std::to_string(patch.size()));
  }
  const auto w = patch.parameter_weights();
  double acc = 0.0;
  for (std::size_t j = 0; j < field.size(); ++j) acc += w[j] * field[j] * geom.area_density[j];
  return acc;
}

double surface_integral(const GraphPatch& patch, std::span<const double> field) {
  return surface_integral(patch, build_geometry(patch), field);
}

double area(const GraphPatch& patch, const GeometryFields& geom) {
  const auto w = patch.parameter_weights();
  double acc = 0.0;
  for (std::size_t j = 0; j < patch.size(); ++j) acc += w[j] * geom.area_density[j];
  return acc;
}

double mixed_volume(const GraphPatch& patch, const GeometryFields& geom, int k) {
  const int n = patch.dim();
  if (k < 0 || k > n) {
    throw DomainError("mixed_volume: k=" + std::to_string(k) + " outside {0..n}");
  }
  if (k == 0) {
    const auto w = patch.parameter_weights();
    double acc = 0.0;
    for (std::size_t j = 0; j < patch.size(); ++j) {
      acc += w[j] * radial_volume_integral(patch.params(), patch.u(j));
    }
    return acc;
  }
  std::vector<double> field(patch.size());
  for (std::size_t j = 0; j < patch.size(); ++j) {
    field[j] = elementary_symmetric_all(geom.kappa(j))[static_cast<std::size_t>(k - 1)];
  }
  return surface_integral(patch, geom, field) / binomial(n, k - 1);
}

double mixed_volume(const GraphPatch& patch, int k) {
  return mixed_volume(patch, build_geometry(patch), k);
}

std::vector<double> all_mixed_volumes(const GraphPatch& patch, const GeometryFields& geom) {
  std::vector<double> out;
  for (int k = 0; k <= patch.dim(); ++k) out.push_back(mixed_volume(patch, geom, k));
  return out;
}

// ---------------------------------------------------------------------------
// interpolation

GraphInterpolant::GraphInterpolant(const GraphPatch& patch) : backend_(patch.backend()) {
  const auto u = patch.u();
  const std::size_t N = u.size();
  const double invN = 1.0 / static_cast<double>(N);
  if (backend_ == Backend::FullCircle) {
    const std::size_t half = N / 2;
    cos_coef_.assign(half + 1, 0.0);
    sin_coef_.assign(half + 1, 0.0);
    for (std::size_t m = 0; m <= half; ++m) {
      double c = 0.0, s = 0.0;
      for (std::size_t j = 0; j < N; ++j) {
        const double t = patch.theta(j) * static_cast<double>(m);
        c += u[j] * std::cos(t);
        s += u[j] * std::sin(t);
      }
      const bool edge = (m == 0) || (N % 2 == 0 && m == half);
      cos_coef_[m] = (edge ? 1.0 : 2.0) * c * invN;
      sin_coef_[m] = edge ? 0.0 : 2.0 * s * invN;
    }
  } else {
    // DCT-II of the even extension; exact at the staggered nodes
    cos_coef_.assign(N, 0.0);
    for (std::size_t m = 0; m < N; ++m) {
      double c = 0.0;
      for (std::size_t j = 0; j < N; ++j) c += u[j] * std::cos(static_cast<double>(m) * patch.theta(j));
      cos_coef_[m] = (m == 0 ? 1.0 : 2.0) * c * invN;
    }
  }
}

double GraphInterpolant::operator()(double theta) const {
  // Chebyshev-style recurrence for cos(m t), sin(m t)
  const double c1 = std::cos(theta), s1 = std::sin(theta);
  double cm = 1.0, sm = 0.0;
  double acc = 0.0;
  for (std::size_t m = 0; m < cos_coef_.size(); ++m) {
    acc += cos_coef_[m] * cm;
    if (!sin_coef_.empty()) acc += sin_coef_[m] * sm;
    const double next_c = cm * c1 - sm * s1;
    sm = sm * c1 + cm * s1;
    cm = next_c;
  }
  return acc;
}

// ---------------------------------------------------------------------------
// recentering

namespace {

void validate_shift(const GraphPatch& patch, CenterShift& shift) {
  if (!std::isfinite(shift.distance) || !std::isfinite(shift.direction)) {
    throw RecenteringError("recenter: non-finite displacement");
  }
  if (patch.backend() == Backend::Axisymmetric) {
    const double c = std::cos(shift.direction);
    if (std::abs(std::abs(c) - 1.0) > 1e-12) {
      throw RecenteringError("recenter: axisymmetric patches move along the axis only");
    }
    shift.distance *= c;
    shift.direction = 0.0;
  }
  if (shift.distance < 0.0) {
    shift.distance = -shift.distance;
    shift.direction += pi;
  }
}

}  // namespace

GraphPatch recenter(const GraphPatch& patch, const CenterShift& requested) {
  CenterShift shift = requested;
  validate_shift(patch, shift);
  const double a = patch.params().a;
  const GraphInterpolant interp(patch);
  const detail::Translation move(a, shift.distance, shift.direction);
  const bool axisym = patch.backend() == Backend::Axisymmetric;
  const double umax = *std::max_element(patch.u().begin(), patch.u().end());

  auto residual = [&](double s, double theta) {
    const auto p = detail::to_polar(a, move.apply(detail::polar_point(a, s, theta)));
    const double beta = axisym ? std::abs(p.beta) : p.beta;
    return p.rho - interp(beta);
  };

  if (residual(0.0, 0.0) >= 0.0) {
    throw RecenteringError("recenter: new center is not inside the enclosed region");
  }

  const double s_hi = umax + shift.distance + 0.1 / a;
  constexpr int kScan = 48;
  std::vector<double> out(patch.size());
  for (std::size_t j = 0; j < patch.size(); ++j) {
    const double theta = patch.theta(j);
    double lo = 0.0, hi = s_hi;
    double prev = residual(0.0, theta);
    int crossings = 0;
    for (int i = 1; i <= kScan; ++i) {
      const double s = s_hi * i / kScan;
      const double r = residual(s, theta);
      if ((prev < 0.0) != (r < 0.0)) {
        ++crossings;
        if (crossings == 1) {
          lo = s_hi * (i - 1) / kScan;
          hi = s;
        }
      }
      prev = r;
    }
    if (crossings != 1) {
      std::ostringstream os;
      os << "recenter: ray " << j << " meets the hypersurface " << crossings
         << " times; graph is not star-shaped about the new center";
      throw RecenteringError(os.str());
    }
    std::uintmax_t iters = 200;
    auto f = [&](double s) { return residual(s, theta); };
    const auto bracket = boost::math::tools::toms748_solve(
        f, lo, hi, [](double x, double y) { return std::abs(x - y) <= 1e-13 * std::max(1.0, x); },
        iters);
    out[j] = 0.5 * (bracket.first + bracket.second);
  }
  return patch.with_values(std::move(out));
}

CenterShift estimate_inball_center(const GraphPatch& patch) {
  const double a = patch.params().a;
  const GraphInterpolant interp(patch);
  const std::size_t samples = 4 * patch.size();

  // dense boundary sample in the meridian plane
  std::vector<detail::LPoint> boundary;
  boundary.reserve(samples + 2);
  const bool axisym = patch.backend() == Backend::Axisymmetric;
  const double span = axisym ? pi : 2.0 * pi;
  for (std::size_t i = 0; i <= samples; ++i) {
    if (!axisym && i == samples) break;
    const double t = span * static_cast<double>(i) / static_cast<double>(samples);
    boundary.push_back(detail::polar_point(a, interp(t), t));
  }

  auto depth = [&](double x, double y) {
    const double d = std::hypot(x, y);
    const detail::LPoint c = detail::polar_point(a, d, std::atan2(y, x));
    double best = std::numeric_limits<double>::infinity();
    for (const auto& b : boundary) best = std::min(best, detail::distance(a, c, b));
    return best;
  };

  const double umin = *std::min_element(patch.u().begin(), patch.u().end());

  if (axisym) {
    // golden-section search along the axis
    double lo = -interp(pi), hi = interp(0.0);
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
    double f1 = depth(x1, 0.0), f2 = depth(x2, 0.0);
    while (hi - lo > 1e-9) {
      if (f1 < f2) {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + g * (hi - lo);
        f2 = depth(x2, 0.0);
      } else {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - g * (hi - lo);
        f1 = depth(x1, 0.0);
      }
    }
    const double z = 0.5 * (lo + hi);
    return {z, 0.0};
  }

  // start at the normalized Lorentzian barycenter of the boundary
  detail::LPoint sum{0.0, 0.0, 0.0};
  for (const auto& b : boundary) {
    sum.x0 += b.x0;
    sum.x1 += b.x1;
    sum.x2 += b.x2;
  }
  const double norm = std::sqrt(-detail::lorentz_dot(sum, sum)) * a;
  const auto start = detail::to_polar(
      a, detail::LPoint{sum.x0 / norm, sum.x1 / norm, sum.x2 / norm});
  double x = start.rho * std::cos(start.beta);
  double y = start.rho * std::sin(start.beta);
  double best = depth(x, y);
  // compass search
  for (double step = 0.25 * umin; step > 1e-9; step *= 0.5) {
    bool improved = true;
    while (improved) {
      improved = false;
      for (auto [dx, dy] : {std::pair{1.0, 0.0}, {-1.0, 0.0}, {0.0, 1.0}, {0.0, -1.0}}) {
        const double val = depth(x + step * dx, y + step * dy);
        if (val > best) {
          best = val;
          x += step * dx;
          y += step * dy;
          improved = true;
        }
      }
    }
  }
  return {std::hypot(x, y), std::atan2(y, x)};
}

// ---------------------------------------------------------------------------
// snapshot files

std::string format_snapshot(const GraphPatch& patch, double t) {
  std::string out = to_string(patch.backend()) + " " + std::to_string(patch.size()) + " " +
                    std::to_string(patch.dim()) + " " + format_double(patch.params().a) + " " +
                    format_double(t) + "\n";
  for (std::size_t j = 0; j < patch.size(); ++j) {
    out += format_double(patch.theta(j));
    out += ' ';
    out += format_double(patch.u(j));
    out += '\n';
  }
  return out;
}

Snapshot parse_snapshot(const std::string& text) {
  std::istringstream in(text);
  in.imbue(std::locale::classic());
  std::string backend_name;
  std::size_t N = 0;
  int n = 0;
  double a = 0.0, t = 0.0;
  if (!(in >> backend_name >> N >> n >> a >> t)) {
    throw DomainError("snapshot: malformed header (expected: backend N n a t)");
  }
  const Backend backend = backend_from_string(backend_name);
  std::vector<double> u(N), theta(N);
  for (std::size_t j = 0; j < N; ++j) {
    if (!(in >> theta[j] >> u[j])) {
      throw DomainError("snapshot: expected " + std::to_string(N) + " rows, got " +
                        std::to_string(j));
    }
  }
  GraphPatch patch(backend, AmbientParams(a, n), std::move(u));
  for (std::size_t j = 0; j < N; ++j) {
    if (std::abs(theta[j] - patch.theta(j)) > 1e-9) {
      throw DomainError("snapshot: row " + std::to_string(j) +
                        " does not lie on the uniform grid of the declared backend");
    }
  }
  return {std::move(patch), t};
}

void write_snapshot(const std::string& path, const GraphPatch& patch, double t) {
  write_file_atomic(path, format_snapshot(patch, t));
}

Snapshot read_snapshot(const std::string& path) { return parse_snapshot(read_file(path)); }

}  // namespace hflow
