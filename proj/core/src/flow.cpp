#include "hflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "hflow/errors.hpp"

namespace hflow {

std::string to_string(InitialShape shape) {
  switch (shape) {
    case InitialShape::Sphere: return "sphere";
    case InitialShape::Cosine: return "cosine";
    case InitialShape::DisplacedSphere: return "displaced_sphere";
    case InitialShape::Random: return "random";
  }
  return "?";
}

InitialShape initial_shape_from_string(const std::string& name) {
  for (auto s : {InitialShape::Sphere, InitialShape::Cosine, InitialShape::DisplacedSphere,
                 InitialShape::Random}) {
    if (to_string(s) == name) return s;
  }
  throw DomainError("unknown initial shape '" + name + "'");
}

GraphPatch make_initial_patch(const AmbientParams& ambient, const InitialPatch& init) {
  const double a = ambient.a;
  switch (init.kind) {
    case InitialShape::Sphere:
      return GraphPatch::sphere(init.backend, ambient, init.N, init.radius);
    case InitialShape::Cosine:
      return GraphPatch::sample(init.backend, ambient, init.N, [&](double t) {
        return init.radius + init.amp * std::cos(init.mode * t);
      });
    case InitialShape::DisplacedSphere: {
      if (!(std::abs(init.amp) < init.radius)) {
        throw DomainError("displaced sphere: center offset must be smaller than the radius");
      }
      // cosh(aR) = cosh(ad) cosh(au) - sinh(ad) sinh(au) cos(theta)
      const double A = std::cosh(a * init.amp);
      const double target = std::cosh(a * init.radius);
      return GraphPatch::sample(init.backend, ambient, init.N, [&](double t) {
        const double B = std::sinh(a * init.amp) * std::cos(t);
        const double scale = std::sqrt(A * A - B * B);
        return (std::atanh(B / A) + std::acosh(target / scale)) / a;
      });
    }
    case InitialShape::Random: {
      std::mt19937_64 rng(init.seed);
      std::uniform_real_distribution<double> coef(-1.0, 1.0);
      const bool axisym = init.backend == Backend::Axisymmetric;
      std::vector<double> c, s;
      double total = 0.0;
      for (int m = 2; m <= std::max(2, init.mode); ++m) {
        c.push_back(coef(rng));
        s.push_back(axisym ? 0.0 : coef(rng));
        total += std::abs(c.back()) + std::abs(s.back());
      }
      return GraphPatch::sample(init.backend, ambient, init.N, [&](double t) {
        double acc = 0.0;
        for (std::size_t i = 0; i < c.size(); ++i) {
          const double m = static_cast<double>(i + 2);
          acc += c[i] * std::cos(m * t) + s[i] * std::sin(m * t);
        }
        return init.radius + init.amp * acc / total;
      });
    }
  }
  throw DomainError("make_initial_patch: bad shape");
}

void validate(const FlowConfig& c) {
  if (!(c.cfl_safety > 0.0 && c.cfl_safety < 1.0)) throw DomainError("cfl_safety must be in (0,1)");
  if (c.k < 0 || c.k > c.ambient.n) throw DomainError("k must be in {0..n}");
  if (c.curvature.n() != c.ambient.n) throw DomainError("curvature function dimension != n");
  if (c.initial.backend == Backend::FullCircle && c.ambient.n != 1) {
    throw DomainError("FullCircle backend requires n = 1");
  }
  if (!(c.initial.radius > 0.0)) throw DomainError("initial radius must be positive");
  if (c.output_every == 0) throw DomainError("output_every must be positive");
  if (!(c.t_max > 0.0)) throw DomainError("t_max must be positive");
  if (!(c.tol_converged > 0.0)) throw DomainError("tol_converged must be positive");
  if (!(c.max_gradient_before_recenter > 0.0)) throw DomainError("recenter.max_grad must be positive");
  if (!(c.min_u_before_recenter >= 0.0)) throw DomainError("recenter.min_u must be nonnegative");
}

// ---------------------------------------------------------------------------

std::vector<double> global_weight(const GeometryFields& geom, double a, int k) {
  const int n = geom.n;
  if (k < 0 || k > n) throw DomainError("global_weight: k outside {0..n}");
  std::vector<double> w(geom.N);
  for (std::size_t j = 0; j < geom.N; ++j) {
    const auto e = elementary_symmetric_all(geom.kappa(j));
    if (k <= 1) {
      w[j] = e[static_cast<std::size_t>(k)];
    } else {
      w[j] = k * e[static_cast<std::size_t>(k)] +
             a * a * (n - k + 2) * e[static_cast<std::size_t>(k - 2)];
    }
  }
  return w;
}

double global_term(const GraphPatch& patch, const GeometryFields& geom,
                   std::span<const double> F, int k) {
  const auto w = global_weight(geom, patch.params().a, k);
  std::vector<double> wF(w.size());
  for (std::size_t j = 0; j < w.size(); ++j) wF[j] = w[j] * F[j];
  const double denom = surface_integral(patch, geom, w);
  if (!(denom > 0.0)) {
    throw AdmissibilityError("global term: weight integral is not positive", -1, -1);
  }
  return surface_integral(patch, geom, wF) / denom;
}

double global_term(const FlowState& state, int k) {
  return global_term(state.patch, state.geometry, state.F, k);
}

namespace {

FlowState evaluate(const GraphPatch& patch, const CurvatureSpec& spec, int k, double t) {
  if (spec.n() != patch.dim()) throw DomainError("make_state: curvature function dimension != n");
  const std::size_t N = patch.size();
  FlowState s{t, patch, build_geometry(patch), std::vector<double>(N), std::vector<double>(N),
              std::vector<double>(N)};
  std::vector<double> grad(static_cast<std::size_t>(patch.dim()));
  for (std::size_t j = 0; j < N; ++j) {
    try {
      s.F[j] = eval_F_and_grad(spec, s.geometry.kappa(j), grad);
    } catch (const AdmissibilityError& e) {
      std::ostringstream os;
      os << "node " << j << " (theta = " << patch.theta(j) << "): " << e.what();
      throw AdmissibilityError(os.str(), static_cast<std::ptrdiff_t>(j), e.component());
    }
    const auto [lo, hi] = std::minmax_element(grad.begin(), grad.end());
    s.dF_min[j] = *lo;
    s.dF_max[j] = *hi;
  }
  s.k = k;
  s.f = global_term(s, k);
  return s;
}

}  // namespace

FlowState make_state(const GraphPatch& patch, const CurvatureSpec& spec, int k, double t) {
  FlowState s = evaluate(patch, spec, k, t);
  s.preserved_target = mixed_volume(patch, s.geometry, k);
  return s;
}

std::vector<double> flow_rhs(const FlowState& state) {
  std::vector<double> rhs(state.F.size());
  for (std::size_t j = 0; j < rhs.size(); ++j) {
    rhs[j] = -state.geometry.v[j] * (state.F[j] - state.f);
  }
  return rhs;
}

double stable_time_step(const FlowState& state, double cfl_safety) {
  const double dtheta = state.patch.spacing();
  double min_ds = std::numeric_limits<double>::infinity();
  double lambda = 0.0;
  for (std::size_t j = 0; j < state.F.size(); ++j) {
    min_ds = std::min(min_ds, std::sqrt(state.geometry.g_tt[j]) * dtheta);
    lambda = std::max(lambda, state.dF_max[j]);
  }
  return cfl_safety * min_ds * min_ds / (state.patch.dim() * lambda);
}

namespace {

std::vector<double> axpy(std::span<const double> u, double h, std::span<const double> k) {
  std::vector<double> out(u.size());
  for (std::size_t j = 0; j < u.size(); ++j) out[j] = u[j] + h * k[j];
  return out;
}

// Keeps V_{n+1-k} at its target by a uniform normal offset delta * v_j.
FlowState project_volume(FlowState s, const CurvatureSpec& spec) {
  const double target = s.preserved_target;
  const auto base = s.patch.u();
  const auto& v = s.geometry.v;
  auto volume_at = [&](double delta) {
    std::vector<double> u(base.begin(), base.end());
    for (std::size_t j = 0; j < u.size(); ++j) u[j] += delta * v[j];
    return mixed_volume(s.patch.with_values(std::move(u)), s.k) - target;
  };
  double d0 = 0.0, r0 = volume_at(d0);
  double d1 = 1e-9, r1 = volume_at(d1);
  for (int it = 0; it < 8 && std::abs(r1) > 1e-15 * std::abs(target) && r1 != r0; ++it) {
    const double d2 = d1 - r1 * (d1 - d0) / (r1 - r0);
    d0 = d1;
    r0 = r1;
    d1 = d2;
    r1 = volume_at(d1);
  }
  std::vector<double> u(base.begin(), base.end());
  for (std::size_t j = 0; j < u.size(); ++j) u[j] += d1 * v[j];
  FlowState out = evaluate(s.patch.with_values(std::move(u)), spec, s.k, s.t);
  out.preserved_target = target;
  out.step = s.step;
  out.recenter_count = s.recenter_count;
  out.last_dt = s.last_dt;
  return out;
}

}  // namespace

FlowState advance_with_dt(const FlowState& state, const CurvatureSpec& spec, double dt) {
  const auto u0 = state.patch.u();
  const int k = state.k;
  auto stage = [&](std::span<const double> u) {
    return flow_rhs(evaluate(state.patch.with_values({u.begin(), u.end()}), spec, k, state.t));
  };
  const auto k1 = flow_rhs(state);
  const auto k2 = stage(axpy(u0, 0.5 * dt, k1));
  const auto k3 = stage(axpy(u0, 0.5 * dt, k2));
  const auto k4 = stage(axpy(u0, dt, k3));
  std::vector<double> u(u0.size());
  for (std::size_t j = 0; j < u.size(); ++j) {
    u[j] = u0[j] + dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
  }
  FlowState next = evaluate(state.patch.with_values(std::move(u)), spec, k, state.t + dt);
  next.preserved_target = state.preserved_target;
  next.step = state.step + 1;
  next.recenter_count = state.recenter_count;
  next.last_dt = dt;
  return next;
}

bool needs_recenter(const FlowState& state, const FlowConfig& config) {
  const auto& g = state.geometry;
  const double max_grad = *std::max_element(g.grad_norm.begin(), g.grad_norm.end());
  const double min_u = *std::min_element(state.patch.u().begin(), state.patch.u().end());
  return max_grad > config.max_gradient_before_recenter || min_u < config.min_u_before_recenter;
}

FlowState recenter_state(const FlowState& state, const CurvatureSpec& spec) {
  const CenterShift center = estimate_inball_center(state.patch);
  FlowState out = evaluate(recenter(state.patch, center), spec, state.k, state.t);
  out.preserved_target = state.preserved_target;
  out.step = state.step;
  out.recenter_count = state.recenter_count + 1;
  out.last_dt = state.last_dt;
  return out;
}

FlowState advance(const FlowState& state, const FlowConfig& config) {
  double dt = config.fixed_dt > 0.0 ? config.fixed_dt
                                    : stable_time_step(state, config.cfl_safety);
  constexpr int kMaxHalvings = 20;
  std::string last_error;
  for (int attempt = 0; attempt <= kMaxHalvings; ++attempt) {
    try {
      FlowState next = advance_with_dt(state, config.curvature, dt);
      if (config.volume_correction) next = project_volume(std::move(next), config.curvature);
      if (needs_recenter(next, config)) next = recenter_state(next, config.curvature);
      return next;
    } catch (const AdmissibilityError& e) {
      last_error = e.what();
    } catch (const GeometryDegeneracyError& e) {
      last_error = e.what();
    }
    dt *= 0.5;
  }
  std::ostringstream os;
  os << "step rejected at t = " << state.t << " after " << kMaxHalvings
     << " halvings: " << last_error;
  throw StepRejected(os.str());
}

}  // namespace hflow
