#include "hflow/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hflow/errors.hpp"
#include "hflow/io.hpp"

namespace hflow {

DiagnosticsRecord snapshot(const FlowState& state, const CurvatureSpec& spec) {
  const auto& g = state.geometry;
  const double a = state.patch.params().a;
  const int n = state.patch.dim();
  const double nd = static_cast<double>(n);

  DiagnosticsRecord r;
  r.t = state.t;
  r.step = state.step;
  r.all_mixed_volumes = all_mixed_volumes(state.patch, g);
  r.V_k_tracked = r.all_mixed_volumes[static_cast<std::size_t>(state.k)];
  r.area = area(state.patch, g);
  r.f = state.f;
  r.recenter_count = state.recenter_count;

  constexpr double inf = std::numeric_limits<double>::infinity();
  r.hconv_margin = inf;
  r.pinch_ratio = inf;
  r.umbilic_max = -inf;
  r.sup_F = -inf;
  r.inf_F_minus = inf;
  r.sup_abs_F_minus_f = 0.0;
  r.chi_max = -inf;
  double dmax = 0.0, dmin = inf;
  for (std::size_t j = 0; j < g.N; ++j) {
    const double kmin = g.min_curvature(j);
    const double H = g.mean_curvature(j);
    // |A|^2 - H^2/n as a sum of squared deviations, which stays accurate near umbilic points
    double umb = 0.0;
    for (double kap : g.kappa(j)) umb += (kap - H / nd) * (kap - H / nd);

    r.hconv_margin = std::min(r.hconv_margin, kmin - a);
    const double excess = H - nd * a;
    const double pinch = std::abs(excess) < 1e-12 ? 1.0 / nd : (kmin - a) / excess;
    r.pinch_ratio = std::min(r.pinch_ratio, pinch);
    r.umbilic_max = std::max(r.umbilic_max, umb);
    r.sup_F = std::max(r.sup_F, state.F[j]);
    r.inf_F_minus = std::min(r.inf_F_minus, state.F[j] - (a - spec.alpha()));
    r.sup_abs_F_minus_f = std::max(r.sup_abs_F_minus_f, std::abs(state.F[j] - state.f));
    r.chi_max = std::max(r.chi_max, g.chi[j]);
    dmax = std::max(dmax, state.dF_max[j]);
    dmin = std::min(dmin, state.dF_min[j]);
  }
  const auto [lo, hi] = std::minmax_element(state.patch.u().begin(), state.patch.u().end());
  r.min_u = *lo;
  r.max_u = *hi;
  r.parabolicity_cond = dmax / dmin;
  return r;
}

// ---------------------------------------------------------------------------
// CSV

std::string csv_header(int n) {
  std::string h = "t,step,V_k_tracked";
  for (int j = 0; j <= n; ++j) h += ",mixed_volume_k" + std::to_string(j);
  h +=
      ",area,hconv_margin,pinch_ratio,umbilic_max,sup_F,inf_F_minus,f,sup_abs_F_minus_f,"
      "min_u,max_u,chi_max,parabolicity_cond,recenter_count";
  return h;
}

std::string csv_row(const DiagnosticsRecord& r) {
  std::string row = format_double(r.t) + "," + std::to_string(r.step) + "," +
                    format_double(r.V_k_tracked);
  for (double v : r.all_mixed_volumes) row += "," + format_double(v);
  for (double v : {r.area, r.hconv_margin, r.pinch_ratio, r.umbilic_max, r.sup_F, r.inf_F_minus,
                   r.f, r.sup_abs_F_minus_f, r.min_u, r.max_u, r.chi_max, r.parabolicity_cond}) {
    row += "," + format_double(v);
  }
  row += "," + std::to_string(r.recenter_count);
  return row;
}

std::string format_csv(std::span<const DiagnosticsRecord> records, int n) {
  std::string out = csv_header(n) + "\n";
  for (const auto& r : records) out += csv_row(r) + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// decay fits

DecayFit fit_decay(std::span<const std::pair<double, double>> series, double tail_fraction) {
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) {
    throw FitError("fit_decay: tail fraction must be in (0, 1]");
  }
  const std::size_t total = series.size();
  const auto count = static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(total)));
  if (count < 10) {
    throw FitError("fit_decay: need at least 10 tail points, have " + std::to_string(count));
  }
  const auto tail = series.subspan(total - count);
  double st = 0.0, sy = 0.0;
  for (const auto& [t, y] : tail) {
    if (!(y > 0.0) || !std::isfinite(y)) {
      std::ostringstream os;
      os << "fit_decay: non-positive sample y = " << y << " at t = " << t;
      throw FitError(os.str());
    }
    st += t;
    sy += std::log(y);
  }
  const double m = static_cast<double>(count);
  const double tbar = st / m, ybar = sy / m;
  double stt = 0.0, sty = 0.0, syy = 0.0;
  for (const auto& [t, y] : tail) {
    const double dt = t - tbar, dy = std::log(y) - ybar;
    stt += dt * dt;
    sty += dt * dy;
    syy += dy * dy;
  }
  if (!(stt > 0.0)) throw FitError("fit_decay: tail has no time spread");
  const double slope = sty / stt;
  const double intercept = ybar - slope * tbar;
  double ss_res = 0.0;
  for (const auto& [t, y] : tail) {
    const double e = std::log(y) - (intercept + slope * t);
    ss_res += e * e;
  }
  DecayFit fit;
  fit.amplitude = std::exp(intercept);
  fit.rate = -slope;
  fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 0.0;
  fit.points = count;
  return fit;
}

std::size_t decay_onset(std::span<const DiagnosticsRecord> records) {
  if (records.empty()) return 0;
  const double threshold = 0.1 * records.front().sup_abs_F_minus_f;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].sup_abs_F_minus_f < threshold) return i;
  }
  return records.size();
}

// ---------------------------------------------------------------------------
// radius gap

RadiusGap check_radius_gap(const GraphPatch& patch) {
  const double a = patch.params().a;
  const CenterShift center = estimate_inball_center(patch);
  const GraphPatch centered = recenter(patch, center);
  const auto [lo, hi] = std::minmax_element(centered.u().begin(), centered.u().end());
  RadiusGap out;
  out.gap = *hi - *lo;
  out.bound = a * std::log(2.0);
  out.pass = out.gap < out.bound + 1e-6;
  out.tau = std::tanh(0.5 * a * *lo);
  const double st = std::sqrt(out.tau);
  out.sharper_bound = a * std::log((1.0 + st) * (1.0 + st) / (1.0 + out.tau));
  out.center = center;
  return out;
}

// ---------------------------------------------------------------------------
// isoperimetric consequence

std::string IsoperimetricReport::format() const {
  std::ostringstream os;
  os.precision(10);
  os << "area non-increasing: " << (area_monotone ? "yes" : "no")
     << " (max relative increase " << max_area_increase << ", tolerance " << monotone_tolerance
     << ")\n";
  os << "V/|M| initial: " << initial_ratio << "\n";
  os << "V/|M| final:   " << final_ratio << "\n";
  os << "ball ratio:    " << ball_ratio << " (R0 = " << ball_radius << ")\n";
  os << "final vs ball relative error: " << final_ratio_error << "\n";
  os << "inequality V(M0)/|M0| <= V(B)/|B|: " << (inequality_holds ? "holds" : "VIOLATED")
     << (strict ? " (strict)" : "") << "\n";
  return os.str();
}

IsoperimetricReport isoperimetric_report(std::span<const FlowState> states,
                                         const CurvatureSpec& spec) {
  if (states.empty()) throw DomainError("isoperimetric_report: empty trajectory");
  if (spec.family() != Family::MeanH || states.front().k != 0) {
    throw DomainError("isoperimetric_report: needs a k = 0 trajectory of the MeanH flow");
  }
  const AmbientParams& p = states.front().patch.params();
  IsoperimetricReport rep;
  std::vector<double> areas;
  double dt_max = 0.0;
  for (const auto& s : states) {
    areas.push_back(area(s.patch, s.geometry));
    dt_max = std::max(dt_max, s.last_dt);
  }
  rep.monotone_tolerance = 1e-3 * dt_max;
  rep.max_area_increase = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < areas.size(); ++i) {
    rep.max_area_increase = std::max(rep.max_area_increase, (areas[i] - areas[i - 1]) / areas[0]);
  }
  if (areas.size() < 2) rep.max_area_increase = 0.0;
  rep.area_monotone = rep.max_area_increase <= rep.monotone_tolerance;

  const double v0 = mixed_volume(states.front().patch, states.front().geometry, 0);
  const double v1 = mixed_volume(states.back().patch, states.back().geometry, 0);
  rep.initial_ratio = v0 / areas.front();
  rep.final_ratio = v1 / areas.back();
  rep.ball_radius = ball_radius_for_mixed_volume(p, v0, 0);
  rep.ball_ratio = ball_mixed_volume(p, rep.ball_radius, 0) / ball_mixed_volume(p, rep.ball_radius, 1);
  rep.final_ratio_error = std::abs(rep.final_ratio - rep.ball_ratio) / rep.ball_ratio;
  rep.inequality_holds = rep.initial_ratio <= rep.ball_ratio * (1.0 + 1e-9);
  rep.strict = rep.initial_ratio < rep.ball_ratio * (1.0 - 1e-9);
  return rep;
}

// ---------------------------------------------------------------------------
// area-density evolution

double check_evolution_identity(const FlowState& before, const FlowState& after, double dt) {
  const GraphPatch& patch = before.patch;
  if (after.patch.size() != patch.size() || after.patch.backend() != patch.backend()) {
    throw DomainError("check_evolution_identity: states live on different grids");
  }
  if (!(dt > 0.0)) throw DomainError("check_evolution_identity: dt must be positive");
  const auto& g = before.geometry;
  const std::size_t N = patch.size();
  const int n = patch.dim();
  const bool axisym = patch.backend() == Backend::Axisymmetric;
  const auto rhs_u = flow_rhs(before);

  // flux of the tangential part of the graph velocity: rho * T^theta
  std::vector<double> q(N);
  for (std::size_t j = 0; j < N; ++j) {
    q[j] = g.area_density[j] * rhs_u[j] * g.du[j] / g.g_tt[j];
  }
  const std::ptrdiff_t NN = static_cast<std::ptrdiff_t>(N);
  auto at = [&](std::ptrdiff_t i) {
    if (!axisym) return q[static_cast<std::size_t>(((i % NN) + NN) % NN)];
    // q is odd across the poles
    if (i < 0) return -q[static_cast<std::size_t>(-i - 1)];
    if (i >= NN) return -q[static_cast<std::size_t>(2 * NN - 1 - i)];
    return q[static_cast<std::size_t>(i)];
  };
  const double h = patch.spacing();

  double worst = 0.0, rhs_scale = 0.0, rho_scale = 0.0;
  for (std::ptrdiff_t j = 0; j < NN; ++j) {
    const auto jj = static_cast<std::size_t>(j);
    const double dq = (at(j - 2) - 8.0 * at(j - 1) + 8.0 * at(j + 1) - at(j + 2)) / (12.0 * h);
    double divergence = dq;
    if (axisym && n > 1) {
      const double t = patch.theta(jj);
      divergence += (n - 1) * std::cos(t) / std::sin(t) * q[jj];
    }
    const double normal = -(before.F[jj] - before.f) * g.mean_curvature(jj) * g.area_density[jj];
    const double rhs = normal + divergence;
    const double lhs = (after.geometry.area_density[jj] - g.area_density[jj]) / dt;
    worst = std::max(worst, std::abs(lhs - rhs));
    rhs_scale = std::max(rhs_scale, std::abs(rhs));
    rho_scale = std::max(rho_scale, g.area_density[jj]);
  }
  const double denom = rhs_scale > 1e-9 * rho_scale ? rhs_scale : rho_scale;
  return worst / denom;
}

}  // namespace hflow
