#include "hflow/run.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hflow/errors.hpp"

namespace hflow {

namespace {

double pinch_deviation(const DiagnosticsRecord& r, int n) {
  return std::abs(r.pinch_ratio - 1.0 / static_cast<double>(n));
}

bool has_converged(const DiagnosticsRecord& r, int n, double tol) {
  return r.sup_abs_F_minus_f < tol && pinch_deviation(r, n) < 1e-6;
}

std::optional<DecayFit> try_fit(const std::vector<std::pair<double, double>>& series,
                                 const std::string& name, std::vector<std::string>& notes) {
  try {
    return fit_decay(series, 0.5);
  } catch (const FitError& e) {
    notes.push_back(name + ": " + e.what());
    return std::nullopt;
  }
}

}  // namespace

void fit_trajectory(const std::vector<DiagnosticsRecord>& records, int n, RunSummary& summary) {
  const std::size_t onset = decay_onset(records);
  std::vector<std::pair<double, double>> fmf, pinch, umb;
  for (std::size_t i = onset; i < records.size(); ++i) {
    const auto& r = records[i];
    fmf.emplace_back(r.t, r.sup_abs_F_minus_f);
    pinch.emplace_back(r.t, 1.0 / static_cast<double>(n) - r.pinch_ratio);
    umb.emplace_back(r.t, r.umbilic_max);
  }
  summary.fit_notes.clear();
  summary.fit_F_minus_f = try_fit(fmf, "sup|F-f|", summary.fit_notes);
  if (n > 1) {
    summary.fit_pinch = try_fit(pinch, "1/n - pinch_ratio", summary.fit_notes);
    summary.fit_umbilic = try_fit(umb, "|A|^2 - H^2/n", summary.fit_notes);
  } else {
    summary.fit_notes.push_back("pinching and umbilicity fits skipped: curves are umbilic");
  }
}

RunResult run_flow(const FlowConfig& config, const RunOptions& options) {
  validate(config);
  const CurvatureSpec& spec = config.curvature;
  const AmbientParams& p = config.ambient;
  const int n = p.n;

  Trajectory traj;
  GraphPatch initial = make_initial_patch(p, config.initial);

  FlowState state = [&] {
    try {
      return make_state(initial, spec, config.k);
    } catch (const AdmissibilityError& e) {
      throw RunAborted(std::string("initial data not admissible: ") + e.what(), Trajectory{});
    }
  }();

  const double margin0 = [&] {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < state.geometry.N; ++j) {
      m = std::min(m, state.geometry.min_curvature(j) - p.a);
    }
    return m;
  }();
  if (!(margin0 > 0.0)) {
    std::ostringstream os;
    os << "initial patch is not strictly h-convex (min kappa - a = " << margin0 << ")";
    throw RunAborted(os.str(), std::move(traj));
  }

  auto emit = [&](const FlowState& s, const DiagnosticsRecord& rec) {
    traj.records.push_back(rec);
    if (options.keep_states) traj.states.push_back(s);
    if (options.observer) options.observer(s, rec);
  };

  RunSummary summary;
  summary.preserved_initial = state.preserved_target;

  DiagnosticsRecord rec = snapshot(state, spec);
  emit(state, rec);
  bool last_emitted = true;

  while (true) {
    if (has_converged(rec, n, config.tol_converged)) {
      summary.converged = true;
      summary.stop_reason = "converged";
      break;
    }
    if (state.t >= config.t_max) {
      summary.stop_reason = "t_max";
      break;
    }
    if (state.step >= config.max_steps) {
      summary.stop_reason = "max_steps";
      break;
    }
    try {
      state = advance(state, config);
    } catch (const StepRejected& e) {
      throw RunAborted(e.what(), std::move(traj));
    } catch (const GeometryDegeneracyError& e) {
      throw RunAborted(e.what(), std::move(traj));
    } catch (const RecenteringError& e) {
      throw RunAborted(e.what(), std::move(traj));
    }
    rec = snapshot(state, spec);
    last_emitted = false;
    if (!std::isfinite(rec.sup_abs_F_minus_f) || !(rec.min_u > 0.0)) {
      emit(state, rec);
      throw RunAborted("non-finite diagnostics at t = " + std::to_string(state.t), std::move(traj));
    }
    if (state.step % config.output_every == 0) {
      emit(state, rec);
      last_emitted = true;
    }
  }
  if (!last_emitted) emit(state, rec);

  summary.t_final = state.t;
  summary.steps = state.step;
  summary.recenters = state.recenter_count;
  summary.preserved_final = mixed_volume(state.patch, state.geometry, config.k);
  summary.drift =
      std::abs(summary.preserved_final - summary.preserved_initial) / summary.preserved_initial;
  summary.r0_oracle = ball_radius_for_mixed_volume(p, summary.preserved_initial, config.k);

  const RadiusGap gap = check_radius_gap(state.patch);
  const GraphPatch centered = recenter(state.patch, gap.center);
  double sum = 0.0, dev = 0.0;
  for (double u : centered.u()) {
    sum += u;
    dev = std::max(dev, std::abs(u - summary.r0_oracle));
  }
  summary.r0_estimate = sum / static_cast<double>(centered.size());
  summary.max_u_deviation = dev;
  summary.radius_gap = gap.gap;

  fit_trajectory(traj.records, n, summary);
  return {std::move(traj), std::move(summary)};
}

std::string RunSummary::format() const {
  std::ostringstream os;
  os.precision(12);
  os << "converged: " << (converged ? "yes" : "no") << "\n";
  os << "stop_reason: " << stop_reason << "\n";
  os << "t_final: " << t_final << "\n";
  os << "steps: " << steps << "\n";
  os << "recenters: " << recenters << "\n";
  os << "preserved_initial: " << preserved_initial << "\n";
  os << "preserved_final: " << preserved_final << "\n";
  os << "relative_drift: " << drift << "\n";
  os << "r0_oracle: " << r0_oracle << "\n";
  os << "r0_estimate: " << r0_estimate << "\n";
  os << "max_abs_u_minus_r0: " << max_u_deviation << "\n";
  os << "radius_gap: " << radius_gap << "\n";
  auto put = [&](const char* name, const std::optional<DecayFit>& f) {
    if (!f) return;
    os << "fit " << name << ": C = " << f->amplitude << ", delta = " << f->rate
       << ", R2 = " << f->r_squared << ", points = " << f->points << "\n";
  };
  put("sup|F-f|", fit_F_minus_f);
  put("1/n-pinch", fit_pinch);
  put("umbilic", fit_umbilic);
  for (const auto& note : fit_notes) os << "note: " << note << "\n";
  return os.str();
}

}  // namespace hflow
