#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hflow/flow.hpp"

namespace hflow {

// Monitored invariants of one flow state.
struct DiagnosticsRecord {
  double t = 0.0;
  std::size_t step = 0;
  double V_k_tracked = 0.0;               // the preserved V_{n+1-k}
  std::vector<double> all_mixed_volumes;  // V_{n+1-j}, j = 0..n
  double area = 0.0;
  double hconv_margin = 0.0;              // min (kappa_i - a)
  double pinch_ratio = 0.0;               // min (kappa_min - a) / (H - n a)
  double umbilic_max = 0.0;               // max |A|^2 - H^2/n
  double sup_F = 0.0;
  double inf_F_minus = 0.0;               // min F - (a - alpha)
  double f = 0.0;
  double sup_abs_F_minus_f = 0.0;
  double min_u = 0.0;
  double max_u = 0.0;
  double chi_max = 0.0;
  double parabolicity_cond = 0.0;         // max over nodes of dF_i / min over nodes of dF_i
  std::size_t recenter_count = 0;
};

DiagnosticsRecord snapshot(const FlowState& state, const CurvatureSpec& spec);

std::string csv_header(int n);
std::string csv_row(const DiagnosticsRecord& record);
std::string format_csv(std::span<const DiagnosticsRecord> records, int n);

struct DecayFit {
  double amplitude = 0.0;  // C in y ~ C exp(-rate t)
  double rate = 0.0;
  double r_squared = 0.0;
  std::size_t points = 0;
  // a fit that explains none of the variance is not evidence of decay
  bool decaying() const { return rate > 0.0 && r_squared > 0.0; }
};

// Least-squares line through (t, log y) over the trailing tail_fraction of
// the samples. Needs >= 10 tail points, all with y > 0.
DecayFit fit_decay(std::span<const std::pair<double, double>> series, double tail_fraction);

// Index of the first record after which decay fits start: the first sample
// where sup|F - f| is below 10% of its initial value.
std::size_t decay_onset(std::span<const DiagnosticsRecord> records);

struct RadiusGap {
  double gap;    // max u - min u about the estimated inball center
  double bound;  // a log 2
  bool pass;
  double tau;            // tanh(a min_u / 2), from the inradius bracket
  double sharper_bound;  // a log((1 + sqrt tau)^2 / (1 + tau)), informational
  CenterShift center;
};

// Recenters at the estimated inball center and compares max u - min u
// against the uniform outer-radius/inradius gap bound.
RadiusGap check_radius_gap(const GraphPatch& patch);

struct IsoperimetricReport {
  bool area_monotone = false;
  double max_area_increase = 0.0;  // largest relative increase between samples
  double monotone_tolerance = 0.0;
  double initial_ratio = 0.0;      // V_{n+1}(M_0) / |M_0|
  double final_ratio = 0.0;
  double ball_ratio = 0.0;         // V_{n+1}(B_R0) / |B_R0|
  double ball_radius = 0.0;        // R_0
  double final_ratio_error = 0.0;  // |final - ball| / ball
  bool inequality_holds = false;   // initial_ratio <= ball_ratio
  bool strict = false;
  std::string format() const;
};

// Requires a k = 0 trajectory of the mean-curvature flow.
IsoperimetricReport isoperimetric_report(std::span<const FlowState> states,
                                         const CurvatureSpec& spec);

// Compares the forward difference of the nodal area density with
// -(F - f) H sqrt(g) plus the divergence of the tangential drift of the
// graph parametrization. Returns the max residual relative to the largest
// right-hand side (or to max sqrt(g) when the right-hand side vanishes).
double check_evolution_identity(const FlowState& before, const FlowState& after, double dt);

}  // namespace hflow
