#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hflow/diagnostics.hpp"
#include "hflow/flow.hpp"

namespace hflow {

struct Trajectory {
  std::vector<FlowState> states;  // sampled at the output cadence, plus the last state
  std::vector<DiagnosticsRecord> records;
};

struct RunSummary {
  bool converged = false;
  std::string stop_reason;  // "converged", "t_max" or "max_steps"
  double t_final = 0.0;
  std::size_t steps = 0;
  std::size_t recenters = 0;
  double preserved_initial = 0.0;
  double preserved_final = 0.0;
  double drift = 0.0;        // relative change of the preserved mixed volume
  double r0_oracle = 0.0;    // ball radius with the initial preserved mixed volume
  double r0_estimate = 0.0;  // mean of u about the final inball center
  double max_u_deviation = 0.0;  // max |u - r0_oracle| about the final inball center
  double radius_gap = 0.0;
  std::optional<DecayFit> fit_F_minus_f;
  std::optional<DecayFit> fit_pinch;     // 1/n - pinch_ratio
  std::optional<DecayFit> fit_umbilic;   // |A|^2 - H^2/n
  std::vector<std::string> fit_notes;    // reasons for missing fits

  std::string format() const;
};

struct RunResult {
  Trajectory trajectory;
  RunSummary summary;
};

struct RunOptions {
  bool keep_states = true;
  std::function<void(const FlowState&, const DiagnosticsRecord&)> observer;
};

// Raised when a step is rejected or the geometry breaks down; carries the
// trajectory recorded up to the failure.
class RunAborted : public std::runtime_error {
 public:
  RunAborted(const std::string& what, Trajectory partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  const Trajectory& partial() const noexcept { return partial_; }

 private:
  Trajectory partial_;
};

// Integrates until sup|F - f| < tol_converged with the pinching ratio within
// 1e-6 of 1/n, or until t_max / max_steps.
RunResult run_flow(const FlowConfig& config, const RunOptions& options = {});

// Decay fits over the trailing half of the records after the decay onset.
void fit_trajectory(const std::vector<DiagnosticsRecord>& records, int n, RunSummary& summary);

}  // namespace hflow
