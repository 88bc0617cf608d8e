#include "hflow_cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>
#include <vector>

#include "hflow/ambient.hpp"
#include "hflow/curvfn.hpp"
#include "hflow/diagnostics.hpp"
#include "hflow/errors.hpp"
#include "hflow/hypersurface.hpp"
#include "hflow/io.hpp"
#include "hflow/run.hpp"

namespace fs = std::filesystem;

namespace hflow::cli {

namespace {

constexpr std::size_t kSnapshotEvery = 10;  // in diagnostics records

std::string snapshot_name(std::size_t step) {
  std::ostringstream os;
  os << "snapshot_" << std::setw(9) << std::setfill('0') << step << ".txt";
  return os.str();
}

void write_artifacts(const fs::path& dir, const Trajectory& traj, int n) {
  write_file_atomic((dir / "diagnostics.csv").string(), format_csv(traj.records, n));
}

struct SweepSpec {
  std::string key;
  std::vector<std::string> values;
};

SweepSpec parse_sweep(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == text.size()) {
    throw ConfigError("--sweep", 0, "expected KEY=v1,v2,...");
  }
  SweepSpec s;
  s.key = text.substr(0, eq);
  std::istringstream in(text.substr(eq + 1));
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) throw ConfigError(s.key, 0, "empty sweep value");
    s.values.push_back(item);
  }
  return s;
}

RunConfig load(const RunCommandOptions& opts) {
  RawConfig raw = parse_raw([&] {
    try {
      return read_file(opts.config_path);
    } catch (const std::exception& e) {
      throw ConfigError("(file)", 0, e.what());
    }
  }());
  if (opts.seed) raw = with_override(raw, "seed", std::to_string(*opts.seed));
  return build_config(raw);
}

}  // namespace

int run_single(const RunConfig& cfg, const std::string& out_dir, bool quiet, std::ostream& out,
               std::ostream& err) {
  const fs::path dir(out_dir);
  const fs::path snaps = dir / "snapshots";
  fs::create_directories(snaps);
  const int n = cfg.flow.ambient.n;

  std::size_t emitted = 0;
  hflow::RunOptions ro;
  ro.keep_states = false;
  std::vector<DiagnosticsRecord> history;
  ro.observer = [&](const FlowState& s, const DiagnosticsRecord& rec) {
    history.push_back(rec);
    if (emitted % kSnapshotEvery == 0) {
      write_snapshot((snaps / snapshot_name(s.step)).string(), s.patch, s.t);
      write_file_atomic((dir / "diagnostics.csv").string(), format_csv(history, n));
    }
    ++emitted;
  };

  try {
    RunResult result = run_flow(cfg.flow, ro);
    write_file_atomic((dir / "diagnostics.csv").string(), format_csv(result.trajectory.records, n));
    const std::string summary = result.summary.format();
    write_file_atomic((dir / "summary.txt").string(), summary);
    if (!quiet) out << summary;
    return kOk;
  } catch (const RunAborted& e) {
    write_artifacts(dir, e.partial(), n);
    write_file_atomic((dir / "summary.txt").string(),
                      std::string("aborted: ") + e.what() + "\n");
    err << "numerical abort: " << e.what() << "\n";
    return kNumericalAbort;
  }
}

int run_command(const RunCommandOptions& opts, std::ostream& out, std::ostream& err) {
  RunConfig base;
  try {
    base = load(opts);
  } catch (const ConfigError& e) {
    err << e.what() << "\n";
    return kConfigError;
  }
  if (opts.sweep.empty()) return run_single(base, opts.out_dir, opts.quiet, out, err);

  std::vector<RunConfig> configs;
  SweepSpec sweep;
  try {
    sweep = parse_sweep(opts.sweep);
    for (const auto& v : sweep.values) {
      configs.push_back(build_config(with_override(base.raw, sweep.key, v)));
    }
  } catch (const ConfigError& e) {
    err << e.what() << "\n";
    return kConfigError;
  }

  std::mutex io;
  std::vector<int> codes(configs.size(), kOk);
  std::vector<std::thread> workers;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    workers.emplace_back([&, i] {
      const std::string dir =
          (fs::path(opts.out_dir) / (sweep.key + "=" + sweep.values[i])).string();
      std::ostringstream o, e;
      try {
        codes[i] = run_single(configs[i], dir, opts.quiet, o, e);
      } catch (const std::exception& ex) {
        e << "run " << dir << " failed: " << ex.what() << "\n";
        codes[i] = kNumericalAbort;
      }
      std::lock_guard lock(io);
      if (!opts.quiet) out << "== " << dir << "\n" << o.str();
      err << e.str();
    });
  }
  for (auto& w : workers) w.join();
  return *std::max_element(codes.begin(), codes.end());
}

int check_curvfn_command(const CheckCurvfnOptions& opts, std::ostream& out, std::ostream& err) {
  CurvatureSpec spec = CurvatureSpec::mean(1);
  try {
    spec = CurvatureSpec::make(family_from_string(opts.family), opts.n, opts.param1, opts.param2,
                               opts.alpha);
  } catch (const DomainError& e) {
    err << "invalid curvature function: " << e.what() << "\n";
    return kConfigError;
  }
  const AssumptionReport report = verify_assumptions(spec, opts.samples, opts.seed);
  out << report.format();
  return report.all_required_pass() ? kOk : kFailed;
}

int volumes_command(const std::string& snapshot_path, std::optional<int> k, std::ostream& out,
                    std::ostream& err) {
  Snapshot snap = [&] {
    try {
      return read_snapshot(snapshot_path);
    } catch (const std::exception& e) {
      throw ConfigError("(snapshot)", 0, e.what());
    }
  }();
  const int n = snap.patch.dim();
  if (k && (*k < 0 || *k > n)) {
    err << "k must be in {0.." << n << "}\n";
    return kConfigError;
  }
  const GeometryFields geom = build_geometry(snap.patch);
  const auto all = all_mixed_volumes(snap.patch, geom);
  for (int j = 0; j <= n; ++j) {
    if (k && *k != j) continue;
    out << "V_" << (n + 1 - j) << " (k=" << j << ") = " << format_double(all[j]) << "\n";
  }
  return kOk;
}

int oracle_command(const OracleOptions& opts, std::ostream& out, std::ostream& err) {
  try {
    const AmbientParams p(opts.a, opts.n);
    if (!(opts.r > 0.0)) throw DomainError("r must be positive");
    out << "phi = " << format_double(warp(p, opts.r).phi) << "\n";
    out << "sphere_curvature = " << format_double(sphere_curvature(p, opts.r)) << "\n";
    for (int j = 0; j <= opts.n; ++j) {
      if (opts.k && *opts.k != j) continue;
      out << "V_" << (opts.n + 1 - j) << " (k=" << j
          << ") = " << format_double(ball_mixed_volume(p, opts.r, j)) << "\n";
    }
  } catch (const DomainError& e) {
    err << e.what() << "\n";
    return kConfigError;
  }
  return kOk;
}

int verify_command(const RunCommandOptions& opts, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  try {
    cfg = load(opts);
  } catch (const ConfigError& e) {
    err << e.what() << "\n";
    return kConfigError;
  }
  const FlowConfig& fc = cfg.flow;
  const int n = fc.ambient.n;
  const double a = fc.ambient.a;

  RunResult res;
  try {
    res = run_flow(fc);
  } catch (const RunAborted& e) {
    err << "numerical abort: " << e.what() << "\n";
    return kNumericalAbort;
  }
  const auto& recs = res.trajectory.records;
  const auto& sum = res.summary;

  bool all = true;
  auto line = [&](const std::string& name, bool ok, const std::string& detail) {
    all = all && ok;
    out << (ok ? "PASS " : "FAIL ") << name << ": " << detail << "\n";
  };
  auto num = [](double v) {
    std::ostringstream os;
    os << std::setprecision(6) << v;
    return os.str();
  };

  line("converged", sum.converged, "stop reason " + sum.stop_reason + ", t = " + num(sum.t_final));
  line("conservation", sum.drift <= 1e-3, "relative drift " + num(sum.drift));
  line("limit radius", sum.max_u_deviation <= 1e-3,
       "max|u - r0| = " + num(sum.max_u_deviation) + ", r0 = " + num(sum.r0_oracle));
  if (sum.fit_F_minus_f) {
    const auto& f = *sum.fit_F_minus_f;
    line("sup|F-f| decay", f.rate > 0.0 && f.r_squared >= 0.99,
         "delta = " + num(f.rate) + ", R2 = " + num(f.r_squared));
  } else {
    line("sup|F-f| decay", false, "fit unavailable");
  }

  double min_margin = INFINITY, worst_pinch_drop = 0.0, running = -INFINITY;
  double max_cond = 0.0, max_sup_F = 0.0, min_F_minus = INFINITY;
  for (const auto& r : recs) {
    min_margin = std::min(min_margin, r.hconv_margin);
    running = std::max(running, r.pinch_ratio);
    worst_pinch_drop = std::max(worst_pinch_drop, running - r.pinch_ratio);
    max_cond = std::max(max_cond, r.parabolicity_cond);
    max_sup_F = std::max(max_sup_F, r.sup_F);
    min_F_minus = std::min(min_F_minus, r.inf_F_minus);
  }
  line("h-convexity", min_margin > 0.0, "min (kappa - a) = " + num(min_margin));
  line("pinching monotone", worst_pinch_drop <= 1e-3, "largest drop " + num(worst_pinch_drop));
  if (n > 1) {
    for (const auto& [name, fit] : {std::pair{"pinching decay", sum.fit_pinch},
                                    std::pair{"umbilicity decay", sum.fit_umbilic}}) {
      line(name, fit && fit->rate > 0.0 && fit->r_squared >= 0.95,
           fit ? "delta = " + num(fit->rate) + ", R2 = " + num(fit->r_squared)
               : std::string("fit unavailable"));
    }
  }
  line("uniform parabolicity", std::isfinite(max_cond) && max_cond >= 1.0,
       "max condition " + num(max_cond));
  line("F bounds", std::isfinite(max_sup_F) && min_F_minus > 0.0,
       "sup F = " + num(max_sup_F) + ", inf F - (a - alpha) = " + num(min_F_minus));

  // radius gap on a thinned set of states
  double worst_gap = 0.0;
  const std::size_t stride = std::max<std::size_t>(1, res.trajectory.states.size() / 50);
  for (std::size_t i = 0; i < res.trajectory.states.size(); i += stride) {
    worst_gap = std::max(worst_gap, check_radius_gap(res.trajectory.states[i].patch).gap);
  }
  line("radius gap", worst_gap < a * std::log(2.0) + 1e-6,
       "max gap " + num(worst_gap) + " vs a log 2 = " + num(a * std::log(2.0)));

  if (fc.k == 0 && fc.curvature.family() == Family::MeanH) {
    const IsoperimetricReport iso = isoperimetric_report(res.trajectory.states, fc.curvature);
    line("area monotone", iso.area_monotone, "max relative increase " + num(iso.max_area_increase));
    line("isoperimetric ratio", iso.inequality_holds && iso.final_ratio_error <= 1e-3,
         "final vs ball " + num(iso.final_ratio_error));
  }
  return all ? kOk : kFailed;
}

}  // namespace hflow::cli
