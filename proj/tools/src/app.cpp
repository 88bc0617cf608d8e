#include <CLI11.hpp>

#include "hflow_cli/commands.hpp"

namespace hflow::cli {

int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"hflow: volume-preserving curvature flows of h-convex hypersurfaces"};
  app.require_subcommand(1);

  RunCommandOptions run_opts;
  std::uint64_t seed = 0;
  auto add_run_flags = [&](CLI::App* sub) {
    sub->add_option("--config", run_opts.config_path, "config file")->required();
    sub->add_option("--seed", seed, "override the config seed");
    sub->add_flag("--quiet", run_opts.quiet, "suppress the summary on stdout");
  };

  auto* run = app.add_subcommand("run", "integrate a flow and write CSV, snapshots and summary");
  add_run_flags(run);
  run->add_option("--out", run_opts.out_dir, "output directory");
  run->add_option("--sweep", run_opts.sweep, "KEY=v1,v2,... runs one flow per value in parallel");

  auto* verify = app.add_subcommand("verify", "run a flow and check the monitored invariants");
  add_run_flags(verify);

  CheckCurvfnOptions cc;
  auto* check = app.add_subcommand("check-curvfn", "randomized check of the curvature-function hypotheses");
  check->add_option("--family", cc.family, "MeanH, NormA, CompletelySymmetric, ElemSymmetricQuotient, PowerMean");
  check->add_option("--n", cc.n, "number of principal curvatures");
  check->add_option("--param1", cc.param1, "k (CompletelySymmetric, ElemSymmetricQuotient) or r (PowerMean)");
  check->add_option("--param2", cc.param2, "l (ElemSymmetricQuotient)");
  check->add_option("--alpha", cc.alpha, "shift");
  check->add_option("--samples", cc.samples, "random samples per check");
  check->add_option("--seed", cc.seed, "random seed");

  std::string snapshot_path;
  std::optional<int> vol_k;
  auto* volumes = app.add_subcommand("volumes", "mixed volumes of a snapshot");
  volumes->add_option("snapshot", snapshot_path, "snapshot file")->required();
  volumes->add_option("--k", vol_k, "print only V_{n+1-k}");

  OracleOptions oo;
  auto* oracle = app.add_subcommand("oracle", "closed-form geodesic ball values");
  oracle->add_option("--n", oo.n, "dimension");
  oracle->add_option("--a", oo.a, "curvature scale");
  oracle->add_option("--r", oo.r, "radius");
  oracle->add_option("--k", oo.k, "print only V_{n+1-k}");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return kConfigError;
  }

  try {
    if (run->parsed() || verify->parsed()) {
      if (run->parsed() ? run->count("--seed") : verify->count("--seed")) run_opts.seed = seed;
      return run->parsed() ? run_command(run_opts, out, err) : verify_command(run_opts, out, err);
    }
    if (check->parsed()) return check_curvfn_command(cc, out, err);
    if (volumes->parsed()) return volumes_command(snapshot_path, vol_k, out, err);
    if (oracle->parsed()) return oracle_command(oo, out, err);
  } catch (const ConfigError& e) {
    err << e.what() << "\n";
    return kConfigError;
  }
  return kConfigError;
}

}  // namespace hflow::cli
