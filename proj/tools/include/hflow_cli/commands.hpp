#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

#include "hflow_cli/config.hpp"

namespace hflow::cli {

enum ExitCode : int { kOk = 0, kFailed = 1, kConfigError = 2, kNumericalAbort = 3 };

struct RunCommandOptions {
  std::string config_path;
  std::string out_dir = "out";
  std::string sweep;  // KEY=v1,v2,...
  std::optional<std::uint64_t> seed;
  bool quiet = false;
};

// Writes diagnostics.csv, snapshots/ and summary.txt under out_dir.
int run_command(const RunCommandOptions& opts, std::ostream& out, std::ostream& err);

// One run of an already-built config into out_dir.
int run_single(const RunConfig& cfg, const std::string& out_dir, bool quiet, std::ostream& out,
               std::ostream& err);

struct CheckCurvfnOptions {
  std::string family = "MeanH";
  int n = 2;
  double param1 = 0.0;
  double param2 = 0.0;
  double alpha = 0.0;
  std::size_t samples = 10000;
  std::uint64_t seed = 0;
};
int check_curvfn_command(const CheckCurvfnOptions& opts, std::ostream& out, std::ostream& err);

int volumes_command(const std::string& snapshot_path, std::optional<int> k, std::ostream& out,
                    std::ostream& err);

struct OracleOptions {
  int n = 1;
  double a = 1.0;
  double r = 1.0;
  std::optional<int> k;
};
int oracle_command(const OracleOptions& opts, std::ostream& out, std::ostream& err);

int verify_command(const RunCommandOptions& opts, std::ostream& out, std::ostream& err);

// CLI entry point shared by the executable and the tests.
int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace hflow::cli
