#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace pmink::cli {

enum ExitCode : int {
  kSuccess = 0,
  kConditionFailure = 1,
  kInputError = 2,
  kRuntimeFailure = 3,
};

struct Options {
  std::filesystem::path out_dir = ".";
  /// Adds a timestamp line to every artifact; off keeps outputs reproducible.
  bool stamp = false;
  bool quiet = false;
};

struct Streams {
  std::ostream& out;
  std::ostream& err;
};

/// Runs the flow described by a config file; writes trajectory.csv,
/// final_shape.csv and manifest.json.
int cmd_run(const std::filesystem::path& config_path, const Options& options,
            Streams io);

struct OracleRequest {
  int n = 2;
  double p = 2.0;
  double outer_radius = 1.0;
  double inner_radius = 0.5;
  std::vector<int> resolutions;
  /// Forces the one-dimensional radial solver (always used for n != 2).
  bool radial = false;
  /// N_theta / N_r for planar runs.
  int theta_per_ring = 8;
};

/// Convergence table of the collar solver against the closed-form annulus
/// solution; writes oracle.csv.
int cmd_oracle(const OracleRequest& request, const Options& options, Streams io);

/// Admissibility report for a two-column (theta, f) CSV; writes
/// admissibility.csv. Exit 0 iff every condition holds.
int cmd_check(const std::filesystem::path& density_path, const Options& options,
              Streams io);

/// 17-significant-digit round-trip formatting used in every artifact.
std::string format_real(double value);

/// FNV-1a 64-bit digest, hex encoded.
std::string fnv1a_hex(const std::string& data);

}  // namespace pmink::cli
