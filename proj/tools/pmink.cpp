#include <CLI11.hpp>

#include <iostream>

#include "pmink/commands.hpp"

int main(int argc, char** argv) {
  namespace cli = pmink::cli;
  CLI::App app{"p-capacitary Minkowski problem: flow runs, oracle tables, density checks"};
  app.require_subcommand(1);

  cli::Options options;
  std::string out_dir = ".";
  app.add_option("--out-dir", out_dir, "Directory for the generated artifacts");
  app.add_flag("--stamp", options.stamp, "Add a timestamp line to every artifact");
  app.add_flag("--quiet", options.quiet, "Suppress the summary on stdout");

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run the normalized flow from a config file");
  run->add_option("config", config_path, "Config file (key = value lines)")->required();

  cli::OracleRequest request;
  auto* oracle =
      app.add_subcommand("oracle", "Collar solver against the closed-form annulus solution");
  oracle->add_option("n", request.n, "Dimension")->required();
  oracle->add_option("p", request.p, "Exponent p")->required();
  oracle->add_option("R", request.outer_radius, "Outer radius")->required();
  oracle->add_option("r0", request.inner_radius, "Inner radius")->required();
  oracle->add_option("resolutions", request.resolutions,
                     "N_theta values (planar) or node counts (radial)");
  oracle->add_flag("--radial", request.radial, "Use the one-dimensional radial solver");
  oracle->add_option("--theta-per-ring", request.theta_per_ring,
                     "Ratio N_theta / N_r for planar runs");

  std::string density_path;
  auto* check = app.add_subcommand("check", "Admissibility of a (theta, f) density file");
  check->add_option("density", density_path, "Two-column CSV")->required();

  // Options are accepted before or after the subcommand.
  for (auto* sub : {run, oracle, check}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : cli::kInputError;
  }
  options.out_dir = out_dir;
  const cli::Streams io{std::cout, std::cerr};

  if (*run) return cli::cmd_run(config_path, options, io);
  if (*oracle) return cli::cmd_oracle(request, options, io);
  return cli::cmd_check(density_path, options, io);
}
