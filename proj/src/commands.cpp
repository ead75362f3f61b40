#include "pmink/commands.hpp"

#include <fmt/format.h>

#include <charconv>
#include <chrono>
#include <cctype>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <ostream>
#include <sstream>

#include "pmink/errors.hpp"
#include "pmink/flow.hpp"
#include "pmink/measures.hpp"
#include "pmink/p_harmonic.hpp"
#include "pmink/run_config.hpp"

namespace pmink::cli {

std::string format_real(double value) { return fmt::format("{:.17g}", value); }

std::string fnv1a_hex(const std::string& data) {
  std::uint64_t hash = 14695981039346656037ull;
  for (unsigned char c : data) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  return fmt::format("{:016x}", hash);
}

namespace {

std::string timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const Options& options,
            const std::vector<std::string>& header)
      : out_(path) {
    if (!out_) throw Error("cannot write " + path.string());
    if (options.stamp) out_ << "# generated " << timestamp() << "\n";
    row_strings(header);
  }

  void row(const std::vector<double>& values) {
    std::vector<std::string> cells;
    cells.reserve(values.size());
    for (double v : values) cells.push_back(format_real(v));
    row_strings(cells);
  }

  void row_strings(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

void write_trajectory(const std::filesystem::path& path, const Options& options,
                      const std::vector<DiagnosticsRecord>& history) {
  CsvWriter csv(path, options,
                {"t", "min_h", "max_h", "gamma", "eta", "psi", "ma_residual", "dt"});
  for (const auto& r : history) {
    csv.row({r.t, r.min_h, r.max_h, r.gamma, r.eta, r.psi, r.ma_residual, r.dt});
  }
}

void write_diagnostics(const std::filesystem::path& path, const Options& options,
                       const std::vector<DiagnosticsRecord>& history) {
  CsvWriter csv(path, options,
                {"t", "dt", "gamma", "eta", "psi", "gamma_drift", "psi_increase_events",
                 "min_b", "max_b", "min_h", "max_h", "max_grad_h", "ma_residual",
                 "relative_speed", "variation_gap"});
  for (const auto& r : history) {
    csv.row({r.t, r.dt, r.gamma, r.eta, r.psi, r.gamma_drift,
             static_cast<double>(r.psi_increase_events), r.min_b, r.max_b, r.min_h,
             r.max_h, r.max_grad_h, r.ma_residual, r.relative_speed, r.variation_gap});
  }
}

void write_final_shape(const std::filesystem::path& path, const Options& options,
                       const FlowState& state, double p) {
  CsvWriter csv(path, options, {"theta", "h", "b", "grad", "density"});
  const auto mu = measure_density(state.h, state.grad, p);
  for (std::size_t k = 0; k < state.h.size(); ++k) {
    csv.row({state.h.theta(k), state.h[k], state.curvature.b[k], state.grad[k],
             mu.density[k]});
  }
}

void write_manifest(const std::filesystem::path& path, const Options& options,
                    const RunConfig& config, const std::vector<std::string>& outputs,
                    const RunResult* result) {
  nlohmann::ordered_json manifest;
  manifest["config"] = config.echo;
  manifest["outputs"] = outputs;
  manifest["input_hash"] = "fnv1a64:" + fnv1a_hex(config.canonical_text());
  if (result) {
    manifest["converged"] = result->converged;
    manifest["stop_reason"] = result->stop_reason;
    manifest["accepted_steps"] = result->accepted_steps;
  }
  if (options.stamp) manifest["generated"] = timestamp();
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << manifest.dump(2) << "\n";
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory " + dir.string());
}

}  // namespace

int cmd_run(const std::filesystem::path& config_path, const Options& options,
            Streams io) {
  RunConfig config;
  try {
    config = load_run_config(config_path.string());
  } catch (const InvalidInput& err) {
    io.err << "error: " << config_path.string() << ": " << err.what() << "\n";
    return kInputError;
  }
  try {
    ensure_dir(options.out_dir);
  } catch (const Error& err) {
    io.err << "error: " << err.what() << "\n";
    return kRuntimeFailure;
  }

  const auto trajectory = options.out_dir / "trajectory.csv";
  const auto final_shape = options.out_dir / "final_shape.csv";
  const auto manifest = options.out_dir / "manifest.json";
  const auto diagnostics = options.out_dir / "diagnostics.csv";
  try {
    GaussCurvatureFlow flow(config.flow);
    const RunResult result = flow.run();
    write_trajectory(trajectory, options, result.history);
    write_final_shape(final_shape, options, result.final_state, config.flow.p);
    write_diagnostics(diagnostics, options, result.history);
    write_manifest(manifest, options, config,
                   {"trajectory.csv", "final_shape.csv", "diagnostics.csv"}, &result);
    const auto& last = result.history.back();
    if (!options.quiet) {
      io.out << fmt::format(
          "{} after {} steps: t = {:.6g}, ma_residual = {:.3e}, Gamma drift = {:.3e}\n",
          result.stop_reason, result.accepted_steps, last.t, last.ma_residual,
          last.gamma_drift);
    }
    if (!result.converged) {
      io.err << "error: no stationary state by t_max; diagnostics in "
             << diagnostics.string() << "\n";
      return kRuntimeFailure;
    }
    return kSuccess;
  } catch (const StepFailure& err) {
    write_diagnostics(diagnostics, options, err.history());
    io.err << "error: " << err.what() << "; diagnostics in " << diagnostics.string()
           << "\n";
    return kRuntimeFailure;
  } catch (const Error& err) {
    io.err << "error: " << err.what() << "\n";
    return kRuntimeFailure;
  }
}

int cmd_oracle(const OracleRequest& request, const Options& options, Streams io) {
  std::vector<int> resolutions = request.resolutions;
  const bool radial = request.radial || request.n != 2;
  try {
    const RadialOracle oracle(request.n, request.p, request.outer_radius,
                              request.inner_radius);
    if (resolutions.empty()) {
      resolutions = radial ? std::vector<int>{32, 64, 128} : std::vector<int>{64, 128, 256};
    }
    for (int r : resolutions) {
      if (r < (radial ? 4 : 8) || (!radial && r % 2 != 0)) {
        throw InvalidInput("invalid resolution " + std::to_string(r));
      }
    }
    if (!radial && request.theta_per_ring < 1) {
      throw InvalidInput("theta_per_ring must be positive");
    }
    ensure_dir(options.out_dir);
    const auto path = options.out_dir / "oracle.csv";
    CsvWriter csv(path, options,
                  {"N_theta", "N_r", "max_u_error", "grad_error", "observed_order"});
    const double truth = oracle.grad_at_outer();
    if (!options.quiet) io.out << "grad truth = " << format_real(truth) << "\n";

    double prev_error = 0.0;
    int prev_n = 0;
    for (int res : resolutions) {
      int n_theta = 0;
      int n_r = res;
      double max_u_error = 0.0;
      double grad_error = 0.0;
      if (radial) {
        const auto sol = solve_radial_p_laplace(request.n, request.p, request.outer_radius,
                                                request.inner_radius, n_r, 1e-12);
        for (std::size_t i = 0; i < sol.r.size(); ++i) {
          max_u_error = std::max(max_u_error, std::abs(sol.u[i] - oracle(sol.r[i])));
        }
        grad_error = std::abs(sol.grad_at_outer - truth) / truth;
      } else {
        n_theta = res;
        n_r = std::max(4, res / request.theta_per_ring);
        const auto disk = SupportFunction::sample(
            static_cast<std::size_t>(n_theta), [&](double) { return request.outer_radius; });
        const auto mesh =
            build_collar(boundary_curve(disk), curvature(disk),
                         1.0 - request.inner_radius / request.outer_radius, n_r);
        const auto sol = solve_p_laplace(mesh, request.p, 1e-11);
        for (std::size_t i = 0; i < mesh.node_count(); ++i) {
          max_u_error =
              std::max(max_u_error, std::abs(sol.u[i] - oracle(mesh.nodes[i].norm())));
        }
        for (double g : sol.boundary_gradient) {
          grad_error = std::max(grad_error, std::abs(g - truth) / truth);
        }
      }
      const int level = radial ? n_r : n_theta;
      const double order =
          prev_n ? std::log(prev_error / grad_error) / std::log(double(level) / prev_n)
                 : std::nan("");
      csv.row_strings({std::to_string(n_theta), std::to_string(n_r), format_real(max_u_error),
                       format_real(grad_error), format_real(order)});
      if (!options.quiet) {
        io.out << fmt::format("N_theta={} N_r={} max_u_error={:.3e} grad_error={:.3e}\n",
                              n_theta, n_r, max_u_error, grad_error);
      }
      prev_error = grad_error;
      prev_n = level;
    }
    return kSuccess;
  } catch (const InvalidInput& err) {
    io.err << "error: " << err.what() << "\n";
    return kInputError;
  } catch (const Error& err) {
    io.err << "error: " << err.what() << "\n";
    return kRuntimeFailure;
  }
}

namespace {

struct DensityFile {
  std::vector<double> theta;
  std::vector<double> f;
  std::vector<std::size_t> lines;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && !s.empty();
}

DensityFile read_density(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot read density file " + path.string());
  DensityFile file;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    const auto comma = view.find(',');
    if (comma == std::string_view::npos) {
      throw InvalidInput("line " + std::to_string(line_no) + ": expected 'theta,f'");
    }
    double theta = 0.0;
    double value = 0.0;
    const bool ok_theta = parse_double(view.substr(0, comma), theta);
    const bool ok_value = parse_double(view.substr(comma + 1), value);
    if (!ok_theta || !ok_value) {
      if (file.f.empty() && !ok_theta) continue;  // header row
      throw InvalidInput("line " + std::to_string(line_no) + ": malformed number");
    }
    if (!std::isfinite(value) || !(value > 0.0)) {
      throw InvalidInput("line " + std::to_string(line_no) + ": f = " + format_real(value) +
                         " is not positive");
    }
    file.theta.push_back(theta);
    file.f.push_back(value);
    file.lines.push_back(line_no);
  }
  const std::size_t m = file.f.size();
  if (m < 8 || m % 2 != 0) {
    throw InvalidInput("density file needs an even number (>= 8) of samples, got " +
                       std::to_string(m));
  }
  for (std::size_t k = 0; k < m; ++k) {
    if (std::abs(file.theta[k] - SupportFunction::angle(k, m)) > 1e-9) {
      throw InvalidInput("line " + std::to_string(file.lines[k]) +
                         ": theta is not on the uniform grid 2*pi*k/M");
    }
  }
  return file;
}

}  // namespace

int cmd_check(const std::filesystem::path& density_path, const Options& options,
              Streams io) {
  AdmissibilityReport report;
  try {
    const auto file = read_density(density_path);
    report = check_admissibility(file.f);
  } catch (const InvalidInput& err) {
    io.err << "error: " << density_path.string() << ": " << err.what() << "\n";
    return kInputError;
  }
  try {
    ensure_dir(options.out_dir);
    CsvWriter csv(options.out_dir / "admissibility.csv", options,
                  {"condition", "value", "pass"});
    csv.row_strings({"spread_minimum", format_real(report.spread_minimum),
                     report.spread_ok ? "1" : "0"});
    csv.row_strings({"centroid_x", format_real(report.centroid_x),
                     report.centroid_ok ? "1" : "0"});
    csv.row_strings({"centroid_y", format_real(report.centroid_y),
                     report.centroid_ok ? "1" : "0"});
    csv.row_strings({"atoms", "0", report.atoms_ok ? "1" : "0"});
  } catch (const Error& err) {
    io.err << "error: " << err.what() << "\n";
    return kRuntimeFailure;
  }
  if (!options.quiet) {
    const auto verdict = [](bool ok) { return ok ? "pass" : "FAIL"; };
    io.out << fmt::format("(i)   non-concentration: min_zeta integral |<zeta,xi>| f = {:.12g}  {}\n",
                          report.spread_minimum, verdict(report.spread_ok));
    io.out << fmt::format("(ii)  centroid = ({:.12g}, {:.12g}), tolerance {:.3e}  {}\n",
                          report.centroid_x, report.centroid_y, report.centroid_tolerance,
                          verdict(report.centroid_ok));
    io.out << fmt::format("(iii) atoms: {}  {}\n", report.atoms_note,
                          verdict(report.atoms_ok));
  }
  return report.all_pass() ? kSuccess : kConditionFailure;
}

}  // namespace pmink::cli
