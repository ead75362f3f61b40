#pragma once

#include <map>
#include <string>
#include <string_view>

#include "pmink/errors.hpp"
#include "pmink/expression.hpp"
#include "pmink/flow.hpp"

namespace pmink {

/// Malformed configuration text; `line` is 1-based (0 when the problem is
/// not tied to a line, e.g. a missing key).
class ConfigError : public InvalidInput {
 public:
  ConfigError(std::size_t line, const std::string& what)
      : InvalidInput(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Flat `key = value` run description. Required keys: p, f_expr, h0_expr.
/// Optional: grid_m, delta, n_r, dt_init, dt_min, dt_max, t_max, stop_tol,
/// solver_tol, collar_thickness (min_b | equivalent_radius), max_mode.
/// '#' starts a comment.
struct RunConfig {
  FlowConfig flow;
  std::string f_expr;
  std::string h0_expr;
  /// Every key with its effective value, sorted by key.
  std::map<std::string, std::string> echo;

  /// Canonical `key = value` lines of `echo`.
  std::string canonical_text() const;
};

RunConfig parse_run_config(std::string_view text);
RunConfig load_run_config(const std::string& path);

const char* to_string(CollarThickness rule);

}  // namespace pmink
