#include "pmink/run_config.hpp"

#include <fmt/format.h>

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace pmink {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double parse_real(std::string_view value, std::size_t line, const std::string& key) {
  std::string_view v = value;
  if (!v.empty() && v.front() == '+') v.remove_prefix(1);
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || std::isnan(out)) {
    throw ConfigError(line, "key '" + key + "' expects a real number, got '" +
                                std::string(value) + "'");
  }
  return out;
}

long parse_integer(std::string_view value, std::size_t line, const std::string& key) {
  long out = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError(line, "key '" + key + "' expects an integer, got '" +
                                std::string(value) + "'");
  }
  return out;
}

std::string format_real(double v) { return fmt::format("{:.17g}", v); }

}  // namespace

const char* to_string(CollarThickness rule) {
  switch (rule) {
    case CollarThickness::MinCurvatureRadius: return "min_b";
    case CollarThickness::EquivalentRadius: return "equivalent_radius";
  }
  return "unknown";
}

std::string RunConfig::canonical_text() const {
  std::string out;
  for (const auto& [key, value] : echo) out += key + " = " + value + "\n";
  return out;
}

RunConfig parse_run_config(std::string_view text) {
  static const std::set<std::string> kKeys = {
      "p",        "grid_m",  "delta",    "n_r",        "dt_init",
      "dt_min",   "dt_max",  "t_max",    "stop_tol",   "solver_tol",
      "f_expr",   "h0_expr", "collar_thickness", "max_mode"};

  std::map<std::string, std::pair<std::string, std::size_t>> raw;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) {
      if (end == text.size()) break;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(line_no, "expected 'key = value'");
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (!kKeys.contains(key)) throw ConfigError(line_no, "unknown key '" + key + "'");
    if (value.empty()) throw ConfigError(line_no, "key '" + key + "' has no value");
    if (raw.contains(key)) throw ConfigError(line_no, "duplicate key '" + key + "'");
    raw.emplace(key, std::make_pair(value, line_no));
    if (end == text.size()) break;
  }

  for (const char* required : {"p", "f_expr", "h0_expr"}) {
    if (!raw.contains(required)) {
      throw ConfigError(0, std::string("missing required key '") + required + "'");
    }
  }

  RunConfig cfg;
  FlowConfig& flow = cfg.flow;
  const auto real = [&](const char* key, double& slot) {
    if (auto it = raw.find(key); it != raw.end()) {
      slot = parse_real(it->second.first, it->second.second, key);
    }
    cfg.echo[key] = format_real(slot);
  };
  real("p", flow.p);
  real("delta", flow.delta);
  real("dt_init", flow.dt_init);
  real("dt_min", flow.dt_min);
  real("dt_max", flow.dt_max);
  real("t_max", flow.t_max);
  real("stop_tol", flow.stop_tol);
  real("solver_tol", flow.solver_tol);

  const auto integer = [&](const char* key, long fallback) {
    long v = fallback;
    if (auto it = raw.find(key); it != raw.end()) {
      v = parse_integer(it->second.first, it->second.second, key);
    }
    cfg.echo[key] = std::to_string(v);
    return v;
  };
  const long grid_m = integer("grid_m", static_cast<long>(flow.grid_m));
  if (grid_m < 8 || grid_m % 2 != 0) {
    throw ConfigError(raw.contains("grid_m") ? raw["grid_m"].second : 0,
                      "grid_m must be an even integer >= 8");
  }
  flow.grid_m = static_cast<std::size_t>(grid_m);
  flow.n_r = static_cast<int>(integer("n_r", flow.n_r));
  flow.max_mode = static_cast<int>(integer("max_mode", flow.max_mode));

  if (auto it = raw.find("collar_thickness"); it != raw.end()) {
    if (it->second.first == "min_b") {
      flow.collar_rule = CollarThickness::MinCurvatureRadius;
    } else if (it->second.first == "equivalent_radius") {
      flow.collar_rule = CollarThickness::EquivalentRadius;
    } else {
      throw ConfigError(it->second.second,
                        "collar_thickness must be 'min_b' or 'equivalent_radius'");
    }
  }
  cfg.echo["collar_thickness"] = to_string(flow.collar_rule);

  const auto sample_expr = [&](const char* key, std::string& text_out) {
    const auto& [value, line] = raw.at(key);
    text_out = value;
    cfg.echo[key] = value;
    try {
      const Expression e = Expression::parse(value);
      std::vector<double> s(flow.grid_m);
      for (std::size_t k = 0; k < flow.grid_m; ++k) {
        s[k] = e(SupportFunction::angle(k, flow.grid_m));
      }
      return s;
    } catch (const ExpressionError& err) {
      throw ConfigError(line, std::string("key '") + key + "': " + err.what());
    }
  };
  auto f_samples = sample_expr("f_expr", cfg.f_expr);
  auto h_samples = sample_expr("h0_expr", cfg.h0_expr);
  try {
    flow.f = PrescribedDensity(std::move(f_samples));
  } catch (const InvalidInput& err) {
    throw ConfigError(raw.at("f_expr").second, std::string("f_expr: ") + err.what());
  }
  try {
    flow.h0 = symmetrize(SupportFunction(std::move(h_samples)));
  } catch (const InvalidInput& err) {
    throw ConfigError(raw.at("h0_expr").second, std::string("h0_expr: ") + err.what());
  }
  try {
    flow.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const InvalidInput& err) {
    throw ConfigError(0, err.what());
  }
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(0, "cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str());
}

}  // namespace pmink
