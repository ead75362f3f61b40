// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "pmink/flow.hpp"
#include "pmink/measures.hpp"
#include "pmink/p_harmonic.hpp"
#include "reference.hpp"

using namespace pmink;

namespace {

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void expect(bool ok, std::string note) {
    pass = pass && ok;
    notes.push_back((ok ? "ok   " : "FAIL ") + std::move(note));
  }
  void info(std::string note) { notes.push_back("info " + std::move(note)); }
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

FlowConfig flow_config(double p, auto&& f, auto&& h0, std::size_t m = kDefaultGridSize) {
  FlowConfig config;
  config.p = p;
  config.grid_m = m;
  config.f = PrescribedDensity::sample(m, f);
  config.h0 = SupportFunction::sample(m, h0);
  return config;
}

const auto kOne = [](double) { return 1.0; };
const auto kEllipse = [](double t) { return 1.0 + 0.1 * std::cos(2.0 * t); };
const auto kBumpy = [](double t) { return 1.0 + 0.2 * std::cos(2.0 * t); };

FlowConfig run2_config(double p) {
  auto config = flow_config(p, kOne, kOne);
  // Collar ends at radius 0.5, the radius used by the closed-form values.
  config.delta = 0.5;
  return config;
}
FlowConfig run3_config() { return flow_config(2.0, kOne, kEllipse); }
FlowConfig run4_config() { return flow_config(2.0, kBumpy, kOne); }

struct TimedRun {
  RunResult result;
  double seconds = 0.0;
};

// Runs 3 and 4 feed several criteria; compute them once.
const TimedRun& cached_run(int which) {
  static std::vector<std::pair<int, TimedRun>> cache;
  for (const auto& [key, run] : cache) {
    if (key == which) return run;
  }
  const Stopwatch clock;
  TimedRun timed{run(which == 3 ? run3_config() : run4_config()), 0.0};
  timed.seconds = clock.seconds();
  cache.emplace_back(which, std::move(timed));
  return cache.back().second;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// ---------------------------------------------------------------------------

Outcome radial_oracle_convergence() {
  Outcome out;
  for (double p : {1.5, 2.0, 3.0}) {
    const Stopwatch clock;
    const double truth = ref::annulus_grad(p, 1.0, 0.5);
    const RadialOracle oracle(2, p, 1.0, 0.5);
    out.expect(std::abs(oracle.grad_at_outer() - truth) <= 1e-14 * truth,
               fmt::format("p={} library oracle grad {:.9f} matches closed form {:.9f}", p,
                           oracle.grad_at_outer(), truth));
    std::vector<double> errors;
    for (int n_theta : {64, 128, 256}) {
      const auto h = SupportFunction::sample(n_theta, kOne);
      const auto mesh = build_collar(boundary_curve(h), curvature(h), 0.5, n_theta / 8);
      const auto sol = solve_p_laplace(mesh, p, 1e-12);
      double worst = 0.0;
      for (double g : sol.boundary_gradient) worst = std::max(worst, ref::relative_error(g, truth));
      errors.push_back(worst);
    }
    out.expect(errors.back() <= 1e-3,
               fmt::format("p={} grad rel. error {:.3e} at N_theta=256, N_r=32 (<= 1e-3)", p, errors.back()));
    for (std::size_t i = 1; i < errors.size(); ++i) {
      const double order = std::log2(errors[i - 1] / errors[i]);
      out.expect(order >= 1.5 && order <= 3.0,
                 fmt::format("p={} observed order {:.3f} at level {} (in [1.5, 3])", p, order, i));
    }
    const double t = clock.seconds();
    out.expect(t <= 60.0, fmt::format("p={} runtime {:.2f} s (<= 60 s)", p, t));
  }
  return out;
}

Outcome disk_stationarity() {
  Outcome out;
  for (double p : {1.5, 2.0, 3.0}) {
    const Stopwatch clock;
    const auto result = run(run2_config(p));
    const double speed = result.final_state.relative_speed();
    out.expect(speed <= 1e-6, fmt::format("p={} sup|dh/dt|/sup h = {:.3e} (<= 1e-6)", p, speed));
    out.expect(result.converged && result.history.size() == 1 && result.accepted_steps == 0,
               fmt::format("p={} terminated after {} steps", p, result.accepted_steps));
    const double t = clock.seconds();
    out.expect(t <= 60.0, fmt::format("p={} runtime {:.2f} s (<= 60 s)", p, t));
  }
  return out;
}

Outcome convergence_to_disk() {
  Outcome out;
  const auto& [result, seconds] = cached_run(3);
  const auto& fin = result.final_state;
  out.expect(result.converged && fin.t <= 30.0,
             fmt::format("stationary at t = {:.4f} after {} steps ({})", fin.t, result.accepted_steps,
                         result.stop_reason));
  out.expect(fin.ma_residual <= 1e-4, fmt::format("final ma_residual {:.3e} (<= 1e-4)", fin.ma_residual));
  const double ecc = fin.h.max() - fin.h.min();
  out.expect(ecc <= 1e-3, fmt::format("final max h - min h = {:.3e} (<= 1e-3)", ecc));
  out.expect(seconds <= 600.0, fmt::format("runtime {:.1f} s (<= 600 s)", seconds));
  return out;
}

Outcome nonconstant_target() {
  Outcome out;
  const auto& [result, seconds] = cached_run(4);
  const auto& fin = result.final_state;
  out.expect(result.converged, fmt::format("stationary at t = {:.4f} after {} steps", fin.t, result.accepted_steps));
  out.expect(fin.ma_residual <= 1e-3, fmt::format("final ma_residual {:.3e} (<= 1e-3)", fin.ma_residual));
  out.expect(fin.h.is_even(), "final body is even");
  out.expect(fin.curvature.min_radius() > 0.0, fmt::format("min b = {:.6f} (> 0)", fin.curvature.min_radius()));
  const double ecc = fin.h.max() - fin.h.min();
  out.expect(ecc >= 1e-2, fmt::format("max h - min h = {:.4e} (>= 1e-2)", ecc));
  out.info(fmt::format("runtime {:.1f} s", seconds));
  return out;
}

struct Level {
  int n_r;
  double dt_max;
};
constexpr Level kLevels[] = {{32, 1e-2}, {64, 5e-3}, {128, 2.5e-3}};

Outcome gamma_conservation() {
  Outcome out;
  const auto& run3 = cached_run(3).result;
  double worst = 0.0;
  for (const auto& rec : run3.history) worst = std::max(worst, std::abs(rec.gamma_drift));
  out.expect(worst <= 0.05, fmt::format("run 3 max |Gamma drift| = {:.3e} (<= 5%)", worst));

  std::vector<double> drift_at_one;
  for (const auto& level : kLevels) {
    auto config = run3_config();
    config.n_r = level.n_r;
    config.dt_max = level.dt_max;
    config.dt_init = 0.1 * level.dt_max;
    config.t_max = 1.0;
    config.stop_tol = 1e-12;
    const auto result = run(config);
    drift_at_one.push_back(std::abs(result.history.back().gamma_drift));
    out.info(fmt::format("N_r={} dt_max={:.2e}: |drift(t=1)| = {:.4e} (t = {:.6f})", level.n_r, level.dt_max,
                         drift_at_one.back(), result.final_state.t));
  }
  for (std::size_t i = 1; i < drift_at_one.size(); ++i) {
    const double ratio = drift_at_one[i] / drift_at_one[i - 1];
    out.expect(ratio <= 0.6, fmt::format("refinement ratio {:.3f} at level {} (<= 0.6)", ratio, i));
  }
  return out;
}

Outcome psi_monotonicity() {
  Outcome out;
  for (int which : {3, 4}) {
    const auto& result = cached_run(which).result;
    const int events = result.history.back().psi_increase_events;
    const double allowed = 0.01 * result.accepted_steps;
    out.expect(events <= allowed, fmt::format("run {}: {} Psi increase events in {} steps (<= {:.2f})", which,
                                              events, result.accepted_steps, allowed));
    const double psi0 = result.history.front().psi;
    const double psi1 = result.history.back().psi;
    out.expect(psi1 < psi0, fmt::format("run {}: Psi {:.10f} -> {:.10f}", which, psi0, psi1));
  }
  return out;
}

Outcome variational_identity() {
  Outcome out;
  const double probes[] = {1e-4, 5e-5, 2.5e-5};
  std::vector<double> gaps;
  for (std::size_t i = 0; i < 3; ++i) {
    auto config = run3_config();
    config.n_r = kLevels[i].n_r;
    config.dt_max = kLevels[i].dt_max;
    config.dt_init = 0.1 * kLevels[i].dt_max;
    GaussCurvatureFlow flow(config);
    const auto state = flow.evaluate(config.h0, 0.0);
    gaps.push_back(flow.variation_check(state, probes[i]));
    out.info(fmt::format("dt_probe={:.1e} N_r={}: gap = {:.4e}", probes[i], config.n_r, gaps.back()));
  }
  for (std::size_t i = 1; i < gaps.size(); ++i) {
    const double factor = gaps[i - 1] / gaps[i];
    out.expect(factor >= 1.5, fmt::format("decrease factor {:.3f} at level {} (>= 1.5)", factor, i));
  }
  return out;
}

Outcome bound_monitoring() {
  Outcome out;
  std::vector<std::pair<std::string, RunResult>> runs;
  runs.emplace_back("run 2 (p=2)", run(run2_config(2.0)));
  runs.emplace_back("run 3", cached_run(3).result);
  runs.emplace_back("run 4", cached_run(4).result);
  using Field = double DiagnosticsRecord::*;
  const std::pair<const char*, Field> fields[] = {{"min_h", &DiagnosticsRecord::min_h},
                                                  {"max_h", &DiagnosticsRecord::max_h},
                                                  {"max_grad_h", &DiagnosticsRecord::max_grad_h},
                                                  {"min_b", &DiagnosticsRecord::min_b},
                                                  {"max_b", &DiagnosticsRecord::max_b}};
  for (const auto& [name, result] : runs) {
    double worst = 1.0;
    for (const auto& [field, member] : fields) {
      std::vector<double> values;
      for (const auto& rec : result.history) values.push_back(rec.*member);
      const double ratio = values.back() / median(values);
      worst = std::max({worst, ratio, 1.0 / ratio});
      out.expect(ratio >= 0.1 && ratio <= 10.0,
                 fmt::format("{}: final {} / running median = {:.4f}", name, field, ratio));
    }
    out.info(fmt::format("{}: largest final/median deviation factor {:.4f}", name, worst));
  }
  return out;
}

Outcome cross_module_identity() {
  Outcome out;
  std::mt19937_64 rng(20261014);
  std::uniform_real_distribution<double> amp(-0.04, 0.04);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * ref::kPi);
  std::uniform_real_distribution<double> scale(0.3, 4.0);
  std::uniform_real_distribution<double> expo(1.05, 6.0);
  std::uniform_real_distribution<double> grad_value(0.1, 5.0);
  const std::size_t grids[] = {16, 64, 256};
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t m = grids[trial % 3];
    const double s = scale(rng);
    const double a2 = amp(rng), a4 = amp(rng), ph = phase(rng);
    const auto h = SupportFunction::sample(m, [&](double t) {
      return s * (1.0 + a2 * std::cos(2.0 * t + ph) + a4 * std::cos(4.0 * t));
    });
    std::vector<double> grad(m);
    for (double& g : grad) g = grad_value(rng);
    const double p = expo(rng);
    const double mass = mass_functional(h, measure_density(h, grad, p));
    const double gamma = gamma_functional(h, grad, p);
    worst = std::max(worst, ref::relative_error(mass, gamma));
  }
  out.expect(worst <= 1e-12, fmt::format("max relative mismatch {:.3e} over 100 triples (<= 1e-12)", worst));
  return out;
}

Outcome admissibility_checker() {
  Outcome out;
  const auto one = check_admissibility(ref::sample(256, kOne));
  out.expect(std::abs(one.spread_minimum - 4.0) <= 1e-8,
             fmt::format("f = 1: condition (i) minimum {:.15f} (4 +- 1e-8)", one.spread_minimum));
  out.expect(one.all_pass(), "f = 1 passes every condition");
  const auto shifted = check_admissibility(ref::sample(256, [](double t) { return 1.0 + 0.5 * std::cos(t); }));
  out.expect(!shifted.centroid_ok, "f = 1 + 0.5 cos theta fails the centroid condition");
  out.expect(std::abs(shifted.centroid_x - 0.5 * ref::kPi) <= 1e-8,
             fmt::format("centroid x = {:.15f} (pi/2 +- 1e-8)", shifted.centroid_x));
  return out;
}

Outcome rescale_formula() {
  Outcome out;
  const double truth = std::sqrt(std::log(2.0));
  for (int n_r : {kDefaultCollarRings, 256}) {
    auto config = run2_config(2.0);
    config.n_r = n_r;
    config.solver_tol = 1e-12;
    const auto result = run(config);
    const auto scaled = rescale_to_unnormalized(result.final_state, config);
    const double lambda = rescale_factor(result.final_state.eta, 2.0);
    const double err = std::abs(lambda - truth);
    const double scaled_err = std::abs(scaled[0] - truth);
    if (n_r == kDefaultCollarRings) {
      out.info(fmt::format("baseline N_r={}: lambda = {:.9f}, |lambda - sqrt(ln 2)| = {:.3e}", n_r, lambda, err));
    } else {
      out.expect(err <= 1e-6 && scaled_err <= 1e-6,
                 fmt::format("N_r={}: lambda = {:.9f}, |lambda - sqrt(ln 2)| = {:.3e} (<= 1e-6)", n_r, lambda, err));
    }
  }
  for (double p : {1.5, 2.0, 3.0}) {
    auto config = run2_config(p);
    const auto h = SupportFunction::sample(config.grid_m, kEllipse);
    const double exponent = empirical_gamma_exponent(h, config, 1.5);
    out.info(fmt::format("p={}: empirical exponent of Gamma under h -> lambda h: {:.6f} (3 - p = {:.1f})", p,
                         exponent, 3.0 - p));
  }
  return out;
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"radial oracle convergence", radial_oracle_convergence},
      {"disk stationarity", disk_stationarity},
      {"convergence to the normalized equation", convergence_to_disk},
      {"nonconstant target", nonconstant_target},
      {"Gamma conservation", gamma_conservation},
      {"Psi monotonicity", psi_monotonicity},
      {"variational identity probe", variational_identity},
      {"a priori bound monitoring", bound_monitoring},
      {"cross-module identity", cross_module_identity},
      {"admissibility checker", admissibility_checker},
      {"rescale formula", rescale_formula},
  };
  int failures = 0;
  int index = 0;
  for (const auto& [name, check] : criteria) {
    ++index;
    const Stopwatch clock;
    Outcome outcome;
    try {
      outcome = check();
    } catch (const std::exception& err) {
      outcome.expect(false, std::string("exception: ") + err.what());
    }
    if (!outcome.pass) ++failures;
    fmt::print("criterion {:2d} [{}] {} ({:.1f} s)\n", index, outcome.pass ? "PASS" : "FAIL", name, clock.seconds());
    for (const auto& note : outcome.notes) fmt::print("      {}\n", note);
    std::fflush(stdout);
  }
  fmt::print("{} of {} criteria passed\n", index - failures, index);
  return failures == 0 ? 0 : 1;
}
