#include "pmink/flow.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pmink/spectral.hpp"

namespace pmink {

PrescribedDensity::PrescribedDensity(std::vector<double> samples)
    : samples_(std::move(samples)) {
  const std::size_t m = samples_.size();
  if (m < 8 || m % 2 != 0) {
    throw InvalidInput("prescribed density needs an even grid size >= 8");
  }
  double scale = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    if (!std::isfinite(samples_[k]) || !(samples_[k] > 0.0)) {
      throw InvalidInput("prescribed density sample " + std::to_string(k) +
                         " is not positive");
    }
    scale = std::max(scale, samples_[k]);
  }
  const std::size_t half = m / 2;
  for (std::size_t k = 0; k < half; ++k) {
    if (std::abs(samples_[k] - samples_[k + half]) > 1e-12 * scale) {
      throw InvalidInput("prescribed density is not even at index " +
                         std::to_string(k));
    }
    const double avg = 0.5 * (samples_[k] + samples_[k + half]);
    samples_[k] = avg;
    samples_[k + half] = avg;
  }
}

void FlowConfig::validate() const {
  if (!(p > 1.0) || !std::isfinite(p)) throw InvalidInput("p must lie in (1, inf)");
  if (grid_m < 8 || grid_m % 2 != 0) {
    throw InvalidInput("grid_m must be an even integer >= 8");
  }
  if (f.size() != grid_m) throw InvalidInput("f is not sampled on grid_m points");
  if (h0.size() != grid_m) throw InvalidInput("h0 is not sampled on grid_m points");
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidInput("delta must lie in (0, 1)");
  if (n_r < 4) throw InvalidInput("n_r must be at least 4");
  if (!(dt_min > 0.0) || !(dt_min <= dt_init) || !(dt_init <= dt_max) ||
      !std::isfinite(dt_max)) {
    throw InvalidInput("time steps must satisfy 0 < dt_min <= dt_init <= dt_max");
  }
  if (!(t_max >= 0.0)) throw InvalidInput("t_max must be non-negative");
  if (!(stop_tol > 0.0)) throw InvalidInput("stop_tol must be positive");
  if (!(solver_tol > 0.0)) throw InvalidInput("solver_tol must be positive");
  if (max_mode < 0) throw InvalidInput("max_mode must be non-negative");
}

int FlowConfig::effective_max_mode() const {
  const int nyquist_guard = static_cast<int>(grid_m / 2) - 1;
  if (max_mode > 0) return std::min(max_mode, nyquist_guard);
  // Heun is stable for decay rates up to 2/dt; mode k decays at roughly
  // k^2 - 1, so keep (k^2 - 1) * dt_max <= 1.
  const int k = static_cast<int>(std::floor(std::sqrt(1.0 + 1.0 / dt_max)));
  return std::clamp(k, 2, nyquist_guard);
}

double FlowState::relative_speed() const {
  double sup = 0.0;
  for (double s : speed) sup = std::max(sup, std::abs(s));
  return sup / h.max();
}

double gamma_functional(const SupportFunction& h, std::span<const double> grad,
                        double p) {
  const auto field = curvature(h);
  if (grad.size() != h.size()) throw InvalidInput("gradient grid mismatch");
  std::vector<double> integrand(h.size());
  for (std::size_t k = 0; k < h.size(); ++k) {
    integrand[k] = h[k] * (std::pow(grad[k], p - 1.0) * field.b[k]);
  }
  return integrate(integrand);
}

namespace {

double f_h_integral(const SupportFunction& h, const PrescribedDensity& f) {
  if (f.size() != h.size()) throw InvalidInput("density grid mismatch");
  std::vector<double> integrand(h.size());
  for (std::size_t k = 0; k < h.size(); ++k) integrand[k] = f[k] * h[k];
  return integrate(integrand);
}

}  // namespace

double eta_normalizer(double gamma, const SupportFunction& h,
                      const PrescribedDensity& f) {
  const double denom = f_h_integral(h, f);
  if (!(denom > 0.0)) throw InvalidState("integral of f h is not positive");
  return gamma / denom;
}

double psi_functional(double gamma, const SupportFunction& h,
                      const PrescribedDensity& f) {
  if (!(gamma > 0.0)) throw InvalidState("Gamma is not positive");
  const double denom = f_h_integral(h, f);
  if (!(denom > 0.0)) throw InvalidState("integral of f h is not positive");
  return -std::log(gamma) + std::log(denom);
}

std::vector<double> flow_speed(const SupportFunction& h, const CurvatureField& b,
                               std::span<const double> grad, double eta,
                               const PrescribedDensity& f, double p) {
  const std::size_t m = h.size();
  if (b.b.size() != m || grad.size() != m || f.size() != m) {
    throw InvalidInput("flow_speed inputs are on different grids");
  }
  std::vector<double> speed(m);
  for (std::size_t k = 0; k < m; ++k) {
    speed[k] = h[k] - eta * f[k] * h[k] / (b.b[k] * std::pow(grad[k], p - 1.0));
  }
  return speed;
}

namespace {

double residual_of(const CurvatureField& b, std::span<const double> grad,
                   double eta, const PrescribedDensity& f, double p) {
  double sup_r = 0.0;
  double sup_rhs = 0.0;
  for (std::size_t k = 0; k < b.b.size(); ++k) {
    const double rhs = eta * f[k];
    sup_r = std::max(sup_r, std::abs(std::pow(grad[k], p - 1.0) * b.b[k] - rhs));
    sup_rhs = std::max(sup_rhs, std::abs(rhs));
  }
  return sup_r / sup_rhs;
}

}  // namespace

double ma_residual(const FlowState& state, const FlowConfig& config) {
  return residual_of(state.curvature, state.grad, state.eta, config.f, config.p);
}

DiagnosticsRecord diagnose(const FlowState& state) {
  DiagnosticsRecord rec;
  rec.t = state.t;
  rec.dt = state.dt;
  rec.gamma = state.gamma;
  rec.eta = state.eta;
  rec.psi = state.psi;
  rec.min_b = state.curvature.min_radius();
  rec.max_b = state.curvature.max_radius();
  rec.min_h = state.h.min();
  rec.max_h = state.h.max();
  rec.max_grad_h = state.max_grad_h;
  rec.ma_residual = state.ma_residual;
  rec.relative_speed = state.relative_speed();
  return rec;
}

// ---------------------------------------------------------------------------

GaussCurvatureFlow::GaussCurvatureFlow(FlowConfig config)
    : config_(std::move(config)) {
  config_.validate();
  max_mode_ = config_.effective_max_mode();
}

std::vector<double> GaussCurvatureFlow::integrator_speed(
    const std::vector<double>& raw) const {
  auto filtered = spectral::low_pass(raw, max_mode_);
  const std::size_t half = filtered.size() / 2;
  for (std::size_t k = 0; k < half; ++k) {
    const double avg = 0.5 * (filtered[k] + filtered[k + half]);
    filtered[k] = avg;
    filtered[k + half] = avg;
  }
  return filtered;
}

FlowState GaussCurvatureFlow::evaluate(const SupportFunction& h, double t,
                                       std::span<const double> warm_start) {
  FlowState state;
  state.h = h;
  state.t = t;
  state.curvature = curvature(h);
  const auto curve = boundary_curve(h);
  const auto mesh = build_collar(curve, state.curvature, config_.delta,
                                 config_.n_r, config_.collar_rule);
  auto sol = solver_.solve(mesh, config_.p, config_.solver_tol, warm_start);
  ++solves_;
  state.thickness = mesh.thickness;
  state.grad = std::move(sol.boundary_gradient);
  state.u = std::move(sol.u);

  state.gamma = gamma_functional(h, state.grad, config_.p);
  state.f_h_integral = f_h_integral(h, config_.f);
  state.eta = eta_normalizer(state.gamma, h, config_.f);
  state.psi = psi_functional(state.gamma, h, config_.f);
  const auto raw = flow_speed(h, state.curvature, state.grad, state.eta,
                              config_.f, config_.p);
  state.speed = integrator_speed(raw);
  state.ma_residual = residual_of(state.curvature, state.grad, state.eta,
                                  config_.f, config_.p);
  double max_grad = 0.0;
  for (const auto& x : curve.points) max_grad = std::max(max_grad, x.norm());
  state.max_grad_h = max_grad;
  return state;
}

namespace {

SupportFunction advance(const SupportFunction& h, std::span<const double> a,
                        double wa, std::span<const double> b, double wb) {
  std::vector<double> s(h.size());
  for (std::size_t k = 0; k < h.size(); ++k) {
    s[k] = h[k] + wa * a[k] + (b.empty() ? 0.0 : wb * b[k]);
  }
  // Positivity is checked by the SupportFunction constructor.
  return symmetrize(SupportFunction(std::move(s)));
}

}  // namespace

FlowState GaussCurvatureFlow::step(const FlowState& state) {
  double dt = state.dt_next > 0.0 ? state.dt_next : config_.dt_init;
  dt = std::clamp(dt, config_.dt_min, config_.dt_max);
  // Land exactly on t_max.
  const double remaining = config_.t_max - state.t;
  if (remaining > 0.0 && remaining < dt) dt = remaining;
  while (true) {
    try {
      const auto h1 = advance(state.h, state.speed, dt, {}, 0.0);
      const auto stage = evaluate(h1, state.t + dt, state.u);
      const auto h2 =
          advance(state.h, state.speed, 0.5 * dt, stage.speed, 0.5 * dt);
      FlowState next = evaluate(h2, state.t + dt, stage.u);
      next.dt = dt;
      next.dt_next = std::min(1.5 * dt, config_.dt_max);
      return next;
    } catch (const StepFailure&) {
      throw;
    } catch (const Error& err) {
      ++rejected_;
      dt *= 0.5;
      if (dt < config_.dt_min) {
        throw StepFailure(std::string("no admissible step above dt_min: ") +
                              err.what(),
                          diagnose(state));
      }
    }
  }
}

RunResult GaussCurvatureFlow::run() {
  RunResult result;
  FlowState state = evaluate(symmetrize(config_.h0), 0.0);
  state.dt_next = config_.dt_init;
  const double gamma0 = state.gamma;
  DiagnosticsRecord first = diagnose(state);
  result.history.push_back(first);

  int psi_events = 0;
  while (true) {
    if (state.relative_speed() < config_.stop_tol) {
      result.converged = true;
      result.stop_reason = "stationary";
      break;
    }
    if (state.t >= config_.t_max) {
      result.stop_reason = "t_max reached";
      break;
    }
    const FlowState previous = std::move(state);
    try {
      state = step(previous);
    } catch (StepFailure& failure) {
      failure.set_history(std::move(result.history));
      throw;
    }
    ++result.accepted_steps;

    DiagnosticsRecord rec = diagnose(state);
    rec.gamma_drift = (state.gamma - gamma0) / gamma0;
    if (state.psi > previous.psi + 1e-9 * std::abs(previous.psi)) ++psi_events;
    rec.psi_increase_events = psi_events;
    // Both quadratures use the density of their own endpoint.
    const auto moment = [&](const FlowState& s) {
      std::vector<double> integrand(s.h.size());
      for (std::size_t k = 0; k < s.h.size(); ++k) {
        integrand[k] = s.speed[k] * std::pow(s.grad[k], config_.p - 1.0) *
                       s.curvature.b[k];
      }
      return integrate(integrand);
    };
    const double predicted = 0.5 * (moment(previous) + moment(state));
    rec.variation_gap =
        std::abs((state.gamma - previous.gamma) / state.dt - predicted) /
        state.gamma;
    result.history.push_back(rec);
  }
  result.final_state = std::move(state);
  result.rejected_steps = rejected_;
  return result;
}

double GaussCurvatureFlow::variation_check(const FlowState& state,
                                           double dt_probe) {
  if (!(dt_probe > 0.0)) throw InvalidInput("dt_probe must be positive");
  const auto forward = advance(state.h, state.speed, dt_probe, {}, 0.0);
  const auto backward = advance(state.h, state.speed, -dt_probe, {}, 0.0);
  const double gamma_plus = evaluate(forward, state.t, state.u).gamma;
  const double gamma_minus = evaluate(backward, state.t, state.u).gamma;
  const double derivative = (gamma_plus - gamma_minus) / (2.0 * dt_probe);
  std::vector<double> integrand(state.h.size());
  for (std::size_t k = 0; k < state.h.size(); ++k) {
    integrand[k] = state.speed[k] * std::pow(state.grad[k], config_.p - 1.0) *
                   state.curvature.b[k];
  }
  const double predicted = integrate(integrand);
  return std::abs(derivative - predicted) / state.gamma;
}

FlowState step(const FlowState& state, const FlowConfig& config) {
  GaussCurvatureFlow flow(config);
  return flow.step(state);
}

RunResult run(const FlowConfig& config) {
  GaussCurvatureFlow flow(config);
  return flow.run();
}

double variation_check(const FlowState& state, const FlowConfig& config,
                       double dt_probe) {
  GaussCurvatureFlow flow(config);
  return flow.variation_check(state, dt_probe);
}

double rescale_factor(double eta, double p) {
  constexpr int kDimension = 2;
  return std::pow(eta, -1.0 / (kDimension + p - 2.0));
}

SupportFunction rescale_to_unnormalized(const FlowState& final_state,
                                        const FlowConfig& config,
                                        double residual_threshold) {
  const double residual = ma_residual(final_state, config);
  if (!(residual <= residual_threshold)) {
    throw PreconditionError("state is not stationary (residual " +
                            std::to_string(residual) + ")");
  }
  return rescale_factor(final_state.eta, config.p) * final_state.h;
}

double empirical_gamma_exponent(const SupportFunction& h,
                                const FlowConfig& config, double lambda) {
  if (!(lambda > 0.0) || lambda == 1.0) {
    throw InvalidInput("scaling factor must be positive and different from 1");
  }
  GaussCurvatureFlow flow(config);
  const double g0 = flow.evaluate(h, 0.0).gamma;
  const double g1 = flow.evaluate(lambda * h, 0.0).gamma;
  return std::log(g1 / g0) / std::log(lambda);
}

}  // namespace pmink
