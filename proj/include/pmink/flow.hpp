#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "pmink/errors.hpp"
#include "pmink/p_harmonic.hpp"
#include "pmink/support_geometry.hpp"

namespace pmink {

/// Even, strictly positive target density f on the direction grid.
class PrescribedDensity {
 public:
  PrescribedDensity() = default;
  /// Rejects non-positive samples. Antipodal pairs must agree to 1e-12
  /// relative; they are then made bit-exact even.
  explicit PrescribedDensity(std::vector<double> samples);

  template <typename Fn>
  static PrescribedDensity sample(std::size_t m, Fn&& fn) {
    std::vector<double> s(m);
    for (std::size_t k = 0; k < m; ++k) s[k] = fn(SupportFunction::angle(k, m));
    return PrescribedDensity(std::move(s));
  }

  std::size_t size() const noexcept { return samples_.size(); }
  double operator[](std::size_t k) const { return samples_[k]; }
  std::span<const double> samples() const noexcept { return samples_; }

 private:
  std::vector<double> samples_;
};

struct FlowConfig {
  double p = 2.0;
  std::size_t grid_m = kDefaultGridSize;
  double delta = kDefaultCollarDelta;
  int n_r = kDefaultCollarRings;
  double dt_init = 1e-3;
  double dt_min = 1e-8;
  double dt_max = 1e-2;
  double t_max = 30.0;
  double stop_tol = 1e-5;
  double solver_tol = 1e-10;
  PrescribedDensity f;
  SupportFunction h0;
  CollarThickness collar_rule = CollarThickness::EquivalentRadius;
  /// Highest Fourier mode the flow evolves; 0 picks the largest mode that
  /// the explicit integrator resolves stably at dt_max.
  int max_mode = 0;

  /// Throws InvalidInput on inconsistent fields.
  void validate() const;
  int effective_max_mode() const;
};

/// Body at one instant together with every cached quantity of the flow.
struct FlowState {
  SupportFunction h;
  double t = 0.0;
  /// Step size that produced this state (0 for the initial state).
  double dt = 0.0;
  /// Step size the integrator proposes next.
  double dt_next = 0.0;
  CurvatureField curvature;
  std::vector<double> grad;
  std::vector<double> u;
  double thickness = 0.0;
  double gamma = 0.0;
  double f_h_integral = 0.0;
  double eta = 0.0;
  double psi = 0.0;
  /// Time derivative of h actually used by the integrator (band-limited).
  std::vector<double> speed;
  double ma_residual = 0.0;
  double max_grad_h = 0.0;

  double relative_speed() const;
};

struct DiagnosticsRecord {
  double t = 0.0;
  double dt = 0.0;
  double gamma = 0.0;
  double eta = 0.0;
  double psi = 0.0;
  double gamma_drift = 0.0;
  int psi_increase_events = 0;
  double min_b = 0.0;
  double max_b = 0.0;
  double min_h = 0.0;
  double max_h = 0.0;
  double max_grad_h = 0.0;
  double ma_residual = 0.0;
  double relative_speed = 0.0;
  /// |(Gamma_n - Gamma_{n-1})/dt - mean of integral speed dmu| / Gamma.
  double variation_gap = 0.0;
};

class StepFailure : public Error {
 public:
  StepFailure(const std::string& what, DiagnosticsRecord last)
      : Error(what), last_(last) {}
  const DiagnosticsRecord& diagnostics() const noexcept { return last_; }
  /// Records of the accepted steps before the failure (filled by run()).
  const std::vector<DiagnosticsRecord>& history() const noexcept { return history_; }
  void set_history(std::vector<DiagnosticsRecord> history) { history_ = std::move(history); }

 private:
  DiagnosticsRecord last_;
  std::vector<DiagnosticsRecord> history_;
};

/// Gamma = integral h |grad u|^(p-1) b dtheta.
double gamma_functional(const SupportFunction& h, std::span<const double> grad,
                        double p);

/// eta = gamma / integral f h.
double eta_normalizer(double gamma, const SupportFunction& h,
                      const PrescribedDensity& f);

/// Psi = -log gamma + log integral f h.
double psi_functional(double gamma, const SupportFunction& h,
                      const PrescribedDensity& f);

/// dh/dt = h - eta f h / (b |grad u|^(p-1)) at every node.
std::vector<double> flow_speed(const SupportFunction& h, const CurvatureField& b,
                               std::span<const double> grad, double eta,
                               const PrescribedDensity& f, double p);

/// sup |grad^(p-1) b - eta f| / sup |eta f|.
double ma_residual(const FlowState& state, const FlowConfig& config);

struct RunResult {
  FlowState final_state;
  std::vector<DiagnosticsRecord> history;
  bool converged = false;
  int accepted_steps = 0;
  int rejected_steps = 0;
  std::string stop_reason;
};

/// Explicit Heun integrator for the normalized flow. Each stage re-solves
/// the collar p-Laplace problem, warm-started from the previous solution.
class GaussCurvatureFlow {
 public:
  explicit GaussCurvatureFlow(FlowConfig config);

  const FlowConfig& config() const noexcept { return config_; }

  /// All derived quantities of the body `h` at time t.
  FlowState evaluate(const SupportFunction& h, double t,
                     std::span<const double> warm_start = {});

  /// Advances by one accepted step, halving dt on convexity, positivity or
  /// solver failures. Throws StepFailure below dt_min.
  FlowState step(const FlowState& state);

  RunResult run();

  /// Relative gap |dGamma/dt - integral speed dmu| / Gamma at `state`, with
  /// dGamma/dt taken by central differences along the flow direction.
  double variation_check(const FlowState& state, double dt_probe);

  /// Band-limited, even speed of the integrator.
  std::vector<double> integrator_speed(const std::vector<double>& raw) const;

  int solves() const noexcept { return solves_; }
  int rejected_steps() const noexcept { return rejected_; }

 private:
  FlowConfig config_;
  PLaplaceSolver solver_;
  int max_mode_;
  int solves_ = 0;
  int rejected_ = 0;
};

FlowState step(const FlowState& state, const FlowConfig& config);
RunResult run(const FlowConfig& config);
double variation_check(const FlowState& state, const FlowConfig& config,
                       double dt_probe);

/// lambda * h with lambda = eta^(-1/(n+p-2)), n = 2. Requires
/// ma_residual <= residual_threshold.
SupportFunction rescale_to_unnormalized(const FlowState& final_state,
                                        const FlowConfig& config,
                                        double residual_threshold = 1e-3);
double rescale_factor(double eta, double p);

/// d log Gamma / d log lambda measured between h and lambda * h.
double empirical_gamma_exponent(const SupportFunction& h,
                                const FlowConfig& config, double lambda);

DiagnosticsRecord diagnose(const FlowState& state);

}  // namespace pmink
