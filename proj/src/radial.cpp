#include <cmath>
#include <string>
#include <vector>

#include "pmink/errors.hpp"
#include "pmink/p_harmonic.hpp"

namespace pmink {

RadialOracle::RadialOracle(int n, double p, double outer_radius,
                           double inner_radius)
    : n_(n), p_(p), outer_(outer_radius), inner_(inner_radius) {
  if (n < 2) throw InvalidInput("radial oracle needs dimension n >= 2");
  if (!(p > 1.0) || !std::isfinite(p)) {
    throw InvalidInput("radial oracle needs 1 < p < inf");
  }
  if (!(inner_radius > 0.0) || !(inner_radius < outer_radius) ||
      !std::isfinite(outer_radius)) {
    throw InvalidInput("radial oracle needs 0 < r0 < R");
  }
  if (p == static_cast<double>(n)) {
    logarithmic_ = true;
    grad_at_outer_ = 1.0 / (outer_ * std::log(outer_ / inner_));
  } else {
    alpha_ = (p - n) / (p - 1.0);
    const double denom = std::pow(inner_, alpha_) - std::pow(outer_, alpha_);
    grad_at_outer_ =
        std::abs(alpha_) * std::pow(outer_, alpha_ - 1.0) / std::abs(denom);
  }
}

double RadialOracle::operator()(double r) const {
  if (logarithmic_) return std::log(outer_ / r) / std::log(outer_ / inner_);
  return (std::pow(r, alpha_) - std::pow(outer_, alpha_)) /
         (std::pow(inner_, alpha_) - std::pow(outer_, alpha_));
}

RadialSolution solve_radial_p_laplace(int n, double p, double outer_radius,
                                      double inner_radius, int nodes,
                                      double tol) {
  // Validates the parameter domain.
  const RadialOracle domain(n, p, outer_radius, inner_radius);
  (void)domain;
  if (nodes < 4) throw InvalidInput("radial solve needs at least 4 nodes");

  // Node 0 sits on the outer radius; u increases inward.
  const int count = nodes;
  const double length = outer_radius - inner_radius;
  const double step = length / (count - 1);
  RadialSolution sol;
  sol.r.resize(count);
  sol.u.resize(count);
  for (int i = 0; i < count; ++i) {
    sol.r[i] = outer_radius - step * i;
    sol.u[i] = static_cast<double>(i) / (count - 1);
  }
  // Element weights: integral of r^(n-1) over each element.
  std::vector<double> weight(count - 1);
  for (int e = 0; e + 1 < count; ++e) {
    weight[e] = (std::pow(sol.r[e], n) - std::pow(sol.r[e + 1], n)) / n;
  }
  const double eps2 = std::pow(1e-8 / length, 2);
  const double half_exp = 0.5 * (p - 2.0);
  const int interior = count - 2;

  std::vector<double> res(interior), diag(interior), off(interior), rhs;
  const auto assemble = [&](const std::vector<double>& u, bool jacobian) {
    std::fill(res.begin(), res.end(), 0.0);
    if (jacobian) {
      std::fill(diag.begin(), diag.end(), 0.0);
      std::fill(off.begin(), off.end(), 0.0);
    }
    double norm2 = 0.0;
    for (int e = 0; e + 1 < count; ++e) {
      const double q = (u[e + 1] - u[e]) / step;
      const double s = q * q + eps2;
      const double a = std::pow(s, half_exp);
      const double flux = weight[e] * a * q / step;
      // Interior dof index of node i is i - 1.
      if (e >= 1) res[e - 1] -= flux;
      if (e + 1 <= interior) res[e] += flux;
      if (!jacobian) continue;
      const double c = weight[e] * (a + 2.0 * half_exp * a / s * q * q) /
                       (step * step);
      if (e >= 1) diag[e - 1] += c;
      if (e + 1 <= interior) diag[e] += c;
      if (e >= 1 && e + 1 <= interior) off[e] = -c;  // couples e-1 and e
    }
    for (double r : res) norm2 += r * r;
    return std::sqrt(norm2);
  };

  double norm = assemble(sol.u, false);
  std::vector<double> trial(count);
  while (!(norm <= tol)) {
    if (sol.iterations >= 60 || !std::isfinite(norm)) {
      throw SolverFailure("radial p-Laplace solve did not converge", norm);
    }
    ++sol.iterations;
    assemble(sol.u, true);
    // Thomas algorithm on the symmetric tridiagonal Jacobian.
    std::vector<double> c_prime(interior), d_prime(interior);
    for (int i = 0; i < interior; ++i) {
      const double lower = i > 0 ? off[i] : 0.0;
      const double upper = i + 1 < interior ? off[i + 1] : 0.0;
      const double denom = diag[i] - (i > 0 ? lower * c_prime[i - 1] : 0.0);
      c_prime[i] = upper / denom;
      d_prime[i] = (-res[i] - (i > 0 ? lower * d_prime[i - 1] : 0.0)) / denom;
    }
    std::vector<double> delta(interior);
    for (int i = interior - 1; i >= 0; --i) {
      delta[i] = d_prime[i] - (i + 1 < interior ? c_prime[i] * delta[i + 1] : 0.0);
    }
    double alpha = 1.0;
    bool accepted = false;
    for (int halving = 0; halving <= 8; ++halving) {
      trial = sol.u;
      for (int i = 0; i < interior; ++i) trial[i + 1] += alpha * delta[i];
      const double trial_norm = assemble(trial, false);
      if (trial_norm < norm || trial_norm <= tol) {
        sol.u.swap(trial);
        norm = trial_norm;
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      throw SolverFailure("radial Newton line search failed", norm);
    }
  }
  sol.residual_norm = norm;
  sol.grad_at_outer = (-3.0 * sol.u[0] + 4.0 * sol.u[1] - sol.u[2]) / (2.0 * step);
  return sol;
}

}  // namespace pmink
