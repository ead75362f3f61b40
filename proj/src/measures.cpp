#include "pmink/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "pmink/errors.hpp"
#include "pmink/spectral.hpp"

namespace pmink {

MeasureDensity measure_density(const SupportFunction& h,
                               std::span<const double> grad, double p) {
  if (grad.size() != h.size()) throw InvalidInput("gradient grid mismatch");
  const auto field = curvature(h);
  MeasureDensity mu;
  mu.density.resize(h.size());
  for (std::size_t k = 0; k < h.size(); ++k) {
    mu.density[k] = std::pow(grad[k], p - 1.0) * field.b[k];
  }
  mu.total_mass = integrate(mu.density);
  return mu;
}

double mass_functional(const SupportFunction& h, const MeasureDensity& mu) {
  if (mu.density.size() != h.size()) throw InvalidInput("density grid mismatch");
  std::vector<double> integrand(h.size());
  for (std::size_t k = 0; k < h.size(); ++k) integrand[k] = h[k] * mu.density[k];
  return integrate(integrand);
}

AdmissibilityReport check_admissibility(std::span<const double> f) {
  const std::size_t m = f.size();
  if (m < 8 || m % 2 != 0) {
    throw InvalidInput("density needs an even sample count >= 8");
  }
  for (std::size_t k = 0; k < m; ++k) {
    if (!std::isfinite(f[k]) || !(f[k] > 0.0)) {
      throw InvalidInput("density sample " + std::to_string(k) +
                         " is not positive");
    }
  }
  AdmissibilityReport report;
  report.total_mass = integrate(f);

  // f = a0 + sum_k (a_k cos k theta + b_k sin k theta). Using
  // |cos phi| = 2/pi + (4/pi) sum_j (-1)^(j+1) cos(2 j phi) / (4 j^2 - 1),
  // integral |cos(theta - zeta)| f dtheta
  //   = 4 a0 + 4 sum_j (-1)^(j+1) (a_2j cos 2j zeta + b_2j sin 2j zeta)
  //                               / (4 j^2 - 1).
  const auto modes = spectral::forward(f);
  const double inv_m = 1.0 / static_cast<double>(m);
  const std::size_t nyquist = m / 2;
  const double a0 = modes[0].real() * inv_m;
  report.spread_minimum = std::numeric_limits<double>::infinity();
  for (int dir = 0; dir < kAdmissibilityDirections; ++dir) {
    const double zeta = 2.0 * std::numbers::pi * dir / kAdmissibilityDirections;
    double value = 4.0 * a0;
    for (std::size_t k = 2; k <= nyquist; k += 2) {
      const double weight = (k == nyquist ? 1.0 : 2.0) * inv_m;
      const double ak = weight * modes[k].real();
      const double bk = -weight * modes[k].imag();
      const double j = static_cast<double>(k / 2);
      const double sign = ((k / 2) % 2 == 1) ? 1.0 : -1.0;
      const double kz = static_cast<double>(k) * zeta;
      value += 4.0 * sign * (ak * std::cos(kz) + bk * std::sin(kz)) /
               (4.0 * j * j - 1.0);
    }
    report.spread_minimum = std::min(report.spread_minimum, value);
  }
  report.spread_ok = report.spread_minimum > 0.0;

  std::vector<double> cx(m), cy(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double theta = SupportFunction::angle(k, m);
    cx[k] = std::cos(theta) * f[k];
    cy[k] = std::sin(theta) * f[k];
  }
  report.centroid_x = integrate(cx);
  report.centroid_y = integrate(cy);
  report.centroid_tolerance = 1e-10 * report.total_mass;
  report.centroid_ok = std::hypot(report.centroid_x, report.centroid_y) <=
                       report.centroid_tolerance;

  report.atoms_ok = true;
  report.atoms_note =
      "absolutely continuous density: no atoms, condition holds vacuously";
  return report;
}

}  // namespace pmink
