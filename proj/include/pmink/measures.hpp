#pragma once

#include <span>
#include <string>
#include <vector>

#include "pmink/support_geometry.hpp"

namespace pmink {

/// Density of the p-harmonic measure pushed to the circle of directions,
/// dmu/dtheta = |grad u|^(p-1) b.
struct MeasureDensity {
  std::vector<double> density;
  double total_mass = 0.0;
};

MeasureDensity measure_density(const SupportFunction& h,
                               std::span<const double> grad, double p);

/// integral h dmu.
double mass_functional(const SupportFunction& h, const MeasureDensity& mu);

/// Number of test directions used for the non-concentration condition.
inline constexpr int kAdmissibilityDirections = 64;

struct AdmissibilityReport {
  /// min over test directions zeta of integral |<zeta, xi>| f dtheta.
  double spread_minimum = 0.0;
  bool spread_ok = false;
  double centroid_x = 0.0;
  double centroid_y = 0.0;
  double centroid_tolerance = 0.0;
  bool centroid_ok = false;
  /// Atom condition; grid densities carry no atoms.
  bool atoms_ok = true;
  std::string atoms_note;
  double total_mass = 0.0;

  bool all_pass() const { return spread_ok && centroid_ok && atoms_ok; }
};

/// Checks the three existence conditions on a sampled density (positive
/// samples at theta_k = 2*pi*k/M). The integrals are taken over the
/// trigonometric interpolant of the samples, so band-limited densities are
/// integrated exactly.
AdmissibilityReport check_admissibility(std::span<const double> f);

}  // namespace pmink
