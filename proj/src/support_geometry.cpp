#include "pmink/support_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pmink/errors.hpp"

namespace pmink {

SupportFunction::SupportFunction(std::vector<double> samples)
    : samples_(std::move(samples)) {
  const std::size_t m = samples_.size();
  if (m < 8 || m % 2 != 0) {
    throw InvalidInput("support function needs an even grid size >= 8, got " +
                       std::to_string(m));
  }
  for (std::size_t k = 0; k < m; ++k) {
    if (!std::isfinite(samples_[k])) {
      throw InvalidInput("support function sample " + std::to_string(k) +
                         " is not finite");
    }
    if (samples_[k] <= 0.0) {
      throw InvalidInput("support function sample " + std::to_string(k) +
                         " is not positive");
    }
  }
}

double SupportFunction::min() const {
  return *std::min_element(samples_.begin(), samples_.end());
}

double SupportFunction::max() const {
  return *std::max_element(samples_.begin(), samples_.end());
}

bool SupportFunction::is_even() const {
  const std::size_t half = samples_.size() / 2;
  for (std::size_t k = 0; k < half; ++k) {
    if (samples_[k] != samples_[k + half]) return false;
  }
  return true;
}

SupportFunction operator*(double scale, const SupportFunction& h) {
  std::vector<double> s(h.samples().begin(), h.samples().end());
  for (double& v : s) v *= scale;
  return SupportFunction(std::move(s));
}

spectral::Derivatives derivatives(const SupportFunction& h) {
  auto d = spectral::differentiate(h.samples());
  if (h.is_even()) {
    // Derivatives of antipodally even data are even; remove FFT round-off.
    const std::size_t half = h.size() / 2;
    for (auto* v : {&d.first, &d.second}) {
      for (std::size_t k = 0; k < half; ++k) {
        const double avg = 0.5 * ((*v)[k] + (*v)[k + half]);
        (*v)[k] = avg;
        (*v)[k + half] = avg;
      }
    }
  }
  return d;
}

double CurvatureField::min_radius() const {
  return *std::min_element(b.begin(), b.end());
}

double CurvatureField::max_radius() const {
  return *std::max_element(b.begin(), b.end());
}

CurvatureField curvature(const SupportFunction& h) {
  const auto d = derivatives(h);
  const std::size_t m = h.size();
  const double floor = kConvexityFloor * h.max();
  CurvatureField field;
  field.b.resize(m);
  field.kappa.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double b = d.second[k] + h[k];
    if (!(b > floor)) throw ConvexityLoss(k, b);
    field.b[k] = b;
    field.kappa[k] = 1.0 / b;
  }
  return field;
}

BoundaryCurve boundary_curve(const SupportFunction& h) {
  // Validates convexity before the parametrization is trusted.
  (void)curvature(h);
  const auto d = derivatives(h);
  const std::size_t m = h.size();
  BoundaryCurve curve;
  curve.points.resize(m);
  curve.normals.resize(m);
  curve.tangents.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double c = std::cos(h.theta(k));
    const double s = std::sin(h.theta(k));
    const Eigen::Vector2d nu(c, s);
    const Eigen::Vector2d tau(-s, c);
    curve.normals[k] = nu;
    curve.tangents[k] = tau;
    curve.points[k] = h[k] * nu + d.first[k] * tau;
  }
  return curve;
}

double integrate(std::span<const double> values) {
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum * 2.0 * std::numbers::pi / static_cast<double>(values.size());
}

double area(const SupportFunction& h) {
  const auto field = curvature(h);
  std::vector<double> integrand(h.size());
  for (std::size_t k = 0; k < h.size(); ++k) integrand[k] = h[k] * field.b[k];
  return 0.5 * integrate(integrand);
}

std::vector<double> radial_function(const SupportFunction& h) {
  (void)curvature(h);
  const spectral::Interpolant interp(h.samples());
  const std::size_t m = h.size();
  std::vector<double> rho(m);
  for (std::size_t k = 0; k < m; ++k) {
    // The polar angle of X(theta) is theta + atan2(h', h), strictly
    // increasing for convex bodies; Newton solves for the normal angle that
    // points X along phi.
    const double phi = h.theta(k);
    double theta = phi;
    for (int it = 0; it < 50; ++it) {
      const auto jet = interp(theta);
      const double offset = std::atan2(jet.first, jet.value);
      const double residual = theta + offset - phi;
      const double denom = jet.value * jet.value + jet.first * jet.first;
      const double slope = jet.value * (jet.value + jet.second) / denom;
      const double step = residual / slope;
      theta -= std::clamp(step, -0.5, 0.5);
      if (std::abs(step) < 1e-15) break;
    }
    const auto jet = interp(theta);
    rho[k] = std::hypot(jet.value, jet.first);
  }
  return rho;
}

SupportFunction symmetrize(const SupportFunction& h) {
  const std::size_t m = h.size();
  const std::size_t half = m / 2;
  std::vector<double> s(m);
  for (std::size_t k = 0; k < half; ++k) {
    const double avg = 0.5 * (h[k] + h[k + half]);
    s[k] = avg;
    s[k + half] = avg;
  }
  return SupportFunction(std::move(s));
}

}  // namespace pmink
