#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "pmink/spectral.hpp"

namespace pmink {

/// Relative convexity floor: curvature radii at or below
/// kConvexityFloor * max(h) are reported as convexity loss.
inline constexpr double kConvexityFloor = 1e-8;

/// Default angular resolution.
inline constexpr std::size_t kDefaultGridSize = 256;

/// Support function of a planar convex body sampled at theta_k = 2*pi*k/M.
///
/// Construction checks that M is even and at least 8 and that every sample is
/// finite and strictly positive. Origin symmetry is established by
/// `symmetrize`; strict convexity is checked whenever curvature is computed.
class SupportFunction {
 public:
  SupportFunction() = default;
  explicit SupportFunction(std::vector<double> samples);

  /// Samples `fn(theta_k)` on an M-point grid.
  template <typename Fn>
  static SupportFunction sample(std::size_t m, Fn&& fn) {
    std::vector<double> s(m);
    for (std::size_t k = 0; k < m; ++k) s[k] = fn(angle(k, m));
    return SupportFunction(std::move(s));
  }

  static double angle(std::size_t k, std::size_t m) {
    return 2.0 * std::numbers::pi * static_cast<double>(k) /
           static_cast<double>(m);
  }

  std::size_t size() const noexcept { return samples_.size(); }
  double operator[](std::size_t k) const { return samples_[k]; }
  std::span<const double> samples() const noexcept { return samples_; }
  double theta(std::size_t k) const { return angle(k, samples_.size()); }
  double spacing() const {
    return 2.0 * std::numbers::pi / static_cast<double>(samples_.size());
  }
  double min() const;
  double max() const;

  /// Exact antipodal evenness h_k == h_{k+M/2}.
  bool is_even() const;

 private:
  std::vector<double> samples_;
};

SupportFunction operator*(double scale, const SupportFunction& h);

/// Spectral derivatives h', h'' on the grid.
spectral::Derivatives derivatives(const SupportFunction& h);

/// Curvature radius b = h'' + h and curvature kappa = 1/b.
struct CurvatureField {
  std::vector<double> b;
  std::vector<double> kappa;

  double min_radius() const;
  double max_radius() const;
};

/// Throws ConvexityLoss when some b_k <= kConvexityFloor * max(h).
CurvatureField curvature(const SupportFunction& h);

/// Boundary parametrized by the outward normal:
/// X = h nu + h' tau, nu = (cos, sin), tau = (-sin, cos).
struct BoundaryCurve {
  std::vector<Eigen::Vector2d> points;
  std::vector<Eigen::Vector2d> normals;
  std::vector<Eigen::Vector2d> tangents;

  std::size_t size() const noexcept { return points.size(); }
};

BoundaryCurve boundary_curve(const SupportFunction& h);

/// Enclosed area 1/2 * integral of h * b (trapezoid rule).
double area(const SupportFunction& h);

/// Radial function rho(phi_k) sampled at the grid directions phi_k.
std::vector<double> radial_function(const SupportFunction& h);

/// Average of antipodal samples. Idempotent and bit-exact even.
SupportFunction symmetrize(const SupportFunction& h);

/// Trapezoid rule on the uniform periodic grid.
double integrate(std::span<const double> values);

}  // namespace pmink
