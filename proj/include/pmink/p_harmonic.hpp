#pragma once

#include <Eigen/Core>

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "pmink/support_geometry.hpp"

namespace pmink {

/// How the collar thickness d is derived from the body.
enum class CollarThickness {
  /// d = delta * min b. Largest collar that is guaranteed embedded.
  MinCurvatureRadius,
  /// d = delta * sqrt(area / pi), the radius of the disk of equal area.
  EquivalentRadius,
};

inline constexpr double kDefaultCollarDelta = 0.3;
inline constexpr int kDefaultCollarRings = 32;

/// Structured annular mesh between the boundary (ring 0) and its inward
/// normal offset at distance `thickness` (ring n_r - 1). Node (j, k) lies at
/// X(theta_k) - (j / (n_r - 1)) * thickness * nu(theta_k).
struct CollarMesh {
  std::vector<Eigen::Vector2d> nodes;
  std::vector<std::array<int, 3>> triangles;
  std::vector<int> outer_ring;
  std::vector<int> inner_ring;
  int n_theta = 0;
  int n_r = 0;
  double thickness = 0.0;

  int node(int ring, int k) const { return ring * n_theta + k; }
  std::size_t node_count() const noexcept { return nodes.size(); }
};

CollarMesh build_collar(const BoundaryCurve& curve, const CurvatureField& b,
                        double delta, int n_r,
                        CollarThickness rule = CollarThickness::MinCurvatureRadius);

/// Throws InvalidMesh unless every triangle has positive signed area.
void validate_mesh(const CollarMesh& mesh);

/// Thickness that `build_collar` would use for the given body.
double collar_thickness(const BoundaryCurve& curve, const CurvatureField& b,
                        double delta, CollarThickness rule);

struct PHarmonicSolution {
  std::vector<double> u;
  double p = 2.0;
  double eps_reg = 0.0;
  double residual_norm = 0.0;
  int iterations = 0;
  int picard_steps = 0;
  std::vector<double> boundary_gradient;
};

/// Newton solver for the regularized p-Laplacian
///   div((|grad u|^2 + eps^2)^((p-2)/2) grad u) = 0
/// with u = 0 on the outer ring and u = 1 on the inner ring, using P1 finite
/// elements. The sparsity pattern and symbolic factorization are kept between
/// calls for meshes of the same topology.
class PLaplaceSolver {
 public:
  struct Options {
    int max_iterations = 60;
    int max_halvings = 8;
    int newton_failures_before_picard = 3;
    /// eps_reg = eps_scale / thickness.
    double eps_scale = 1e-8;
  };

  PLaplaceSolver();
  explicit PLaplaceSolver(Options options);
  ~PLaplaceSolver();
  PLaplaceSolver(PLaplaceSolver&&) noexcept;
  PLaplaceSolver& operator=(PLaplaceSolver&&) noexcept;

  /// `initial` may be empty (ring-linear guess) or a full nodal vector for
  /// the same topology; its boundary values are overwritten.
  PHarmonicSolution solve(const CollarMesh& mesh, double p, double tol,
                          std::span<const double> initial = {});

 private:
  struct Workspace;
  Options options_;
  std::unique_ptr<Workspace> work_;
};

PHarmonicSolution solve_p_laplace(const CollarMesh& mesh, double p, double tol,
                                  std::span<const double> initial = {});

/// |grad u| at the outer ring from the second-order one-sided difference along
/// each radial mesh line. Throws DegenerateGradient on non-positive values.
std::vector<double> boundary_gradient(const PHarmonicSolution& sol,
                                      const CollarMesh& mesh);

/// Ratios |grad u|(x) d(x, boundary) / u(x) over interior collar nodes.
struct GradientBoundReport {
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  /// Mean ratio per interior ring, index 0 is ring 1.
  std::vector<double> ring_mean;
  /// Distance to the boundary of each interior ring.
  std::vector<double> ring_depth;
};

GradientBoundReport gradient_bound_check(const PHarmonicSolution& sol,
                                         const CollarMesh& mesh);

/// Closed-form radially symmetric p-harmonic function on the annulus
/// r0 < |x| < R in R^n with u(R) = 0 and u(r0) = 1.
class RadialOracle {
 public:
  RadialOracle(int n, double p, double outer_radius, double inner_radius);

  double operator()(double r) const;
  double grad_at_outer() const noexcept { return grad_at_outer_; }
  double exponent() const noexcept { return alpha_; }
  bool logarithmic() const noexcept { return logarithmic_; }

 private:
  int n_;
  double p_;
  double outer_;
  double inner_;
  double alpha_ = 0.0;
  bool logarithmic_ = false;
  double grad_at_outer_ = 0.0;
};

/// One-dimensional P1 solve of the radial p-Laplace equation
/// (r^(n-1) |u'|^(p-2) u')' = 0 on [r0, R] with `nodes` equispaced nodes.
struct RadialSolution {
  std::vector<double> r;
  std::vector<double> u;
  double grad_at_outer = 0.0;
  double residual_norm = 0.0;
  int iterations = 0;
};

RadialSolution solve_radial_p_laplace(int n, double p, double outer_radius,
                                      double inner_radius, int nodes,
                                      double tol);

}  // namespace pmink
