#include "pmink/p_harmonic.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "pmink/errors.hpp"

namespace pmink {

double collar_thickness(const BoundaryCurve& curve, const CurvatureField& b,
                        double delta, CollarThickness rule) {
  switch (rule) {
    case CollarThickness::MinCurvatureRadius:
      return delta * b.min_radius();
    case CollarThickness::EquivalentRadius: {
      // h = <X, nu>; area = 1/2 * integral h b.
      std::vector<double> integrand(curve.size());
      for (std::size_t k = 0; k < curve.size(); ++k) {
        integrand[k] = curve.points[k].dot(curve.normals[k]) * b.b[k];
      }
      const double enclosed = 0.5 * integrate(integrand);
      return delta * std::sqrt(enclosed / std::numbers::pi);
    }
  }
  throw InvalidInput("unknown collar thickness rule");
}

CollarMesh build_collar(const BoundaryCurve& curve, const CurvatureField& b,
                        double delta, int n_r, CollarThickness rule) {
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw InvalidInput("collar delta must be positive");
  }
  if (n_r < 4) throw InvalidInput("collar needs at least 4 rings");
  if (curve.size() != b.b.size()) {
    throw InvalidInput("curve and curvature field sizes differ");
  }
  const double d = collar_thickness(curve, b, delta, rule);
  const double min_b = b.min_radius();
  if (d >= min_b) {
    throw CollarFailure("collar thickness " + std::to_string(d) +
                        " reaches the minimal curvature radius " +
                        std::to_string(min_b) + "; use a smaller delta");
  }

  CollarMesh mesh;
  mesh.n_theta = static_cast<int>(curve.size());
  mesh.n_r = n_r;
  mesh.thickness = d;
  mesh.nodes.resize(static_cast<std::size_t>(mesh.n_theta) * n_r);
  for (int j = 0; j < n_r; ++j) {
    const double depth = d * static_cast<double>(j) / (n_r - 1);
    for (int k = 0; k < mesh.n_theta; ++k) {
      mesh.nodes[mesh.node(j, k)] =
          curve.points[k] - depth * curve.normals[k];
    }
  }
  for (int k = 0; k < mesh.n_theta; ++k) {
    mesh.outer_ring.push_back(mesh.node(0, k));
    mesh.inner_ring.push_back(mesh.node(n_r - 1, k));
  }
  mesh.triangles.reserve(2 * static_cast<std::size_t>(mesh.n_theta) * (n_r - 1));
  for (int j = 0; j + 1 < n_r; ++j) {
    for (int k = 0; k < mesh.n_theta; ++k) {
      const int k1 = (k + 1) % mesh.n_theta;
      const int a = mesh.node(j, k);
      const int bb = mesh.node(j, k1);
      const int c = mesh.node(j + 1, k1);
      const int e = mesh.node(j + 1, k);
      mesh.triangles.push_back({a, bb, c});
      mesh.triangles.push_back({a, c, e});
    }
  }
  validate_mesh(mesh);
  return mesh;
}

namespace {

double signed_area(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                   const Eigen::Vector2d& c) {
  const Eigen::Vector2d u = b - a;
  const Eigen::Vector2d v = c - a;
  return 0.5 * (u.x() * v.y() - u.y() * v.x());
}

}  // namespace

void validate_mesh(const CollarMesh& mesh) {
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    const double a =
        signed_area(mesh.nodes[tri[0]], mesh.nodes[tri[1]], mesh.nodes[tri[2]]);
    if (!(a > 0.0)) {
      throw InvalidMesh("triangle " + std::to_string(t) +
                        " has non-positive signed area");
    }
  }
}

// ---------------------------------------------------------------------------

struct PLaplaceSolver::Workspace {
  using SparseMatrix = Eigen::SparseMatrix<double>;

  int n_theta = 0;
  int n_r = 0;
  int free_count = 0;
  std::vector<int> dof;  // node -> free dof or -1
  SparseMatrix matrix;
  // Per triangle, 9 offsets into matrix.valuePtr() (row-major local pairs),
  // -1 where either node is constrained.
  std::vector<std::array<int, 9>> scatter;
  Eigen::SimplicialLDLT<SparseMatrix> ldlt;
  bool analyzed = false;

  // Geometry of the current mesh.
  std::vector<double> areas;
  std::vector<std::array<Eigen::Vector2d, 3>> grads;

  bool matches(const CollarMesh& mesh) const {
    return mesh.n_theta == n_theta && mesh.n_r == n_r;
  }

  explicit Workspace(const CollarMesh& mesh)
      : n_theta(mesh.n_theta), n_r(mesh.n_r) {
    dof.assign(mesh.node_count(), -1);
    int next = 0;
    for (int j = 1; j + 1 < n_r; ++j) {
      for (int k = 0; k < n_theta; ++k) dof[mesh.node(j, k)] = next++;
    }
    free_count = next;

    std::vector<Eigen::Triplet<double>> pattern;
    pattern.reserve(mesh.triangles.size() * 9);
    for (const auto& tri : mesh.triangles) {
      for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
          const int ra = dof[tri[a]];
          const int cb = dof[tri[b]];
          if (ra >= 0 && cb >= 0) pattern.emplace_back(ra, cb, 1.0);
        }
      }
    }
    matrix.resize(free_count, free_count);
    matrix.setFromTriplets(pattern.begin(), pattern.end());
    matrix.makeCompressed();

    scatter.resize(mesh.triangles.size());
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
      const auto& tri = mesh.triangles[t];
      for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
          const int ra = dof[tri[a]];
          const int cb = dof[tri[b]];
          int offset = -1;
          if (ra >= 0 && cb >= 0) {
            const int begin = matrix.outerIndexPtr()[cb];
            const int end = matrix.outerIndexPtr()[cb + 1];
            const int* rows = matrix.innerIndexPtr();
            const int* hit = std::lower_bound(rows + begin, rows + end, ra);
            offset = static_cast<int>(hit - rows);
          }
          scatter[t][3 * a + b] = offset;
        }
      }
    }
  }

  void load_geometry(const CollarMesh& mesh) {
    areas.resize(mesh.triangles.size());
    grads.resize(mesh.triangles.size());
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
      const auto& tri = mesh.triangles[t];
      const Eigen::Vector2d& p0 = mesh.nodes[tri[0]];
      const Eigen::Vector2d& p1 = mesh.nodes[tri[1]];
      const Eigen::Vector2d& p2 = mesh.nodes[tri[2]];
      const double area = signed_area(p0, p1, p2);
      if (!(area > 0.0)) {
        throw InvalidMesh("triangle " + std::to_string(t) +
                          " has non-positive signed area");
      }
      areas[t] = area;
      // Gradient of the hat function at vertex a is the rotated opposite edge.
      const auto rot = [](const Eigen::Vector2d& e) {
        return Eigen::Vector2d(-e.y(), e.x());
      };
      const double inv = 1.0 / (2.0 * area);
      grads[t][0] = rot(p2 - p1) * inv;
      grads[t][1] = rot(p0 - p2) * inv;
      grads[t][2] = rot(p1 - p0) * inv;
    }
  }

  enum class MatrixKind { None, Newton, Picard };

  // Residual of the weak form on free dofs; optionally fills matrix values.
  void assemble(std::span<const double> u, double p, double eps2,
                Eigen::VectorXd& residual, MatrixKind kind,
                const CollarMesh& mesh) {
    residual.setZero(free_count);
    double* values = matrix.valuePtr();
    if (kind != MatrixKind::None) {
      std::fill(values, values + matrix.nonZeros(), 0.0);
    }
    const double half_exp = 0.5 * (p - 2.0);
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
      const auto& tri = mesh.triangles[t];
      const auto& g = grads[t];
      const Eigen::Vector2d grad_u =
          u[tri[0]] * g[0] + u[tri[1]] * g[1] + u[tri[2]] * g[2];
      const double s = grad_u.squaredNorm() + eps2;
      const double coeff = std::pow(s, half_exp);
      const double area = areas[t];
      double proj[3];
      for (int a = 0; a < 3; ++a) {
        proj[a] = g[a].dot(grad_u);
        const int ra = dof[tri[a]];
        if (ra >= 0) residual[ra] += area * coeff * proj[a];
      }
      if (kind == MatrixKind::None) continue;
      const double dcoeff =
          kind == MatrixKind::Newton ? 2.0 * half_exp * coeff / s : 0.0;
      for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
          const int offset = scatter[t][3 * a + b];
          if (offset < 0) continue;
          values[offset] +=
              area * (coeff * g[a].dot(g[b]) + dcoeff * proj[a] * proj[b]);
        }
      }
    }
  }

  Eigen::VectorXd solve_linear(const Eigen::VectorXd& rhs) {
    if (!analyzed) {
      ldlt.analyzePattern(matrix);
      analyzed = true;
    }
    ldlt.factorize(matrix);
    if (ldlt.info() != Eigen::Success) {
      throw SolverFailure("sparse factorization failed", rhs.norm());
    }
    return ldlt.solve(rhs);
  }
};

PLaplaceSolver::PLaplaceSolver() : PLaplaceSolver(Options{}) {}
PLaplaceSolver::PLaplaceSolver(Options options) : options_(options) {}
PLaplaceSolver::~PLaplaceSolver() = default;
PLaplaceSolver::PLaplaceSolver(PLaplaceSolver&&) noexcept = default;
PLaplaceSolver& PLaplaceSolver::operator=(PLaplaceSolver&&) noexcept = default;

PHarmonicSolution PLaplaceSolver::solve(const CollarMesh& mesh, double p,
                                        double tol,
                                        std::span<const double> initial) {
  if (!(p > 1.0) || !std::isfinite(p)) {
    throw InvalidInput("p must lie in (1, inf)");
  }
  if (!(tol > 0.0)) throw InvalidInput("solver tolerance must be positive");
  if (mesh.n_r < 4 || mesh.n_theta < 3 ||
      mesh.node_count() != static_cast<std::size_t>(mesh.n_theta) * mesh.n_r) {
    throw InvalidMesh("collar mesh is not a structured ring grid");
  }
  if (!work_ || !work_->matches(mesh)) {
    work_ = std::make_unique<Workspace>(mesh);
  }
  Workspace& w = *work_;
  w.load_geometry(mesh);

  std::vector<double> u(mesh.node_count());
  if (initial.size() == u.size()) {
    std::copy(initial.begin(), initial.end(), u.begin());
  } else {
    for (int j = 0; j < mesh.n_r; ++j) {
      const double value = static_cast<double>(j) / (mesh.n_r - 1);
      for (int k = 0; k < mesh.n_theta; ++k) u[mesh.node(j, k)] = value;
    }
  }
  for (int k = 0; k < mesh.n_theta; ++k) {
    u[mesh.outer_ring[k]] = 0.0;
    u[mesh.inner_ring[k]] = 1.0;
  }

  PHarmonicSolution sol;
  sol.p = p;
  sol.eps_reg = options_.eps_scale / mesh.thickness;
  const double eps2 = sol.eps_reg * sol.eps_reg;

  using Kind = Workspace::MatrixKind;
  Eigen::VectorXd residual;
  w.assemble(u, p, eps2, residual, Kind::None, mesh);
  double res_norm = residual.norm();
  int newton_failures = 0;
  std::vector<double> trial(u.size());
  Eigen::VectorXd trial_residual;

  const auto apply = [&](const Eigen::VectorXd& step, double alpha,
                         std::vector<double>& out) {
    out = u;
    for (std::size_t n = 0; n < u.size(); ++n) {
      const int d = w.dof[n];
      if (d >= 0) out[n] += alpha * step[d];
    }
  };

  while (!(res_norm <= tol)) {
    if (!std::isfinite(res_norm)) {
      throw SolverFailure("non-finite residual in p-Laplace solve", res_norm);
    }
    if (sol.iterations >= options_.max_iterations) {
      throw SolverFailure("p-Laplace solve did not converge (residual " +
                              std::to_string(res_norm) + ")",
                          res_norm);
    }
    ++sol.iterations;
    bool accepted = false;
    if (newton_failures < options_.newton_failures_before_picard) {
      w.assemble(u, p, eps2, residual, Kind::Newton, mesh);
      const Eigen::VectorXd step = w.solve_linear(-residual);
      double alpha = 1.0;
      for (int halving = 0; halving <= options_.max_halvings; ++halving) {
        apply(step, alpha, trial);
        w.assemble(trial, p, eps2, trial_residual, Kind::None, mesh);
        const double trial_norm = trial_residual.norm();
        if (trial_norm < res_norm || trial_norm <= tol) {
          u.swap(trial);
          res_norm = trial_norm;
          accepted = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!accepted) ++newton_failures;
    }
    if (!accepted) {
      // Frozen-coefficient (Picard) step: the residual is linear in u for
      // fixed coefficients, so one solve gives the new iterate.
      w.assemble(u, p, eps2, residual, Kind::Picard, mesh);
      const Eigen::VectorXd step = w.solve_linear(-residual);
      apply(step, 1.0, trial);
      u.swap(trial);
      w.assemble(u, p, eps2, residual, Kind::None, mesh);
      res_norm = residual.norm();
      ++sol.picard_steps;
    }
  }

  constexpr double kUndershoot = 1e-10;
  for (std::size_t n = 0; n < u.size(); ++n) {
    if (u[n] < -kUndershoot || u[n] > 1.0 + kUndershoot) {
      throw SolverFailure("discrete maximum principle violated at node " +
                              std::to_string(n),
                          res_norm);
    }
  }

  sol.u = std::move(u);
  sol.residual_norm = res_norm;
  sol.boundary_gradient = boundary_gradient(sol, mesh);
  return sol;
}

PHarmonicSolution solve_p_laplace(const CollarMesh& mesh, double p, double tol,
                                  std::span<const double> initial) {
  PLaplaceSolver solver;
  return solver.solve(mesh, p, tol, initial);
}

std::vector<double> boundary_gradient(const PHarmonicSolution& sol,
                                      const CollarMesh& mesh) {
  if (sol.u.size() != mesh.node_count()) {
    throw InvalidInput("solution does not match the collar mesh");
  }
  std::vector<double> grad(mesh.n_theta);
  for (int k = 0; k < mesh.n_theta; ++k) {
    const Eigen::Vector2d& x0 = mesh.nodes[mesh.node(0, k)];
    const double s1 = (mesh.nodes[mesh.node(1, k)] - x0).norm();
    const double s2 = (mesh.nodes[mesh.node(2, k)] - x0).norm();
    const double u0 = sol.u[mesh.node(0, k)];
    const double u1 = sol.u[mesh.node(1, k)];
    const double u2 = sol.u[mesh.node(2, k)];
    // Second-order one-sided difference at depth 0 from depths 0, s1, s2.
    const double g = -(s1 + s2) / (s1 * s2) * u0 +
                     s2 / (s1 * (s2 - s1)) * u1 -
                     s1 / (s2 * (s2 - s1)) * u2;
    if (!(g > 0.0)) {
      throw DegenerateGradient("non-positive boundary gradient at index " +
                               std::to_string(k) +
                               "; the collar is under-resolved");
    }
    grad[k] = g;
  }
  return grad;
}

GradientBoundReport gradient_bound_check(const PHarmonicSolution& sol,
                                         const CollarMesh& mesh) {
  const std::size_t n = mesh.node_count();
  std::vector<Eigen::Vector2d> grad_sum(n, Eigen::Vector2d::Zero());
  std::vector<double> weight(n, 0.0);
  for (const auto& tri : mesh.triangles) {
    const Eigen::Vector2d& p0 = mesh.nodes[tri[0]];
    const Eigen::Vector2d& p1 = mesh.nodes[tri[1]];
    const Eigen::Vector2d& p2 = mesh.nodes[tri[2]];
    const double area = signed_area(p0, p1, p2);
    const auto rot = [](const Eigen::Vector2d& e) {
      return Eigen::Vector2d(-e.y(), e.x());
    };
    const double inv = 1.0 / (2.0 * area);
    const Eigen::Vector2d g = (sol.u[tri[0]] * rot(p2 - p1) +
                               sol.u[tri[1]] * rot(p0 - p2) +
                               sol.u[tri[2]] * rot(p1 - p0)) *
                              inv;
    for (int a = 0; a < 3; ++a) {
      grad_sum[tri[a]] += area * g;
      weight[tri[a]] += area;
    }
  }

  GradientBoundReport report;
  report.min_ratio = std::numeric_limits<double>::infinity();
  report.max_ratio = -std::numeric_limits<double>::infinity();
  for (int j = 1; j + 1 < mesh.n_r; ++j) {
    double ring_sum = 0.0;
    double depth_sum = 0.0;
    for (int k = 0; k < mesh.n_theta; ++k) {
      const int node = mesh.node(j, k);
      const double depth = (mesh.nodes[node] - mesh.nodes[mesh.node(0, k)]).norm();
      const double grad = (grad_sum[node] / weight[node]).norm();
      const double ratio = grad * depth / sol.u[node];
      report.min_ratio = std::min(report.min_ratio, ratio);
      report.max_ratio = std::max(report.max_ratio, ratio);
      ring_sum += ratio;
      depth_sum += depth;
    }
    report.ring_mean.push_back(ring_sum / mesh.n_theta);
    report.ring_depth.push_back(depth_sum / mesh.n_theta);
  }
  return report;
}

}  // namespace pmink
