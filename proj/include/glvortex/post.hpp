#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "glvortex/tdgl.hpp"

namespace glvortex {

/// |psi|^2 at every DOF.
Vec density(const ComplexField& psi);

/// Free energy
///   int |(i/kappa) grad psi + A psi|^2 + (|psi|^2 - 1)^2 / 2 + (B - H)^2
/// with A and B given at quadrature points.
double free_energy(const ComplexField& psi, const QuadVectors& A_quad, const QuadScalars& B_quad, double kappa,
                   double H);

/// Connected components of {vertex : value < threshold} over the vertex
/// adjacency graph. Areas use the lumped P1 vertex weights; components are
/// sorted by centroid (x, then y).
struct VortexRegions {
  int count = 0;
  std::vector<Point2> centroids;
  std::vector<double> areas;
  std::vector<std::vector<int>> nodes;
};
VortexRegions vortex_regions(const TriMesh& mesh, const Vec& vertex_values, double threshold);

/// Gauge change (psi, A, phi) -> (psi e^{i kappa chi}, A + grad chi, phi - chi_t).
struct GaugeResult {
  ComplexField psi;
  QuadVectors A;
  ScalarField phi;
};
GaugeResult gauge_transform(const ComplexField& psi, const QuadVectors& A_quad, const ScalarField& phi,
                            const ScalarField& chi, double kappa, const ScalarField* chi_rate = nullptr);

/// ||f - g|| / ||g|| in L2 over {x : subdomain(x)}, integrated on g's mesh
/// with f evaluated by point location. Throws EvaluationError when a
/// quadrature point of g's mesh is not covered by f's mesh.
double compare_fields(const ScalarField& f, const ScalarField& g,
                      const std::function<bool(Point2)>& subdomain = nullptr);

/// Output-side projections and observables for one solver. Holds the mass
/// factorizations it needs.
class PostProcessor {
 public:
  explicit PostProcessor(const TdglSolver& solver);

  /// L2 projection of quadrature values onto the FE space.
  Vec project(const QuadScalars& values) const;

  /// Remark-style B: w + H for hodge with w, else unavailable for hodge;
  /// L2-projected curl of A for gauge solvers.
  Vec magnetic_induction(const SimState& state) const;
  /// B for any state: hodge states without w use the weak curl
  /// (B, chi) = (grad u, grad chi) on interior test functions with B = H on
  /// the boundary.
  Vec induction_any(const SimState& state) const;
  /// E at quadrature points: -curl w - F (hodge, needs w) or the
  /// (A^{n+1} - A^n)/tau estimate (gauge solvers).
  QuadVectors electric_field(const SimState& state) const;
  double energy(const SimState& state) const;

 private:
  const TdglSolver& solver_;
  SpdSolver mass_;
  std::unique_ptr<DirichletSolver> mass_interior_;
};

/// Vertex values written to the snapshot files.
struct FieldSnapshot {
  double t = 0.0;
  SolverKind solver = SolverKind::hodge;
  std::shared_ptr<const TriMesh> mesh;
  Vec re_psi, im_psi, density, B, Ax, Ay;
  std::optional<Vec> Ex, Ey;
};
FieldSnapshot make_snapshot(const PostProcessor& post, const TdglSolver& solver, const SimState& state);

struct Diagnostics {
  double t = 0.0;
  double mean_density = 0.0;
  double min_density = 0.0;
  double max_abs_psi = 0.0;
  double energy = 0.0;
  int vortices = 0;
  int psi_iters = 0;
  int field_iters = 0;
};
/// Vortices are counted with threshold `vortex_fraction` times the largest
/// vertex density.
Diagnostics diagnose(const PostProcessor& post, const SimState& state, double vortex_fraction = 0.1);

}  // namespace glvortex
