#pragma once

#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <complex>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "glvortex/mesh.hpp"

namespace glvortex {

using Complex = std::complex<double>;
using Vec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;

/// Compressed sparse row matrix.
template <class T>
using Csr = Eigen::SparseMatrix<T, Eigen::RowMajor, int>;
using SparseMat = Csr<double>;
using SparseMatC = Csr<Complex>;

/// Values at every (cell, quadrature point), flattened as cell * nq + q.
using QuadScalars = std::vector<double>;
using QuadVectors = std::vector<Point2>;

/// Quadrature on the reference triangle. Weights sum to 1/2, the reference
/// area, and `degree` is the polynomial degree integrated exactly.
struct QuadRule {
  std::vector<std::array<double, 3>> bary;
  std::vector<double> weights;
  int degree = 0;

  int size() const { return static_cast<int>(weights.size()); }

  /// Symmetric rules of degree 1, 2, 4 or 6.
  static QuadRule symmetric(int degree);
  /// Collapsed Gauss-Legendre product rule, exact to degree 2n-2.
  static QuadRule collapsed(int n);
};

/// Default rule for forms of a given element degree (4 for P1, 6 for P2).
QuadRule default_rule(int fe_degree);

/// Local Lagrange basis values at barycentric coordinates; writes 3 (P1) or
/// 6 (P2) entries, vertices first then edges (0-1, 1-2, 2-0).
void lagrange_values(int degree, const std::array<double, 3>& lam, double* out);

/// Boundary classification of a degree of freedom.
struct DofClass {
  NodeKind kind = NodeKind::interior;
  Point2 normal;
};

/// Continuous P1/P2 Lagrange space with precomputed element data and a CSR
/// sparsity pattern. Immutable after construction.
class FeSpace {
 public:
  FeSpace(std::shared_ptr<const TriMesh> mesh, int degree);
  FeSpace(std::shared_ptr<const TriMesh> mesh, int degree, QuadRule rule);

  const TriMesh& mesh() const { return *mesh_; }
  const std::shared_ptr<const TriMesh>& mesh_ptr() const { return mesh_; }
  int degree() const { return degree_; }
  int num_dofs() const { return static_cast<int>(dof_coords_.size()); }
  int num_cells() const { return mesh_->num_triangles(); }
  int dofs_per_cell() const { return nloc_; }
  const std::vector<Point2>& dof_coords() const { return dof_coords_; }
  std::span<const int> cell_dofs(int cell) const {
    return {cell_dofs_.data() + static_cast<std::size_t>(cell) * nloc_, static_cast<std::size_t>(nloc_)};
  }
  const std::vector<int>& boundary_dofs() const { return boundary_dofs_; }
  const std::vector<int>& corner_dofs() const { return corner_dofs_; }
  const std::vector<int>& interior_dofs() const { return interior_dofs_; }
  bool is_boundary_dof(int d) const { return dof_class_[d].kind != NodeKind::interior; }
  const std::vector<DofClass>& dof_class() const { return dof_class_; }

  const QuadRule& rule() const { return rule_; }
  int num_quad() const { return rule_.size(); }
  int quad_size() const { return num_cells() * num_quad(); }
  double cell_area(int cell) const { return area_[cell]; }
  /// Physical quadrature weight (includes the element area).
  double quad_weight(int cell, int q) const { return 2.0 * area_[cell] * rule_.weights[q]; }
  Point2 quad_point(int cell, int q) const;
  /// Local basis i at quadrature point q (identical on every cell).
  double value(int q, int i) const { return vals_[q * nloc_ + i]; }
  Point2 grad(int cell, int q, int i) const {
    return grads_[(static_cast<std::size_t>(cell) * rule_.size() + q) * nloc_ + i];
  }

  /// Field values / gradients at all quadrature points.
  QuadScalars eval(const Vec& coeffs) const;
  QuadVectors eval_grad(const Vec& coeffs) const;
  std::vector<Complex> eval(const CVec& coeffs) const;

  Vec interpolate(const std::function<double(Point2)>& f) const;
  CVec interpolate(const std::function<Complex(Point2)>& f) const;
  QuadVectors sample(const std::function<Point2(Point2)>& f) const;
  QuadScalars sample(const std::function<double(Point2)>& f) const;

  /// Integrals of the basis functions, (1, phi_j).
  const Vec& dof_weights() const { return dof_weights_; }
  double integrate(const QuadScalars& f) const;
  /// Mass-weighted mean of an FE function.
  double mean(const Vec& coeffs) const;

  /// Zero-valued matrix with the space's sparsity pattern.
  const SparseMat& pattern() const { return pattern_; }
  /// Position in the CSR value array of local entry (i, j) of a cell.
  int slot(int cell, int i, int j) const {
    return slots_[(static_cast<std::size_t>(cell) * nloc_ + i) * nloc_ + j];
  }

 private:
  void build_dofs();
  void build_element_data();
  void build_pattern();

  std::shared_ptr<const TriMesh> mesh_;
  int degree_;
  int nloc_;
  QuadRule rule_;
  std::vector<Point2> dof_coords_;
  std::vector<int> cell_dofs_;
  std::vector<DofClass> dof_class_;
  std::vector<int> boundary_dofs_, corner_dofs_, interior_dofs_;
  std::vector<double> area_;
  std::vector<double> vals_;
  std::vector<Point2> grads_;
  Vec dof_weights_;
  SparseMat pattern_;
  std::vector<int> slots_;
};

using SpacePtr = std::shared_ptr<const FeSpace>;

/// Finite element function with real coefficients.
struct ScalarField {
  SpacePtr space;
  Vec coeffs;
};

/// Finite element function with complex coefficients.
struct ComplexField {
  SpacePtr space;
  CVec coeffs;
};

// ---------------------------------------------------------------------------
// Assembly

/// Sums per-cell local matrices into the space's sparsity pattern. `local`
/// is called as local(cell, Eigen::Matrix<T, -1, -1>& K) with K zeroed.
template <class T, class LocalFn>
Csr<T> assemble_cells(const FeSpace& space, LocalFn&& local) {
  Csr<T> A = space.pattern().template cast<T>();
  T* values = A.valuePtr();
  const int n = space.dofs_per_cell();
  Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic> K(n, n);
  for (int c = 0; c < space.num_cells(); ++c) {
    K.setZero();
    local(c, K);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) values[space.slot(c, i, j)] += K(i, j);
    }
  }
  return A;
}

SparseMat assemble_mass(const FeSpace& space);
SparseMat assemble_stiffness(const FeSpace& space);
/// (c phi_k, phi_j) with c sampled at quadrature points.
SparseMat assemble_weighted_mass(const FeSpace& space, const QuadScalars& c);

/// (f, phi_j)
Vec load_values(const FeSpace& space, const QuadScalars& f);
/// (G, grad phi_j)
Vec load_gradient(const FeSpace& space, const QuadVectors& g);
/// (G, curl phi_j) with curl phi = (d phi/dy, -d phi/dx)
Vec load_curl(const FeSpace& space, const QuadVectors& g);

inline Point2 curl_of_grad(Point2 g) { return {g.y, -g.x}; }

// ---------------------------------------------------------------------------
// Linear solvers

struct SolveStats {
  int iterations = 0;
  double residual = 0.0;
  bool used_direct = false;
};

constexpr double kDefaultTol = 1e-10;

/// Preconditioned conjugate gradients; max 10*dim iterations.
Vec solve_spd(const SparseMat& A, const Vec& b, double tol = kDefaultTol, SolveStats* stats = nullptr);

/// Pure-Neumann solve with the constant nullspace deflated inside CG; the
/// result has zero mass-weighted mean.
Vec solve_neumann_meanzero(const SparseMat& A, const Vec& b, const Vec& dof_weights,
                           double tol = kDefaultTol, SolveStats* stats = nullptr);

/// Jacobi-preconditioned BiCGSTAB, warm-started from `guess` when given;
/// falls back to sparse LU on breakdown or stagnation.
CVec solve_complex(const SparseMatC& A, const CVec& b, double tol = kDefaultTol, SolveStats* stats = nullptr,
                   const CVec* guess = nullptr);

struct LinearSystem {
  SparseMat A;
  Vec b;
};

/// Symmetric elimination of Dirichlet DOFs: rows and columns of `dofs` are
/// replaced by identity, and their coupling moved to the right-hand side.
/// `values[k]` is the value prescribed at `dofs[k]`.
LinearSystem constrain_dirichlet(const FeSpace& space, const SparseMat& A, const Vec& b,
                                 std::span<const int> dofs, const Vec& values);

/// Sparse Cholesky factorization reused across right-hand sides; every solve
/// is checked against the relative-residual tolerance.
class SpdSolver {
 public:
  explicit SpdSolver(const SparseMat& A, double tol = kDefaultTol);
  Vec solve(const Vec& b, SolveStats* stats = nullptr) const;
  const SparseMat& matrix() const { return A_; }

 private:
  using Factor = Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>;
  SparseMat A_;
  double tol_;
  std::shared_ptr<Factor> factor_;
};

/// Homogeneous-Dirichlet solve on a fixed matrix, via symmetric elimination
/// and a cached factorization.
class DirichletSolver {
 public:
  DirichletSolver(const FeSpace& space, const SparseMat& A, std::vector<int> dofs, double tol = kDefaultTol);
  /// Solves with zero values at the constrained DOFs; b entries there are ignored.
  Vec solve(const Vec& b, SolveStats* stats = nullptr) const;

 private:
  std::vector<int> dofs_;
  std::unique_ptr<SpdSolver> solver_;
};

/// Cached-preconditioner version of solve_neumann_meanzero. The
/// preconditioner is a sparse factorization of A plus a tiny lumped-mass
/// shift.
class NeumannSolver {
 public:
  NeumannSolver(const SparseMat& A, Vec dof_weights, double tol = kDefaultTol);
  /// `scale` is a reference magnitude for b (e.g. the L2 norm of the source
  /// field); the compatibility test uses max(|b|, scale) so that a right
  /// side made only of rounding noise is not rejected.
  Vec solve(const Vec& b, const Vec* guess = nullptr, SolveStats* stats = nullptr, double scale = 0.0) const;
  /// Constant component of b relative to max(|b|, scale).
  static double compatibility_residual(const Vec& b, double scale = 0.0);

 private:
  using Precond = Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>;
  SparseMat A_;
  Vec weights_;
  double tol_;
  std::shared_ptr<Precond> precond_;
};

// ---------------------------------------------------------------------------
// Point location

/// Bucket-grid triangle search.
class PointLocator {
 public:
  explicit PointLocator(std::shared_ptr<const TriMesh> mesh);
  struct Hit {
    int cell;
    std::array<double, 3> bary;
  };
  /// Containing triangle, accepting points up to `tol` outside it.
  std::optional<Hit> locate(Point2 p, double tol = 1e-10) const;

 private:
  std::shared_ptr<const TriMesh> mesh_;
  double x0_, y0_, dx_, dy_;
  int nx_, ny_;
  std::vector<std::vector<int>> buckets_;
};

/// Value of an FE function at an arbitrary point; throws EvaluationError
/// when the point lies outside the mesh by more than `tol`.
double evaluate_at(const ScalarField& f, const PointLocator& locator, Point2 p, double tol = 1e-10);

}  // namespace glvortex
