#include <Eigen/SparseLU>
#include <algorithm>

#include "glvortex/error.hpp"
#include "glvortex/fem.hpp"

namespace glvortex {

namespace {

template <class V>
double relative_residual(const V& r, const V& b) {
  const double nb = b.norm();
  return nb > 0.0 ? r.norm() / nb : r.norm();
}

}  // namespace

Vec solve_spd(const SparseMat& A, const Vec& b, double tol, SolveStats* stats) {
  if (A.rows() != A.cols() || A.rows() != b.size()) throw InvalidSpec("solve_spd: dimension mismatch");
  if (b.norm() == 0.0) {
    if (stats) *stats = {};
    return Vec::Zero(b.size());
  }
  const Eigen::SparseMatrix<double> Ac = A;
  Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper,
                           Eigen::IncompleteCholesky<double, Eigen::Lower, Eigen::AMDOrdering<int>>>
      cg;
  cg.setTolerance(tol);
  cg.setMaxIterations(std::max<Eigen::Index>(10 * A.rows(), 10));
  cg.compute(Ac);
  Vec x = cg.solve(b);
  const double res = relative_residual(Vec(b - Ac * x), b);
  if (stats) *stats = {static_cast<int>(cg.iterations()), res, false};
  if (!(res <= tol) || !x.allFinite()) {
    throw SolverError("conjugate gradients did not converge in " + std::to_string(cg.iterations()) +
                          " iterations",
                      res);
  }
  return x;
}

Vec solve_neumann_meanzero(const SparseMat& A, const Vec& b, const Vec& dof_weights, double tol,
                           SolveStats* stats) {
  return NeumannSolver(A, dof_weights, tol).solve(b, nullptr, stats);
}

CVec solve_complex(const SparseMatC& A, const CVec& b, double tol, SolveStats* stats, const CVec* guess) {
  if (A.rows() != A.cols() || A.rows() != b.size()) throw InvalidSpec("solve_complex: dimension mismatch");
  if (b.norm() == 0.0) {
    // still reject singular matrices so that a zero right side cannot hide them
    for (Eigen::Index r = 0; r < A.rows(); ++r) {
      bool any = false;
      for (SparseMatC::InnerIterator it(A, r); it; ++it) any = any || it.value() != Complex(0.0);
      if (!any) throw SolverError("complex system has an empty row " + std::to_string(r), 0.0);
    }
    if (stats) *stats = {};
    return CVec::Zero(b.size());
  }
  {
    Eigen::BiCGSTAB<SparseMatC, Eigen::DiagonalPreconditioner<Complex>> it;
    it.setTolerance(tol * 0.5);
    it.setMaxIterations(std::max<Eigen::Index>(std::min<Eigen::Index>(A.rows(), 500), 50));
    it.compute(A);
    if (it.info() == Eigen::Success) {
      CVec x = guess ? CVec(it.solveWithGuess(b, *guess)) : CVec(it.solve(b));
      if (x.allFinite()) {
        const double res = relative_residual(CVec(b - A * x), b);
        if (res <= tol) {
          if (stats) *stats = {static_cast<int>(it.iterations()), res, false};
          return x;
        }
      }
    }
  }
  // breakdown or stagnation: direct factorization
  const Eigen::SparseMatrix<Complex> Ac = A;
  Eigen::SparseLU<Eigen::SparseMatrix<Complex>, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(Ac);
  if (lu.info() != Eigen::Success) throw SolverError("complex system is singular: " + lu.lastErrorMessage(), 1.0);
  CVec x = lu.solve(b);
  const double res = x.allFinite() ? relative_residual(CVec(b - A * x), b) : 1.0;
  if (stats) *stats = {0, res, true};
  if (!(res <= tol)) throw SolverError("complex direct solve failed the residual check", res);
  return x;
}

LinearSystem constrain_dirichlet(const FeSpace& space, const SparseMat& A, const Vec& b,
                                 std::span<const int> dofs, const Vec& values) {
  if (static_cast<Eigen::Index>(dofs.size()) != values.size()) {
    throw InvalidSpec("constrain_dirichlet: one value per constrained DOF required");
  }
  const Eigen::Index n = A.rows();
  std::vector<char> fixed(n, 0);
  Vec full = Vec::Zero(n);
  for (std::size_t k = 0; k < dofs.size(); ++k) {
    const int d = dofs[k];
    if (d < 0 || d >= n || !space.is_boundary_dof(d)) {
      throw InvalidSpec("constrain_dirichlet: DOF " + std::to_string(d) + " is not a boundary DOF");
    }
    fixed[d] = 1;
    full[d] = values[k];
  }
  LinearSystem out{A, b};
  out.b -= A * full;
  for (Eigen::Index r = 0; r < n; ++r) {
    for (SparseMat::InnerIterator it(out.A, r); it; ++it) {
      if (fixed[r] || fixed[it.col()]) it.valueRef() = (r == it.col() && fixed[r]) ? 1.0 : 0.0;
    }
  }
  for (Eigen::Index r = 0; r < n; ++r) {
    if (fixed[r]) out.b[r] = full[r];
  }
  return out;
}

SpdSolver::SpdSolver(const SparseMat& A, double tol) : A_(A), tol_(tol), factor_(std::make_shared<Factor>()) {
  factor_->compute(Eigen::SparseMatrix<double>(A_));
  if (factor_->info() != Eigen::Success) throw SolverError("sparse Cholesky factorization failed", 1.0);
}

Vec SpdSolver::solve(const Vec& b, SolveStats* stats) const {
  Vec x = factor_->solve(b);
  double res = relative_residual(Vec(b - A_ * x), b);
  int refinements = 0;
  while (!(res <= tol_) && refinements < 3 && x.allFinite()) {
    x += factor_->solve(Vec(b - A_ * x));
    res = relative_residual(Vec(b - A_ * x), b);
    ++refinements;
  }
  if (stats) *stats = {refinements, res, true};
  if (!(res <= tol_)) throw SolverError("cached Cholesky solve failed the residual check", res);
  return x;
}

DirichletSolver::DirichletSolver(const FeSpace& space, const SparseMat& A, std::vector<int> dofs, double tol)
    : dofs_(std::move(dofs)) {
  const auto sys = constrain_dirichlet(space, A, Vec::Zero(A.rows()), dofs_, Vec::Zero(dofs_.size()));
  solver_ = std::make_unique<SpdSolver>(sys.A, tol);
}

Vec DirichletSolver::solve(const Vec& b, SolveStats* stats) const {
  Vec rhs = b;
  for (int d : dofs_) rhs[d] = 0.0;
  if (rhs.norm() == 0.0) {
    if (stats) *stats = {};
    return Vec::Zero(b.size());
  }
  return solver_->solve(rhs, stats);
}

NeumannSolver::NeumannSolver(const SparseMat& A, Vec dof_weights, double tol)
    : A_(A), weights_(std::move(dof_weights)), tol_(tol), precond_(std::make_shared<Precond>()) {
  if (A.rows() != A.cols() || A.rows() != weights_.size()) {
    throw InvalidSpec("NeumannSolver: dimension mismatch");
  }
  // A + eps D with D the lumped mass: exact on everything but the constants,
  // which the iteration deflates anyway
  const double ratio = A_.diagonal().maxCoeff() / weights_.maxCoeff();
  Eigen::SparseMatrix<double> shifted = A_;
  for (Eigen::Index i = 0; i < shifted.rows(); ++i) shifted.coeffRef(i, i) += 1e-8 * ratio * weights_[i];
  precond_->compute(shifted);
  if (precond_->info() != Eigen::Success) throw SolverError("Neumann preconditioner factorization failed", 1.0);
}

double NeumannSolver::compatibility_residual(const Vec& b, double scale) {
  const double ref = std::max(b.norm(), scale);
  if (ref == 0.0) return 0.0;
  return std::abs(b.sum()) / std::sqrt(static_cast<double>(b.size())) / ref;
}

Vec NeumannSolver::solve(const Vec& b_in, const Vec* guess, SolveStats* stats, double scale) const {
  const Eigen::Index n = b_in.size();
  const double compat = compatibility_residual(b_in, scale);
  if (compat > 1e-10) {
    throw CompatibilityError("pure-Neumann right-hand side is not orthogonal to constants", compat);
  }
  const auto project = [n](Vec& v) { v.array() -= v.sum() / static_cast<double>(n); };
  Vec b = b_in;
  project(b);
  if (b.norm() == 0.0) {
    if (stats) *stats = {};
    return Vec::Zero(n);
  }
  Vec x = guess ? *guess : Vec::Zero(n);
  project(x);
  Vec r = b - A_ * x;
  project(r);
  const double target = tol_ * b.norm();
  int it = 0;
  const int max_it = static_cast<int>(std::max<Eigen::Index>(10 * n, 10));
  if (r.norm() > target) {
    Vec z = precond_->solve(r);
    project(z);
    Vec p = z;
    double rz = r.dot(z);
    while (it < max_it) {
      ++it;
      const Vec Ap = A_ * p;
      const double alpha = rz / p.dot(Ap);
      x += alpha * p;
      r -= alpha * Ap;
      if (r.norm() <= target) break;
      z = precond_->solve(r);
      project(z);
      const double rz_new = r.dot(z);
      p = z + (rz_new / rz) * p;
      rz = rz_new;
    }
  }
  // mean-zero representative with respect to the mass-weighted mean
  x.array() -= weights_.dot(x) / weights_.sum();
  Vec true_r = b - A_ * x;
  const double res = relative_residual(true_r, b);
  if (stats) *stats = {it, res, false};
  if (!(res <= tol_ * 10.0) || !x.allFinite()) {
    throw SolverError("deflated conjugate gradients did not converge", res);
  }
  return x;
}

}  // namespace glvortex
