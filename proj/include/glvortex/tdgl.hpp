#pragma once

#include <optional>
#include <string>

#include "glvortex/hodge.hpp"

namespace glvortex {

enum class SolverKind { temporal, lorentz, hodge };

std::string to_string(SolverKind kind);
/// Accepts "temporal", "lorentz", "hodge"; throws ConfigError otherwise.
SolverKind parse_solver(const std::string& name);

struct SimParams {
  double eta = 1.0;
  double kappa = 10.0;
  double H = 5.0;
  double tau = 0.1;
  double T = 40.0;
  SolverKind solver = SolverKind::hodge;
  int degree = 1;
  bool track_w = true;
};

void validate(const SimParams& params);

/// Time-stepping state. Hodge states carry (u, v[, w]); gauge states carry
/// the nodal components of A. `A_quad` always holds the current A at the
/// quadrature points of the space.
struct SimState {
  double t = 0.0;
  int step = 0;
  SolverKind solver = SolverKind::hodge;
  ComplexField psi;

  // hodge
  std::optional<PotentialPair> potentials;
  std::optional<ScalarField> w;
  Vec q;  // last q, reused as the Neumann warm start

  // gauge solvers
  Vec Ax, Ay;

  QuadVectors A_quad;
  /// Supercurrent of the last step (zero before the first step).
  QuadVectors F;
  /// (A^{n+1} - A^n) / tau for gauge solvers, zero otherwise.
  QuadVectors A_rate;

  int psi_iterations = 0;
  int field_iterations = 0;
};

/// Re[conj(psi_old) ((i/kappa) grad psi_new + A psi_new)] at quadrature points.
QuadVectors compute_supercurrent(const ComplexField& psi_new, const ComplexField& psi_old, const QuadVectors& A_quad,
                                 double kappa);

/// One solver instance per (space, parameters); holds the factorizations of
/// every matrix that stays fixed over time.
class TdglSolver {
 public:
  TdglSolver(SpacePtr space, SimParams params);

  const SimParams& params() const { return params_; }
  const SpacePtr& space() const { return space_; }
  const SparseMat& mass() const { return M_; }
  const SparseMat& stiffness() const { return K_; }

  /// psi interpolated, A0 decomposed (hodge) or interpolated with A.n = 0
  /// imposed (gauge solvers).
  SimState init_state(const std::function<Complex(Point2)>& psi0,
                      const std::function<Point2(Point2)>& A0 = nullptr) const;

  /// System matrix and right side of the psi equation for the given state.
  SparseMatC psi_matrix(const SimState& state) const;
  CVec psi_rhs(const SimState& state) const;
  ComplexField step_psi(const SimState& state, SolveStats* stats = nullptr) const;

  SimState step_hodge(const SimState& state) const;
  SimState step_temporal(const SimState& state) const;
  SimState step_lorentz(const SimState& state) const;
  /// Dispatches on params().solver.
  SimState step(const SimState& state) const;

  /// Throws unless A_quad equals the field rebuilt from the potentials.
  void check_coherence(const SimState& state) const;
  /// Largest |A.n| over boundary dofs (0 for hodge states).
  double normal_violation(const SimState& state) const;

  /// Reduced basis for nodal vector fields with A.n = 0: 2N x R.
  const SparseMat& vector_basis() const { return P_; }
  QuadVectors eval_vector(const Vec& ax, const Vec& ay) const;
  /// Projects nodal (ax, ay) onto the constrained space.
  void constrain(Vec& ax, Vec& ay) const;

 private:
  void build_vector_system();
  SimState gauge_step(const SimState& state) const;

  SpacePtr space_;
  SimParams params_;
  SparseMat M_;
  SparseMat K_;
  std::unique_ptr<Decomposer> decomposer_;
  std::unique_ptr<SpdSolver> heat_free_;         // M/tau + K, no constraint
  std::unique_ptr<DirichletSolver> heat_zero_;   // M/tau + K, zero trace
  SparseMat P_;
  SparseMat vec_M_;                              // 2N block mass
  std::unique_ptr<SpdSolver> vec_solver_;        // P^T (M/tau + curl curl [+ div div]) P
  Vec vec_H_load_;                               // (H, curl a) for every basis a
};

}  // namespace glvortex
