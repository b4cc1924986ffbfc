#pragma once

#include "glvortex/fem.hpp"

namespace glvortex {

/// A = curl u + grad v with u = 0 on the boundary and v of zero mean.
struct PotentialPair {
  ScalarField u;
  ScalarField v;
};

/// Potentials of the supercurrent, F = curl p + grad q.
struct CurrentPotentials {
  ScalarField p;
  ScalarField q;
};

/// Scalar curl-type operator on an FE function: (d/dy, -d/dx).
QuadVectors curl(const ScalarField& f);

/// curl u + grad v at every quadrature point.
QuadVectors reconstruct(const PotentialPair& pair);

/// Both scalar Poisson problems of the decomposition with the stiffness
/// matrix factored once. Reused by the time stepper.
class Decomposer {
 public:
  explicit Decomposer(SpacePtr space, double tol = kDefaultTol);

  const SpacePtr& space() const { return space_; }
  const SparseMat& stiffness() const { return K_; }

  /// Dirichlet problem (grad s, grad xi) = (G, curl xi), s = 0 on the boundary.
  ScalarField curl_part(const QuadVectors& g, SolveStats* stats = nullptr) const;
  /// Neumann problem (grad s, grad zeta) = (G, grad zeta), zero mean.
  ScalarField gradient_part(const QuadVectors& g, const Vec* guess = nullptr, SolveStats* stats = nullptr) const;

  PotentialPair decompose_vector(const QuadVectors& a) const;
  CurrentPotentials decompose_current(const QuadVectors& f, const Vec* q_guess = nullptr,
                                      SolveStats* p_stats = nullptr, SolveStats* q_stats = nullptr) const;

 private:
  SpacePtr space_;
  SparseMat K_;
  DirichletSolver dirichlet_;
  NeumannSolver neumann_;
};

PotentialPair decompose_vector(const SpacePtr& space, const QuadVectors& a);
CurrentPotentials decompose_current(const SpacePtr& space, const QuadVectors& f);

}  // namespace glvortex
