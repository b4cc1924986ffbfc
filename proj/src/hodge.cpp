#include "glvortex/hodge.hpp"

#include "glvortex/error.hpp"

namespace glvortex {

QuadVectors curl(const ScalarField& f) {
  QuadVectors g = f.space->eval_grad(f.coeffs);
  for (auto& x : g) x = curl_of_grad(x);
  return g;
}

QuadVectors reconstruct(const PotentialPair& pair) {
  if (pair.u.space != pair.v.space) throw InvalidSpec("reconstruct: potentials live on different spaces");
  QuadVectors a = curl(pair.u);
  const QuadVectors gv = pair.v.space->eval_grad(pair.v.coeffs);
  for (std::size_t k = 0; k < a.size(); ++k) a[k] = a[k] + gv[k];
  return a;
}

Decomposer::Decomposer(SpacePtr space, double tol)
    : space_(std::move(space)),
      K_(assemble_stiffness(*space_)),
      dirichlet_(*space_, K_, space_->boundary_dofs(), tol),
      neumann_(K_, space_->dof_weights(), tol) {}

ScalarField Decomposer::curl_part(const QuadVectors& g, SolveStats* stats) const {
  return {space_, dirichlet_.solve(load_curl(*space_, g), stats)};
}

ScalarField Decomposer::gradient_part(const QuadVectors& g, const Vec* guess, SolveStats* stats) const {
  QuadScalars sq(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) sq[k] = dot(g[k], g[k]);
  const double scale = std::sqrt(space_->integrate(sq));
  return {space_, neumann_.solve(load_gradient(*space_, g), guess, stats, scale)};
}

PotentialPair Decomposer::decompose_vector(const QuadVectors& a) const {
  return {curl_part(a), gradient_part(a)};
}

CurrentPotentials Decomposer::decompose_current(const QuadVectors& f, const Vec* q_guess, SolveStats* p_stats,
                                                SolveStats* q_stats) const {
  return {curl_part(f, p_stats), gradient_part(f, q_guess, q_stats)};
}

PotentialPair decompose_vector(const SpacePtr& space, const QuadVectors& a) {
  return Decomposer(space).decompose_vector(a);
}

CurrentPotentials decompose_current(const SpacePtr& space, const QuadVectors& f) {
  return Decomposer(space).decompose_current(f);
}

}  // namespace glvortex
