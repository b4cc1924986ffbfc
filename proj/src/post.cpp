#include "glvortex/post.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "glvortex/error.hpp"

namespace glvortex {

namespace {

int find_root(std::vector<int>& parent, int i) {
  while (parent[i] != i) {
    parent[i] = parent[parent[i]];
    i = parent[i];
  }
  return i;
}

QuadScalars component(const QuadVectors& v, bool y) {
  QuadScalars out(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) out[k] = y ? v[k].y : v[k].x;
  return out;
}

Vec vertex_values(const Vec& dofs, int num_nodes) { return dofs.head(num_nodes); }

}  // namespace

Vec density(const ComplexField& psi) { return psi.coeffs.cwiseAbs2(); }

double free_energy(const ComplexField& psi, const QuadVectors& A_quad, const QuadScalars& B_quad, double kappa,
                   double H) {
  const FeSpace& s = *psi.space;
  const Vec re = psi.coeffs.real(), im = psi.coeffs.imag();
  const auto gr = s.eval_grad(re);
  const auto gi = s.eval_grad(im);
  const auto v = s.eval(psi.coeffs);
  QuadScalars e(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) {
    // (i/kappa) grad psi + A psi = (-gi/kappa + A re) + i (gr/kappa + A im)
    const Point2 zr = (-1.0 / kappa) * gi[k] + v[k].real() * A_quad[k];
    const Point2 zi = (1.0 / kappa) * gr[k] + v[k].imag() * A_quad[k];
    const double rho = std::norm(v[k]);
    const double b = B_quad[k] - H;
    e[k] = dot(zr, zr) + dot(zi, zi) + 0.5 * (rho - 1.0) * (rho - 1.0) + b * b;
  }
  return s.integrate(e);
}

VortexRegions vortex_regions(const TriMesh& mesh, const Vec& vals, double threshold) {
  const int n = mesh.num_nodes();
  if (vals.size() < n) throw InvalidSpec("vortex_regions: one value per vertex required");
  std::vector<double> weight(n, 0.0);
  for (int c = 0; c < mesh.num_triangles(); ++c) {
    for (int v : mesh.triangles()[c]) weight[v] += mesh.signed_area(c) / 3.0;
  }
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  for (const auto& e : mesh.edges()) {
    if (vals[e[0]] < threshold && vals[e[1]] < threshold) {
      parent[find_root(parent, e[0])] = find_root(parent, e[1]);
    }
  }
  std::vector<int> index(n, -1);
  std::vector<std::vector<int>> comps;
  for (int v = 0; v < n; ++v) {
    if (!(vals[v] < threshold)) continue;
    const int r = find_root(parent, v);
    if (index[r] < 0) {
      index[r] = static_cast<int>(comps.size());
      comps.emplace_back();
    }
    comps[index[r]].push_back(v);
  }
  struct Item {
    Point2 c;
    double area;
    std::vector<int> nodes;
  };
  std::vector<Item> items;
  for (auto& nodes : comps) {
    double area = 0.0;
    Point2 m;
    for (int v : nodes) {
      area += weight[v];
      m = m + weight[v] * mesh.nodes()[v];
    }
    items.push_back({(1.0 / area) * m, area, std::move(nodes)});
  }
  std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
    return a.c.x != b.c.x ? a.c.x < b.c.x : a.c.y < b.c.y;
  });
  VortexRegions out;
  out.count = static_cast<int>(items.size());
  for (auto& it : items) {
    out.centroids.push_back(it.c);
    out.areas.push_back(it.area);
    out.nodes.push_back(std::move(it.nodes));
  }
  return out;
}

GaugeResult gauge_transform(const ComplexField& psi, const QuadVectors& A_quad, const ScalarField& phi,
                            const ScalarField& chi, double kappa, const ScalarField* chi_rate) {
  if (psi.space != chi.space || phi.space != chi.space) throw InvalidSpec("gauge_transform: fields on different spaces");
  GaugeResult r{psi, A_quad, phi};
  for (Eigen::Index d = 0; d < psi.coeffs.size(); ++d) {
    r.psi.coeffs[d] = psi.coeffs[d] * std::polar(1.0, kappa * chi.coeffs[d]);
  }
  const auto g = chi.space->eval_grad(chi.coeffs);
  for (std::size_t k = 0; k < g.size(); ++k) r.A[k] = A_quad[k] + g[k];
  if (chi_rate) r.phi.coeffs -= chi_rate->coeffs;
  return r;
}

double compare_fields(const ScalarField& f, const ScalarField& g, const std::function<bool(Point2)>& subdomain) {
  const FeSpace& gs = *g.space;
  const auto gv = gs.eval(g.coeffs);
  const PointLocator loc(f.space->mesh_ptr());
  double diff = 0.0, ref = 0.0;
  for (int c = 0; c < gs.num_cells(); ++c) {
    for (int q = 0; q < gs.num_quad(); ++q) {
      const Point2 p = gs.quad_point(c, q);
      if (subdomain && !subdomain(p)) continue;
      const double w = gs.quad_weight(c, q);
      const double gval = gv[c * gs.num_quad() + q];
      const double d = evaluate_at(f, loc, p) - gval;
      diff += w * d * d;
      ref += w * gval * gval;
    }
  }
  if (ref == 0.0) return diff == 0.0 ? 0.0 : INFINITY;
  return std::sqrt(diff / ref);
}

PostProcessor::PostProcessor(const TdglSolver& solver) : solver_(solver), mass_(solver.mass()) {
  if (solver.params().solver == SolverKind::hodge && !solver.params().track_w) {
    mass_interior_ = std::make_unique<DirichletSolver>(*solver.space(), solver.mass(), solver.space()->boundary_dofs());
  }
}

Vec PostProcessor::project(const QuadScalars& values) const {
  return mass_.solve(load_values(*solver_.space(), values));
}

Vec PostProcessor::magnetic_induction(const SimState& state) const {
  if (state.solver == SolverKind::hodge) {
    if (!state.w) throw UnavailableField("B needs the w field (enable track_w)");
    return (state.w->coeffs.array() + solver_.params().H).matrix();
  }
  const FeSpace& s = *solver_.space();
  const auto gx = s.eval_grad(state.Ax), gy = s.eval_grad(state.Ay);
  QuadScalars c(gx.size());
  for (std::size_t k = 0; k < c.size(); ++k) c[k] = gy[k].x - gx[k].y;
  return project(c);
}

Vec PostProcessor::induction_any(const SimState& state) const {
  if (state.solver != SolverKind::hodge || state.w) return magnetic_induction(state);
  const FeSpace& s = *solver_.space();
  const double H = solver_.params().H;
  // B = H + B0 with B0 zero on the boundary: (B0, chi) = (grad u, grad chi) - (H, chi)
  const Vec rhs = solver_.stiffness() * state.potentials->u.coeffs - H * s.dof_weights();
  Vec b = mass_interior_->solve(rhs);
  b.array() += H;
  return b;
}

QuadVectors PostProcessor::electric_field(const SimState& state) const {
  if (state.solver != SolverKind::hodge) return state.A_rate;
  if (!state.w) throw UnavailableField("E needs the w field (enable track_w)");
  QuadVectors e = curl(*state.w);
  for (std::size_t k = 0; k < e.size(); ++k) e[k] = -1.0 * e[k] - state.F[k];
  return e;
}

double PostProcessor::energy(const SimState& state) const {
  const FeSpace& s = *solver_.space();
  QuadScalars B;
  if (state.solver == SolverKind::hodge) {
    B = s.eval(induction_any(state));
  } else {
    const auto gx = s.eval_grad(state.Ax), gy = s.eval_grad(state.Ay);
    B.resize(gx.size());
    for (std::size_t k = 0; k < B.size(); ++k) B[k] = gy[k].x - gx[k].y;
  }
  return free_energy(state.psi, state.A_quad, B, solver_.params().kappa, solver_.params().H);
}

FieldSnapshot make_snapshot(const PostProcessor& post, const TdglSolver& solver, const SimState& state) {
  const auto& mesh = solver.space()->mesh_ptr();
  const int n = mesh->num_nodes();
  FieldSnapshot snap;
  snap.t = state.t;
  snap.solver = state.solver;
  snap.mesh = mesh;
  snap.re_psi = vertex_values(state.psi.coeffs.real(), n);
  snap.im_psi = vertex_values(state.psi.coeffs.imag(), n);
  snap.density = snap.re_psi.cwiseAbs2() + snap.im_psi.cwiseAbs2();
  snap.B = vertex_values(post.induction_any(state), n);
  if (state.solver == SolverKind::hodge) {
    snap.Ax = vertex_values(post.project(component(state.A_quad, false)), n);
    snap.Ay = vertex_values(post.project(component(state.A_quad, true)), n);
  } else {
    snap.Ax = vertex_values(state.Ax, n);
    snap.Ay = vertex_values(state.Ay, n);
  }
  if (state.solver != SolverKind::hodge || state.w) {
    const auto e = post.electric_field(state);
    snap.Ex = vertex_values(post.project(component(e, false)), n);
    snap.Ey = vertex_values(post.project(component(e, true)), n);
  }
  return snap;
}

Diagnostics diagnose(const PostProcessor& post, const SimState& state, double vortex_fraction) {
  const FeSpace& s = *state.psi.space;
  const int n = s.mesh().num_nodes();
  const Vec rho = density(state.psi);
  Diagnostics d;
  d.t = state.t;
  QuadScalars rq;
  for (const auto& z : s.eval(state.psi.coeffs)) rq.push_back(std::norm(z));
  d.mean_density = s.integrate(rq) / s.mesh().total_area();
  const Vec rv = rho.head(n);
  d.min_density = rv.minCoeff();
  d.max_abs_psi = std::sqrt(rho.maxCoeff());
  d.energy = post.energy(state);
  d.vortices = vortex_regions(s.mesh(), rv, vortex_fraction * rv.maxCoeff()).count;
  d.psi_iters = state.psi_iterations;
  d.field_iters = state.field_iterations;
  return d;
}

}  // namespace glvortex
