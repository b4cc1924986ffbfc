#include "glvortex/tdgl.hpp"

#include <cmath>

#include "glvortex/error.hpp"

namespace glvortex {

namespace {

// Runs one sub-solve and tags any library error with its equation.
template <class Fn>
auto sub_equation(const char* name, Fn&& fn) {
  try {
    return fn();
  } catch (const StepError&) {
    throw;
  } catch (const Error& e) {
    throw StepError(std::string(name) + ": " + e.what(), name);
  }
}

QuadScalars modulus_squared(const FeSpace& space, const CVec& psi) {
  const auto vals = space.eval(psi);
  QuadScalars out(vals.size());
  for (std::size_t k = 0; k < vals.size(); ++k) out[k] = std::norm(vals[k]);
  return out;
}

Vec components(const QuadVectors& g, bool y) {
  Vec out(static_cast<Eigen::Index>(g.size()));
  for (std::size_t k = 0; k < g.size(); ++k) out[k] = y ? g[k].y : g[k].x;
  return out;
}

QuadScalars to_quad(const Vec& v) { return QuadScalars(v.data(), v.data() + v.size()); }

}  // namespace

std::string to_string(SolverKind kind) {
  switch (kind) {
    case SolverKind::temporal:
      return "temporal";
    case SolverKind::lorentz:
      return "lorentz";
    case SolverKind::hodge:
      return "hodge";
  }
  return "?";
}

SolverKind parse_solver(const std::string& name) {
  if (name == "temporal") return SolverKind::temporal;
  if (name == "lorentz") return SolverKind::lorentz;
  if (name == "hodge") return SolverKind::hodge;
  throw ConfigError("unknown solver '" + name + "' (expected temporal, lorentz or hodge)");
}

void validate(const SimParams& p) {
  if (!(p.eta > 0.0)) throw InvalidSpec("eta must be positive");
  if (!(p.kappa > 0.0)) throw InvalidSpec("kappa must be positive");
  if (!(p.tau > 0.0)) throw InvalidSpec("tau must be positive");
  if (!(p.T >= p.tau * (1.0 - 1e-12))) throw InvalidSpec("T must be at least tau");
  if (!std::isfinite(p.H)) throw InvalidSpec("H must be finite");
  if (p.degree != 1 && p.degree != 2) throw InvalidSpec("degree must be 1 or 2");
}

QuadVectors compute_supercurrent(const ComplexField& psi_new, const ComplexField& psi_old, const QuadVectors& A_quad,
                                 double kappa) {
  const FeSpace& s = *psi_new.space;
  const Vec re = psi_new.coeffs.real(), im = psi_new.coeffs.imag();
  const auto gr = s.eval_grad(re);
  const auto gi = s.eval_grad(im);
  const auto vn = s.eval(psi_new.coeffs);
  const auto vo = s.eval(psi_old.coeffs);
  QuadVectors F(gr.size());
  for (std::size_t k = 0; k < F.size(); ++k) {
    // conj(a + ib) * [(-gi + i gr)/kappa + A (c + id)], real part
    const double a = vo[k].real(), b = vo[k].imag();
    const double c = vn[k].real(), d = vn[k].imag();
    const Point2 re_z = (-1.0 / kappa) * gi[k] + c * A_quad[k];
    const Point2 im_z = (1.0 / kappa) * gr[k] + d * A_quad[k];
    F[k] = a * re_z + b * im_z;
  }
  return F;
}

TdglSolver::TdglSolver(SpacePtr space, SimParams params) : space_(std::move(space)), params_(params) {
  validate(params_);
  if (space_->degree() != params_.degree) throw InvalidSpec("space degree does not match params.degree");
  M_ = assemble_mass(*space_);
  K_ = assemble_stiffness(*space_);
  const SparseMat heat = (1.0 / params_.tau) * M_ + K_;
  if (params_.solver == SolverKind::hodge) {
    decomposer_ = std::make_unique<Decomposer>(space_);
    heat_free_ = std::make_unique<SpdSolver>(heat);
    heat_zero_ = std::make_unique<DirichletSolver>(*space_, heat, space_->boundary_dofs());
  } else {
    build_vector_system();
  }
}

void TdglSolver::build_vector_system() {
  const FeSpace& s = *space_;
  const int n = s.num_dofs();
  const bool lorentz = params_.solver == SolverKind::lorentz;
  const int nloc = s.dofs_per_cell();

  // (row test j, column trial k) blocks of curl-curl [+ div-div]
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(s.num_cells()) * nloc * nloc * 4);
  Eigen::MatrixXd xx(nloc, nloc), xy(nloc, nloc), yy(nloc, nloc);
  for (int c = 0; c < s.num_cells(); ++c) {
    xx.setZero();
    xy.setZero();
    yy.setZero();
    for (int q = 0; q < s.num_quad(); ++q) {
      const double w = s.quad_weight(c, q);
      for (int j = 0; j < nloc; ++j) {
        const Point2 gj = s.grad(c, q, j);
        for (int k = 0; k < nloc; ++k) {
          const Point2 gk = s.grad(c, q, k);
          // curl(phi e_x) = -d_y phi, curl(phi e_y) = d_x phi
          xx(j, k) += w * gk.y * gj.y;
          yy(j, k) += w * gk.x * gj.x;
          xy(j, k) -= w * gk.x * gj.y;
          if (lorentz) {
            xx(j, k) += w * gk.x * gj.x;
            yy(j, k) += w * gk.y * gj.y;
            xy(j, k) += w * gk.y * gj.x;
          }
        }
      }
    }
    const auto d = s.cell_dofs(c);
    for (int j = 0; j < nloc; ++j) {
      for (int k = 0; k < nloc; ++k) {
        trip.emplace_back(d[j], d[k], xx(j, k));
        trip.emplace_back(n + d[j], n + d[k], yy(j, k));
        trip.emplace_back(d[j], n + d[k], xy(j, k));
        trip.emplace_back(n + d[k], d[j], xy(j, k));
      }
    }
  }
  for (int r = 0; r < n; ++r) {
    for (SparseMat::InnerIterator it(M_, r); it; ++it) {
      trip.emplace_back(r, it.col(), it.value() / params_.tau);
      trip.emplace_back(n + r, n + it.col(), it.value() / params_.tau);
    }
  }
  SparseMat K2(2 * n, 2 * n);
  K2.setFromTriplets(trip.begin(), trip.end());

  std::vector<Eigen::Triplet<double>> mtrip;
  for (int r = 0; r < n; ++r) {
    for (SparseMat::InnerIterator it(M_, r); it; ++it) {
      mtrip.emplace_back(r, it.col(), it.value());
      mtrip.emplace_back(n + r, n + it.col(), it.value());
    }
  }
  vec_M_.resize(2 * n, 2 * n);
  vec_M_.setFromTriplets(mtrip.begin(), mtrip.end());

  // interior: (e_x, e_y); boundary: tangent only; corner: nothing
  std::vector<Eigen::Triplet<double>> ptrip;
  int col = 0;
  for (int dof = 0; dof < n; ++dof) {
    const auto& dc = s.dof_class()[dof];
    if (dc.kind == NodeKind::interior) {
      ptrip.emplace_back(dof, col++, 1.0);
      ptrip.emplace_back(n + dof, col++, 1.0);
    } else if (dc.kind == NodeKind::boundary) {
      ptrip.emplace_back(dof, col, -dc.normal.y);
      ptrip.emplace_back(n + dof, col, dc.normal.x);
      ++col;
    }
  }
  P_.resize(2 * n, col);
  P_.setFromTriplets(ptrip.begin(), ptrip.end());
  const SparseMat Pt = P_.transpose();
  const SparseMat reduced = Pt * K2 * P_;
  vec_solver_ = std::make_unique<SpdSolver>(reduced);

  // (H, curl a): x rows -H (1, d_y phi), y rows H (1, d_x phi)
  vec_H_load_.resize(2 * n);
  vec_H_load_.head(n) = -params_.H * load_gradient(s, QuadVectors(s.quad_size(), Point2{0.0, 1.0}));
  vec_H_load_.tail(n) = params_.H * load_gradient(s, QuadVectors(s.quad_size(), Point2{1.0, 0.0}));
}

QuadVectors TdglSolver::eval_vector(const Vec& ax, const Vec& ay) const {
  const auto x = space_->eval(ax);
  const auto y = space_->eval(ay);
  QuadVectors out(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) out[k] = {x[k], y[k]};
  return out;
}

void TdglSolver::constrain(Vec& ax, Vec& ay) const {
  for (int d : space_->boundary_dofs()) {
    const auto& dc = space_->dof_class()[d];
    if (dc.kind == NodeKind::corner) {
      ax[d] = 0.0;
      ay[d] = 0.0;
    } else {
      const double an = ax[d] * dc.normal.x + ay[d] * dc.normal.y;
      ax[d] -= an * dc.normal.x;
      ay[d] -= an * dc.normal.y;
    }
  }
}

double TdglSolver::normal_violation(const SimState& state) const {
  if (state.solver == SolverKind::hodge) return 0.0;
  double worst = 0.0;
  for (int d : space_->boundary_dofs()) {
    const auto& dc = space_->dof_class()[d];
    const double v = dc.kind == NodeKind::corner
                         ? std::hypot(state.Ax[d], state.Ay[d])
                         : std::abs(state.Ax[d] * dc.normal.x + state.Ay[d] * dc.normal.y);
    worst = std::max(worst, v);
  }
  return worst;
}

SimState TdglSolver::init_state(const std::function<Complex(Point2)>& psi0,
                                const std::function<Point2(Point2)>& A0) const {
  const FeSpace& s = *space_;
  SimState st;
  st.solver = params_.solver;
  st.psi = {space_, s.interpolate(psi0)};
  const auto a0 = A0 ? A0 : [](Point2) { return Point2{}; };
  st.F = QuadVectors(s.quad_size());
  st.A_rate = QuadVectors(s.quad_size());
  if (params_.solver == SolverKind::hodge) {
    st.potentials = decomposer_->decompose_vector(s.sample(a0));
    st.q = Vec::Zero(s.num_dofs());
    st.A_quad = reconstruct(*st.potentials);
    if (params_.track_w) {
      // w0 = curl A0 - H inside, zero trace; curl A0 by central differences
      const double h = 1e-6;
      Vec w0 = s.interpolate(std::function<double(Point2)>([&](Point2 p) {
        if (!A0) return -params_.H;
        const double dAy = (a0({p.x + h, p.y}).y - a0({p.x - h, p.y}).y) / (2 * h);
        const double dAx = (a0({p.x, p.y + h}).x - a0({p.x, p.y - h}).x) / (2 * h);
        return dAy - dAx - params_.H;
      }));
      for (int d : s.boundary_dofs()) w0[d] = 0.0;
      st.w = ScalarField{space_, w0};
    }
  } else {
    st.Ax = s.interpolate(std::function<double(Point2)>([&](Point2 p) { return a0(p).x; }));
    st.Ay = s.interpolate(std::function<double(Point2)>([&](Point2 p) { return a0(p).y; }));
    constrain(st.Ax, st.Ay);
    st.A_quad = eval_vector(st.Ax, st.Ay);
  }
  return st;
}

SparseMatC TdglSolver::psi_matrix(const SimState& state) const {
  const FeSpace& s = *space_;
  const int nq = s.num_quad();
  const int nloc = s.dofs_per_cell();
  const double inv_k = 1.0 / params_.kappa;
  const double inv_k2 = inv_k * inv_k;
  const double mass_shift = params_.eta / params_.tau - 1.0;
  const double gauge = params_.solver == SolverKind::temporal ? 0.0 : params_.eta * params_.kappa;
  const auto rho = modulus_squared(s, state.psi.coeffs);
  const Complex I(0.0, 1.0);
  // (a.grad phi_k) phi_j enters with i/kappa - i/kappa on its transpose, and
  // with i*eta*kappa on both in the gauge term
  const Complex c_fwd = I * (inv_k + gauge);
  const Complex c_bwd = I * (gauge - inv_k);
  std::vector<double> adg(nloc);
  return assemble_cells<Complex>(s, [&](int c, Eigen::MatrixXcd& K) {
    for (int q = 0; q < nq; ++q) {
      const double w = s.quad_weight(c, q);
      const Point2 a = state.A_quad[c * nq + q];
      const double scal = w * (mass_shift + rho[c * nq + q] + dot(a, a));
      for (int i = 0; i < nloc; ++i) adg[i] = w * dot(a, s.grad(c, q, i));
      for (int j = 0; j < nloc; ++j) {
        const double vj = s.value(q, j);
        const Point2 gj = s.grad(c, q, j);
        for (int k = 0; k < nloc; ++k) {
          const double vk = s.value(q, k);
          const double re = w * inv_k2 * dot(gj, s.grad(c, q, k)) + scal * vj * vk;
          K(j, k) += re + c_fwd * (adg[k] * vj) + c_bwd * (adg[j] * vk);
        }
      }
    }
  });
}

CVec TdglSolver::psi_rhs(const SimState& state) const {
  const Vec re = state.psi.coeffs.real(), im = state.psi.coeffs.imag();
  const double f = params_.eta / params_.tau;
  CVec b(re.size());
  b.real() = f * (M_ * re);
  b.imag() = f * (M_ * im);
  return b;
}

ComplexField TdglSolver::step_psi(const SimState& state, SolveStats* stats) const {
  return sub_equation("psi-equation", [&] {
    const auto A = psi_matrix(state);
    return ComplexField{space_, solve_complex(A, psi_rhs(state), kDefaultTol, stats, &state.psi.coeffs)};
  });
}

void TdglSolver::check_coherence(const SimState& state) const {
  if (state.solver != params_.solver) throw InvalidSpec("state belongs to a different solver");
  QuadVectors ref;
  if (state.solver == SolverKind::hodge) {
    ref = reconstruct(*state.potentials);
  } else {
    ref = eval_vector(state.Ax, state.Ay);
  }
  if (ref.size() != state.A_quad.size()) throw InvalidSpec("A cache has the wrong size");
  for (std::size_t k = 0; k < ref.size(); ++k) {
    if (!(ref[k] == state.A_quad[k])) throw InvalidSpec("A cache out of date with the potentials");
  }
}

SimState TdglSolver::step_hodge(const SimState& state) const {
  if (params_.solver != SolverKind::hodge) throw InvalidSpec("step_hodge needs the hodge solver");
  check_coherence(state);
  const FeSpace& s = *space_;
  const double inv_tau = 1.0 / params_.tau;
  SimState next;
  next.solver = state.solver;
  next.step = state.step + 1;
  next.t = next.step * params_.tau;

  SolveStats ps;
  next.psi = step_psi(state, &ps);
  next.psi_iterations = ps.iterations;
  next.F = compute_supercurrent(next.psi, state.psi, state.A_quad, params_.kappa);

  SolveStats sp, sq, su, sv, sw;
  const auto cp = sub_equation("current decomposition",
                               [&] { return decomposer_->decompose_current(next.F, &state.q, &sp, &sq); });
  next.q = cp.q.coeffs;
  const auto& pot = *state.potentials;
  Vec u = sub_equation("u-equation", [&] {
    const Vec rhs = M_ * (inv_tau * pot.u.coeffs - cp.p.coeffs) + params_.H * s.dof_weights();
    return heat_zero_->solve(rhs, &su);
  });
  Vec v = sub_equation("v-equation", [&] {
    const Vec rhs = M_ * (inv_tau * pot.v.coeffs - cp.q.coeffs);
    return heat_free_->solve(rhs, &sv);
  });
  v.array() -= s.mean(v);
  next.potentials = PotentialPair{{space_, std::move(u)}, {space_, std::move(v)}};
  if (params_.track_w) {
    next.w = ScalarField{space_, sub_equation("w-equation", [&] {
                           const Vec rhs = inv_tau * (M_ * state.w->coeffs) - load_curl(s, next.F);
                           return heat_zero_->solve(rhs, &sw);
                         })};
  }
  next.A_quad = reconstruct(*next.potentials);
  next.A_rate = QuadVectors(s.quad_size());
  next.field_iterations = sp.iterations + sq.iterations + su.iterations + sv.iterations + sw.iterations;
  check_coherence(next);
  return next;
}

SimState TdglSolver::gauge_step(const SimState& state) const {
  check_coherence(state);
  const FeSpace& s = *space_;
  const int n = s.num_dofs();
  SimState next;
  next.solver = state.solver;
  next.step = state.step + 1;
  next.t = next.step * params_.tau;

  SolveStats ps;
  next.psi = step_psi(state, &ps);
  next.psi_iterations = ps.iterations;
  next.F = compute_supercurrent(next.psi, state.psi, state.A_quad, params_.kappa);

  SolveStats sa;
  const Vec red = sub_equation("A-equation", [&] {
    Vec old(2 * n);
    old << state.Ax, state.Ay;
    Vec rhs = (1.0 / params_.tau) * (vec_M_ * old) + vec_H_load_;
    rhs.head(n) -= load_values(s, to_quad(components(next.F, false)));
    rhs.tail(n) -= load_values(s, to_quad(components(next.F, true)));
    const Vec rr = P_.transpose() * rhs;
    return vec_solver_->solve(rr, &sa);
  });
  const Vec full = P_ * red;
  next.Ax = full.head(n);
  next.Ay = full.tail(n);
  next.A_quad = eval_vector(next.Ax, next.Ay);
  next.A_rate.resize(next.A_quad.size());
  for (std::size_t k = 0; k < next.A_quad.size(); ++k) {
    next.A_rate[k] = (1.0 / params_.tau) * (next.A_quad[k] - state.A_quad[k]);
  }
  next.field_iterations = sa.iterations;
  return next;
}

SimState TdglSolver::step_temporal(const SimState& state) const {
  if (params_.solver != SolverKind::temporal) throw InvalidSpec("step_temporal needs the temporal solver");
  return gauge_step(state);
}

SimState TdglSolver::step_lorentz(const SimState& state) const {
  if (params_.solver != SolverKind::lorentz) throw InvalidSpec("step_lorentz needs the lorentz solver");
  return gauge_step(state);
}

SimState TdglSolver::step(const SimState& state) const {
  switch (params_.solver) {
    case SolverKind::hodge:
      return step_hodge(state);
    case SolverKind::temporal:
      return step_temporal(state);
    case SolverKind::lorentz:
      return step_lorentz(state);
  }
  throw InvalidSpec("unknown solver");
}

}  // namespace glvortex
