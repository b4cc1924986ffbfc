#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "glvortex/error.hpp"
#include "glvortex/post.hpp"

using namespace glvortex;

namespace {

std::shared_ptr<const TriMesh> square(int m) { return std::make_shared<const TriMesh>(gen_unit_square(m)); }

SpacePtr space_on(std::shared_ptr<const TriMesh> mesh, int r = 1) { return std::make_shared<const FeSpace>(mesh, r); }

ScalarField interp(const SpacePtr& s, std::function<double(Point2)> f) { return {s, s->interpolate(f)}; }

ComplexField constant_psi(const SpacePtr& s, Complex c) { return {s, CVec::Constant(s->num_dofs(), c)}; }

SimParams params(SolverKind k, double H, bool track_w = true) {
  SimParams p;
  p.solver = k;
  p.H = H;
  p.kappa = 10.0;
  p.tau = 0.1;
  p.track_w = track_w;
  return p;
}

double l2(const FeSpace& s, const Vec& a) {
  const auto v = s.eval(a);
  QuadScalars sq(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) sq[k] = v[k] * v[k];
  return std::sqrt(s.integrate(sq));
}

}  // namespace

TEST_CASE("density of constant states") {
  const auto s = space_on(square(3));
  CHECK((density(constant_psi(s, 1.0)).array() == 1.0).all());
  CHECK((density(constant_psi(s, Complex(0.6, 0.8))).array() - 1.0).abs().maxCoeff() < 1e-15);
  CHECK((density(constant_psi(s, 0.0)).array() == 0.0).all());
}

TEST_CASE("free energy of constant states") {
  const auto sq = space_on(square(4));
  const auto sl = space_on(std::make_shared<const TriMesh>(gen_lshape(8)));
  const QuadVectors zero_a(sq->quad_size());
  CHECK(free_energy(constant_psi(sq, 1.0), zero_a, QuadScalars(sq->quad_size(), 0.0), 10.0, 0.0) ==
        doctest::Approx(0.0));
  CHECK(free_energy(constant_psi(sl, 0.0), QuadVectors(sl->quad_size()), QuadScalars(sl->quad_size(), 0.0), 10.0,
                    0.0) == doctest::Approx(0.375).epsilon(1e-13));
  CHECK(free_energy(constant_psi(sq, 0.0), zero_a, QuadScalars(sq->quad_size(), 0.0), 10.0, 1.0) ==
        doctest::Approx(1.5).epsilon(1e-13));
}

TEST_CASE("vortex regions") {
  auto mesh = square(40);
  const int n = mesh->num_nodes();
  CHECK(vortex_regions(*mesh, Vec::Ones(n), 0.1).count == 0);
  const auto all = vortex_regions(*mesh, Vec::Zero(n), 0.1);
  CHECK(all.count == 1);
  CHECK(all.areas[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(norm(all.centroids[0] - Point2{0.5, 0.5}) < 1e-12);

  // two Gaussian dips reaching zero at their centres
  const Point2 c1{0.3, 0.62}, c2{0.71, 0.27};
  Vec rho(n);
  for (int v = 0; v < n; ++v) {
    const Point2 p = mesh->nodes()[v];
    const Point2 d1 = p - c1, d2 = p - c2;
    rho[v] = 1.0 - std::exp(-dot(d1, d1) / 0.004) - std::exp(-dot(d2, d2) / 0.004);
  }
  const auto two = vortex_regions(*mesh, rho, 0.1);
  REQUIRE(two.count == 2);
  CHECK(norm(two.centroids[0] - c1) < 1.0 / 40);
  CHECK(norm(two.centroids[1] - c2) < 1.0 / 40);
}

TEST_CASE("gauge transform") {
  const auto s = space_on(square(8), 2);
  const ComplexField psi{s, s->interpolate(std::function<Complex(Point2)>(
                                [](Point2 p) { return Complex(std::cos(2 * p.x), p.y * p.y - 0.3); }))};
  const QuadVectors A = s->sample([](Point2 p) { return Point2{p.y, -p.x}; });
  const ScalarField phi = interp(s, [](Point2 p) { return p.x; });
  const ScalarField zero{s, Vec::Zero(s->num_dofs())};
  const auto id = gauge_transform(psi, A, phi, zero, 10.0);
  CHECK((id.psi.coeffs - psi.coeffs).norm() == 0.0);
  for (std::size_t k = 0; k < A.size(); ++k) CHECK(id.A[k] == A[k]);
  CHECK((id.phi.coeffs - phi.coeffs).norm() == 0.0);

  const ScalarField chi = interp(s, [](Point2 p) { return std::sin(5 * p.x * p.y) + p.x; });
  const auto g = gauge_transform(psi, A, phi, chi, 10.0, &chi);
  CHECK((density(g.psi) - density(psi)).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((g.phi.coeffs - (phi.coeffs - chi.coeffs)).norm() < 1e-15);
}

TEST_CASE("curl of a nodal gradient converges to zero") {
  // chi = x^2 + x y^2: A' - A is grad chi_h carried on nodal components
  std::vector<double> err;
  for (int m : {8, 16, 32}) {
    const auto s = space_on(square(m), 2);
    SimParams p = params(SolverKind::temporal, 0.0);
    p.degree = 2;
    const TdglSolver solver(s, p);
    const PostProcessor post(solver);
    const auto chi = interp(s, [](Point2 q) { return q.x * q.x + q.x * q.y * q.y; });
    const auto g = s->eval_grad(chi.coeffs);
    QuadScalars gx(g.size()), gy(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
      gx[k] = g[k].x;
      gy[k] = g[k].y;
    }
    SimState st = solver.init_state([](Point2) { return Complex(1.0); });
    st.Ax = post.project(gx);
    st.Ay = post.project(gy);
    err.push_back(l2(*s, post.magnetic_induction(st)));
  }
  for (std::size_t k = 1; k < err.size(); ++k) CHECK(std::log2(err[k - 1] / err[k]) >= 1.0);
}

TEST_CASE("magnetic induction") {
  const auto s = space_on(square(6));
  {
    const TdglSolver solver(s, params(SolverKind::hodge, 0.8));
    const PostProcessor post(solver);
    auto st = solver.init_state([](Point2) { return Complex(1.0); });
    st.w->coeffs.setZero();
    CHECK((post.magnetic_induction(st).array() - 0.8).abs().maxCoeff() < 1e-15);
    // initial w gives B = 0 inside and H on the boundary
    const auto st0 = solver.init_state([](Point2) { return Complex(1.0); });
    const Vec b = post.magnetic_induction(st0);
    for (int d : s->interior_dofs()) CHECK(b[d] == 0.0);
  }
  {
    const TdglSolver solver(s, params(SolverKind::hodge, 0.8, false));
    const PostProcessor post(solver);
    const auto st = solver.init_state([](Point2) { return Complex(1.0); });
    CHECK_THROWS_AS(post.magnetic_induction(st), UnavailableField);
    CHECK_THROWS_AS(post.electric_field(st), UnavailableField);
  }
  for (auto k : {SolverKind::temporal, SolverKind::lorentz}) {
    const TdglSolver solver(s, params(k, 0.8));
    const PostProcessor post(solver);
    auto st = solver.init_state([](Point2) { return Complex(1.0); });
    CHECK(post.magnetic_induction(st).norm() == 0.0);
    st.Ax = s->interpolate(std::function<double(Point2)>([](Point2 q) { return -q.y / 2; }));
    st.Ay = s->interpolate(std::function<double(Point2)>([](Point2 q) { return q.x / 2; }));
    CHECK((post.magnetic_induction(st).array() - 1.0).abs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("electric field") {
  const auto s = space_on(square(5));
  const TdglSolver solver(s, params(SolverKind::hodge, 1.0));
  const PostProcessor post(solver);
  auto st = solver.init_state([](Point2) { return Complex(1.0); });
  st.w->coeffs.setZero();
  for (const auto& e : post.electric_field(st)) CHECK(norm(e) == 0.0);
  st.w = interp(s, [](Point2 p) { return p.x; });
  st.F = QuadVectors(s->quad_size(), Point2{0.25, -0.5});
  for (const auto& e : post.electric_field(st)) CHECK(norm(e - Point2{-0.25, 1.5}) < 1e-13);
}

TEST_CASE("w tracks the weak curl of A under refinement") {
  std::vector<double> err;
  for (int m : {8, 16, 32}) {
    const auto s = space_on(square(m));
    SimParams p = params(SolverKind::hodge, 1.0);
    p.kappa = 2.0;
    p.tau = 0.02;
    const TdglSolver with_w(s, p);
    SimParams q = p;
    q.track_w = false;
    const TdglSolver without_w(s, q);
    const PostProcessor post_w(with_w), post_curl(without_w);
    auto st = with_w.init_state([](Point2 x) { return Complex(0.8, 0.2 * x.y); });
    for (int n = 0; n < 10; ++n) st = with_w.step(st);
    const Vec bw = post_w.magnetic_induction(st);
    SimState bare = st;
    bare.w.reset();
    const Vec bc = post_curl.induction_any(bare);
    err.push_back(l2(*s, bw - bc) / l2(*s, bc));
  }
  CHECK(err[1] < err[0]);
  CHECK(err[2] < err[1]);
  CHECK(std::log2(err[1] / err[2]) > 0.5);
}

TEST_CASE("compare fields") {
  auto coarse = square(6);
  auto fine = std::make_shared<const TriMesh>(refine_local(*coarse, {0.5, 0.5}, 2.0, 1));
  const auto sc = space_on(coarse), sf = space_on(fine);
  const auto lin = [](Point2 p) { return 2.0 * p.x - p.y + 0.5; };
  const auto gc = interp(sc, lin), gf = interp(sf, lin);
  CHECK(compare_fields(gf, gf) < 1e-14);
  CHECK(compare_fields(gc, gf) < 1e-12);
  const ScalarField one{sf, Vec::Ones(sf->num_dofs())};
  const ScalarField shifted{sc, Vec::Constant(sc->num_dofs(), 1.1)};
  CHECK(compare_fields(shifted, one) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(compare_fields(shifted, one, [](Point2 p) { return p.x < 0.5; }) == doctest::Approx(0.1).epsilon(1e-12));

  auto l = std::make_shared<const TriMesh>(gen_lshape(8));
  const auto sl = space_on(l);
  const ScalarField on_l{sl, Vec::Ones(sl->num_dofs())};
  const ScalarField on_sq{sc, Vec::Ones(sc->num_dofs())};
  CHECK_THROWS_AS(compare_fields(on_l, on_sq), EvaluationError);
}

TEST_CASE("snapshots and diagnostics") {
  const auto s = space_on(std::make_shared<const TriMesh>(gen_lshape(8)), 2);
  for (auto k : {SolverKind::temporal, SolverKind::lorentz, SolverKind::hodge}) {
    SimParams p = params(k, 5.0);
    p.degree = 2;
    const TdglSolver solver(s, p);
    const PostProcessor post(solver);
    auto st = solver.init_state([](Point2) { return Complex(0.6, 0.8); });
    for (int n = 0; n < 3; ++n) st = solver.step(st);
    const auto snap = make_snapshot(post, solver, st);
    const int n = s->mesh().num_nodes();
    CHECK(snap.density.size() == n);
    CHECK(snap.B.size() == n);
    CHECK(snap.Ex.has_value());
    for (int i = 0; i < n; ++i) {
      CHECK(std::abs(snap.density[i] - (snap.re_psi[i] * snap.re_psi[i] + snap.im_psi[i] * snap.im_psi[i])) <= 1e-14);
    }
    const auto d = diagnose(post, st);
    CHECK(d.t == doctest::Approx(0.3));
    CHECK(d.min_density >= 0.0);
    CHECK(d.min_density <= d.mean_density);
    CHECK(d.max_abs_psi * d.max_abs_psi >= d.min_density);
    CHECK(d.energy > 0.0);
  }
}
