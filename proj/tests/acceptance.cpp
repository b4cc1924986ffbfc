// Acceptance runs. `acceptance N...` runs the listed criteria (default: all)
// and prints one PASS/FAIL line per criterion; the exit code is nonzero if
// any of them fails.

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "glvortex/config.hpp"
#include "glvortex/error.hpp"
#include "glvortex/run.hpp"

#ifndef GLVORTEX_CLI
#define GLVORTEX_CLI "glvortex"
#endif

using namespace glvortex;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double rate(double coarse, double fine) { return std::log2(coarse / fine); }

SpacePtr square_space(int m, int r, QuadRule rule) {
  return std::make_shared<const FeSpace>(std::make_shared<const TriMesh>(gen_unit_square(m)), r, std::move(rule));
}

// ---------------------------------------------------------------------------
// 1. decomposition round trip

Point2 field_c1(Point2 p) {
  // curl(sin pi x sin pi y) + grad(cos pi x cos pi y), written out
  const double a = M_PI * std::sin(M_PI * p.x) * std::cos(M_PI * p.y);
  const double b = M_PI * std::cos(M_PI * p.x) * std::sin(M_PI * p.y);
  return Point2{a, -b} + Point2{-a, -b};
}

Outcome criterion1() {
  const auto start = std::chrono::steady_clock::now();
  Outcome out{true, ""};
  for (int r : {1, 2}) {
    std::vector<double> err;
    for (int m : {16, 32, 64}) {
      const auto mesh = std::make_shared<const TriMesh>(gen_unit_square(m));
      const auto s = std::make_shared<const FeSpace>(mesh, r);
      const auto pair = decompose_vector(s, s->sample(field_c1));
      // error by a 64-point rule on every triangle
      const auto fine = std::make_shared<const FeSpace>(mesh, r, QuadRule::collapsed(8));
      const auto a = reconstruct({{fine, pair.u.coeffs}, {fine, pair.v.coeffs}});
      double e2 = 0.0;
      for (int c = 0; c < fine->num_cells(); ++c) {
        for (int q = 0; q < fine->num_quad(); ++q) {
          const Point2 d = a[c * fine->num_quad() + q] - field_c1(fine->quad_point(c, q));
          e2 += fine->quad_weight(c, q) * dot(d, d);
        }
      }
      err.push_back(std::sqrt(e2));
    }
    out.detail += "r=" + std::to_string(r) + " rates";
    for (std::size_t k = 1; k < err.size(); ++k) {
      const double p = rate(err[k - 1], err[k]);
      out.detail += fmt(" %.3f", p);
      if (!(std::abs(p - r) <= 0.25)) out.pass = false;
    }
    out.detail += "; ";
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out.detail += fmt("%.1f s (limit 30 s)", secs);
  if (secs >= 30.0) out.pass = false;
  return out;
}

// ---------------------------------------------------------------------------
// 2. manufactured heat problem for the zero-trace potential

double heat_u(Point2 p, double t) { return std::sin(M_PI * p.x) * std::sin(M_PI * p.y) * std::exp(-t) * std::cos(3 * t); }
double heat_f(Point2 p, double t) {
  // u_t - Lap u for the function above
  const double s = std::sin(M_PI * p.x) * std::sin(M_PI * p.y) * std::exp(-t);
  return s * (-std::cos(3 * t) - 3 * std::sin(3 * t) + 2 * M_PI * M_PI * std::cos(3 * t));
}

double heat_run(int m, int steps, double T) {
  const double tau = T / steps;
  const auto s = square_space(m, 1, default_rule(1));
  const SparseMat M = assemble_mass(*s);
  const SparseMat A = SparseMat(M / tau + assemble_stiffness(*s));
  const DirichletSolver solve(*s, A, s->boundary_dofs());
  Vec u = s->interpolate(std::function<double(Point2)>([](Point2 p) { return heat_u(p, 0.0); }));
  for (int n = 1; n <= steps; ++n) {
    const double t = n * tau;
    const Vec f = load_values(*s, s->sample(std::function<double(Point2)>([t](Point2 p) { return heat_f(p, t); })));
    u = solve.solve(M * u / tau + f);
  }
  const auto fine = square_space(m, 1, QuadRule::collapsed(6));
  const auto uh = fine->eval(u);
  double e2 = 0.0;
  for (int c = 0; c < fine->num_cells(); ++c) {
    for (int q = 0; q < fine->num_quad(); ++q) {
      const double d = uh[c * fine->num_quad() + q] - heat_u(fine->quad_point(c, q), T);
      e2 += fine->quad_weight(c, q) * d * d;
    }
  }
  return std::sqrt(e2);
}

Outcome criterion2() {
  const auto start = std::chrono::steady_clock::now();
  Outcome out{true, "space"};
  // tau = h^2 / 2
  std::vector<double> es;
  for (int m : {8, 16, 32}) es.push_back(heat_run(m, m * m, 0.5));
  for (std::size_t k = 1; k < es.size(); ++k) {
    const double p = rate(es[k - 1], es[k]);
    out.detail += fmt(" %.3f", p);
    if (!(std::abs(p - 2.0) <= 0.25)) out.pass = false;
  }
  out.detail += "; time";
  std::vector<double> et;
  for (int steps : {10, 20, 40}) et.push_back(heat_run(64, steps, 0.5));
  for (std::size_t k = 1; k < et.size(); ++k) {
    const double p = rate(et[k - 1], et[k]);
    out.detail += fmt(" %.3f", p);
    if (!(std::abs(p - 1.0) <= 0.25)) out.pass = false;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out.detail += fmt("; %.1f s (limit 60 s)", secs);
  if (secs >= 60.0) out.pass = false;
  return out;
}

// ---------------------------------------------------------------------------
// 3. solver agreement on the unit square

ScalarField density_field(const Simulation& sim) { return {sim.space(), density(sim.state().psi)}; }

Outcome criterion3() {
  RunConfig cfg = preset("example33");
  const auto mesh = std::make_shared<const TriMesh>(make_mesh(cfg.mesh));
  const double h = 1.0 / cfg.mesh.m;
  const auto away = [h](Point2 p) {
    for (Point2 c : {Point2{0, 0}, Point2{1, 0}, Point2{0, 1}, Point2{1, 1}}) {
      if (norm(p - c) <= 2 * h) return false;
    }
    return true;
  };
  std::vector<std::unique_ptr<Simulation>> sims;
  for (auto k : {SolverKind::hodge, SolverKind::lorentz, SolverKind::temporal}) {
    SimParams p = cfg.params;
    p.solver = k;
    sims.push_back(std::make_unique<Simulation>(mesh, p, cfg.psi0));
  }
  Outcome out{true, ""};
  double worst_l = 0.0, worst_t = 0.0;
  for (double t : {5.0, 20.0, 40.0}) {
    const int step = snapshot_step(t, cfg.params.tau);
    for (auto& s : sims) s->advance_to(step);
    const auto ref = density_field(*sims[0]);
    const double dl = compare_fields(density_field(*sims[1]), ref, away);
    const double dt = compare_fields(density_field(*sims[2]), ref, away);
    out.detail += fmt("t=%g:", t) + fmt(" lorentz %.4f", dl) + fmt(" temporal %.4f; ", dt);
    worst_l = std::max(worst_l, dl);
    worst_t = std::max(worst_t, dt);
  }
  // 0.05 is the stated bound; the temporal pair is also held to the tighter
  // 0.02 measured margin.
  out.pass = worst_l < 0.05 && worst_t < 0.05 && worst_t < 0.02;
  out.detail += "bounds 0.05 (temporal also 0.02)";
  return out;
}

// ---------------------------------------------------------------------------
// 4. refinement stability on the L-shape

ScalarField lshape_density_t40(int m, SolverKind k) {
  RunConfig cfg = preset("example31");
  cfg.mesh.m = m;
  cfg.params.solver = k;
  Simulation sim(cfg);
  sim.advance_to(num_steps(cfg.params));
  return density_field(sim);
}

Outcome criterion4() {
  double d[2];
  const SolverKind kinds[2] = {SolverKind::hodge, SolverKind::temporal};
  for (int i = 0; i < 2; ++i) {
    const auto coarse = lshape_density_t40(32, kinds[i]);
    const auto fine = lshape_density_t40(64, kinds[i]);
    d[i] = compare_fields(coarse, fine);
  }
  Outcome out;
  out.pass = d[0] < d[1] && d[0] < 0.5 * d[1];
  out.detail = fmt("d(hodge) %.4f", d[0]) + fmt(", d(temporal) %.4f", d[1]) + fmt(", ratio %.3f (need < 0.5)", d[0] / d[1]);
  return out;
}

// ---------------------------------------------------------------------------
// 5. notch-apex vortex

struct ApexTracker {
  int apex = -1;
  std::vector<int> touching;

  explicit ApexTracker(const TriMesh& mesh, Point2 p) {
    double best = INFINITY;
    for (int v = 0; v < mesh.num_nodes(); ++v) {
      const double d = norm(mesh.nodes()[v] - p);
      if (d < best) {
        best = d;
        apex = v;
      }
    }
    if (best > 1e-12) throw InvalidSpec("no mesh node at the notch apex");
    touching = mesh.node_neighbors()[apex];
    touching.push_back(apex);
  }

  double area(const Simulation& sim) const {
    const int n = sim.mesh().num_nodes();
    const Vec rho = density(sim.state().psi).head(n);
    const auto regions = vortex_regions(sim.mesh(), rho, 0.1);
    double a = 0.0;
    for (int c = 0; c < regions.count; ++c) {
      for (int v : regions.nodes[c]) {
        if (std::find(touching.begin(), touching.end(), v) != touching.end()) {
          a += regions.areas[c];
          break;
        }
      }
    }
    return a;
  }
};

Outcome criterion5() {
  RunConfig cfg = preset("example32_h08");
  const auto mesh = std::make_shared<const TriMesh>(make_mesh(cfg.mesh));
  const ApexTracker apex(*mesh, {1.0 - cfg.mesh.notch_depth, 0.0});
  Outcome out{true, ""};
  {
    SimParams p = cfg.params;
    p.solver = SolverKind::temporal;
    Simulation sim(mesh, p, cfg.psi0);
    double a[3];
    const double times[3] = {20.0, 100.0, 1000.0};
    for (int i = 0; i < 3; ++i) {
      sim.advance_to(snapshot_step(times[i], p.tau));
      a[i] = apex.area(sim);
    }
    out.detail = fmt("temporal a(20) %.4g", a[0]) + fmt(" a(100) %.4g", a[1]) + fmt(" a(1000) %.4g", a[2]);
    if (!(a[1] > a[0] && a[2] > a[1])) out.pass = false;
  }
  {
    SimParams p = cfg.params;
    p.solver = SolverKind::hodge;
    p.track_w = false;
    Simulation sim(mesh, p, cfg.psi0);
    double transient = apex.area(sim), later = 0.0;
    const int n50 = snapshot_step(50.0, p.tau), n1000 = snapshot_step(1000.0, p.tau);
    while (sim.state().step < n1000) {
      sim.advance();
      const double a = apex.area(sim);
      if (sim.state().step <= n50) transient = std::max(transient, a);
      else later = std::max(later, a);
    }
    out.detail += fmt("; hodge max a(t<=50) %.4g", transient) + fmt(", max a(50<t<=1000) %.4g", later);
    if (!(std::max(transient, later) <= 3.0 * transient)) out.pass = false;
  }
  return out;
}

// ---------------------------------------------------------------------------
// 6. fixed points and invariants

Outcome criterion6() {
  const auto start = std::chrono::steady_clock::now();
  Outcome out{true, ""};
  // stationarity of the superconducting state without field
  double worst_step = 0.0;
  for (auto mesh_spec : {std::string("unit_square"), std::string("lshape"), std::string("disk_notch")}) {
    MeshSpec ms;
    ms.kind = mesh_spec == "unit_square" ? DomainKind::unit_square
              : mesh_spec == "lshape"    ? DomainKind::lshape
                                         : DomainKind::disk_notch;
    ms.m = 16;
    ms.boundary_points = 64;
    const auto mesh = std::make_shared<const TriMesh>(make_mesh(ms));
    for (int r : {1, 2}) {
      for (auto k : {SolverKind::temporal, SolverKind::lorentz, SolverKind::hodge}) {
        SimParams p;
        p.solver = k;
        p.degree = r;
        p.H = 0.0;
        Simulation sim(mesh, p, 1.0);
        for (int n = 0; n < 3; ++n) {
          const CVec before = sim.state().psi.coeffs;
          sim.advance();
          worst_step = std::max(worst_step, (sim.state().psi.coeffs - before).cwiseAbs().maxCoeff());
        }
      }
    }
  }
  out.detail += fmt("max |dpsi| per step %.2e (limit 1e-9)", worst_step);
  if (!(worst_step < 1e-9)) out.pass = false;

  // gauge invariance of the density
  {
    const auto s = std::make_shared<const FeSpace>(std::make_shared<const TriMesh>(gen_lshape(16)), 2);
    std::mt19937 gen(7);
    std::uniform_real_distribution<double> uni(-3.0, 3.0);
    CVec psi(s->num_dofs());
    Vec chi(s->num_dofs());
    for (int d = 0; d < s->num_dofs(); ++d) {
      psi[d] = {uni(gen), uni(gen)};
      chi[d] = uni(gen);
    }
    const ComplexField f{s, psi};
    const auto g = gauge_transform(f, QuadVectors(s->quad_size()), {s, Vec::Zero(s->num_dofs())}, {s, chi}, 10.0);
    const Vec r0 = density(f), r1 = density(g.psi);
    const double rel = ((r1 - r0).cwiseAbs().array() / r0.array()).maxCoeff();
    out.detail += fmt("; gauge density rel. change %.1e", rel);
    if (!(rel < 1e-14)) out.pass = false;
  }

  // Hodge invariants along an L-shape run with strong field
  {
    RunConfig cfg = preset("example31");
    cfg.params.T = 5.0;
    Simulation sim(cfg);
    double trace = 0.0, mean_v = 0.0, mean_q = 0.0, compat = 0.0;
    const FeSpace& s = *sim.space();
    while (sim.state().step < num_steps(cfg.params)) {
      sim.advance();
      const auto& st = sim.state();
      for (int d : s.boundary_dofs()) trace = std::max(trace, std::abs(st.potentials->u.coeffs[d]));
      if (st.w) {
        for (int d : s.boundary_dofs()) trace = std::max(trace, std::abs(st.w->coeffs[d]));
      }
      mean_v = std::max(mean_v, std::abs(s.mean(st.potentials->v.coeffs)));
      mean_q = std::max(mean_q, std::abs(s.mean(st.q)));
      compat = std::max(compat, NeumannSolver::compatibility_residual(load_gradient(s, st.F)));
    }
    out.detail += fmt("; trace %.1e", trace) + fmt(", mean v %.1e", mean_v) + fmt(", mean q %.1e", mean_q) +
                  fmt(", compatibility %.1e", compat);
    if (!(trace == 0.0 && mean_v < 1e-12 && mean_q < 1e-12 && compat < 1e-10)) out.pass = false;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out.detail += fmt("; %.1f s (limit 60 s)", secs);
  if (secs >= 60.0) out.pass = false;
  return out;
}

// ---------------------------------------------------------------------------
// 7. modulus bound on the unit square

Outcome criterion7() {
  RunConfig cfg = preset("example33");
  cfg.params.solver = SolverKind::hodge;
  Simulation sim(cfg);
  double worst = sim.state().psi.coeffs.cwiseAbs().maxCoeff();
  // free energy is a soft diagnostic here
  double prev = sim.post().energy(sim.state());
  int rises = 0;
  while (sim.state().step < num_steps(cfg.params)) {
    sim.advance();
    worst = std::max(worst, sim.state().psi.coeffs.cwiseAbs().maxCoeff());
    const double e = sim.post().energy(sim.state());
    if (sim.state().step > 5 && e > prev + 1e-8) ++rises;
    prev = e;
  }
  Outcome out;
  out.pass = worst <= 1.05;
  out.detail = fmt("max |psi| %.6f (limit 1.05)", worst) + "; energy increases after step 5: " + std::to_string(rises);
  return out;
}

// ---------------------------------------------------------------------------
// 8. byte-identical reruns

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Outcome criterion8() {
  const auto root = std::filesystem::temp_directory_path() / ("glvortex_acceptance_" + std::to_string(::getpid()));
  std::filesystem::remove_all(root);
  const auto a = root / "a", b = root / "b";
  Outcome out{true, ""};
  for (const auto& dir : {a, b}) {
    const std::string cmd = std::string("\"") + GLVORTEX_CLI + "\" run --preset example33 -q --out \"" + dir.string() +
                            "\" > /dev/null";
    if (std::system(cmd.c_str()) != 0) {
      std::filesystem::remove_all(root);
      return {false, "run failed: " + cmd};
    }
  }
  int files = 0;
  for (const auto& e : std::filesystem::directory_iterator(a)) {
    if (e.path().extension() != ".csv") continue;
    ++files;
    const auto other = b / e.path().filename();
    if (!std::filesystem::exists(other) || slurp(e.path()) != slurp(other)) {
      out.pass = false;
      out.detail += "differs: " + e.path().filename().string() + "; ";
    }
  }
  int snaps = 0;
  for (const auto& e : std::filesystem::directory_iterator(a)) {
    if (e.path().filename().string().rfind("snap_", 0) == 0) ++snaps;
  }
  if (snaps != 3) out.pass = false;
  out.detail += std::to_string(files) + " csv files compared, " + std::to_string(snaps) + " snapshots";
  std::filesystem::remove_all(root);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"hodge round trip", criterion1},       {"manufactured heat equation", criterion2},
      {"convex-domain agreement", criterion3}, {"L-shape refinement stability", criterion4},
      {"notch-apex vortex", criterion5},       {"fixed point and invariants", criterion6},
      {"modulus bound", criterion7},           {"determinism", criterion8},
  };
  std::vector<int> which;
  for (int i = 1; i < argc; ++i) which.push_back(std::atoi(argv[i]));
  if (which.empty()) {
    for (int i = 1; i <= static_cast<int>(criteria.size()); ++i) which.push_back(i);
  }
  bool all = true;
  for (int i : which) {
    if (i < 1 || i > static_cast<int>(criteria.size())) {
      std::fprintf(stderr, "error: no criterion %d\n", i);
      return 2;
    }
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i - 1].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %d %s %s: %s [%.1f s]\n", i, o.pass ? "PASS" : "FAIL", criteria[i - 1].first,
                o.detail.c_str(), secs);
    std::fflush(stdout);
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
