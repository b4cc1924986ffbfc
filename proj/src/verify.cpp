#include "glvortex/verify.hpp"

#include <cmath>

#include "glvortex/hodge.hpp"

namespace glvortex {

namespace {

constexpr double kPi = M_PI;

Point2 roundtrip_field(Point2 p) {
  const double sx = std::sin(kPi * p.x), cx = std::cos(kPi * p.x);
  const double sy = std::sin(kPi * p.y), cy = std::cos(kPi * p.y);
  // curl(sx sy) + grad(cx cy)
  return {kPi * sx * cy - kPi * sx * cy, -kPi * cx * sy - kPi * cx * sy};
}

double heat_exact(Point2 p, double t) {
  return std::sin(kPi * p.x) * std::sin(kPi * p.y) * std::cos(2 * kPi * t);
}

double heat_source(Point2 p, double t) {
  const double s = std::sin(kPi * p.x) * std::sin(kPi * p.y);
  return s * (-2 * kPi * std::sin(2 * kPi * t) + 2 * kPi * kPi * std::cos(2 * kPi * t));
}

void finish(RateCheck& c) {
  c.pass = c.errors.size() >= 2;
  for (std::size_t k = 1; k < c.errors.size(); ++k) {
    const double r = std::log2(c.errors[k - 1] / c.errors[k]) / std::log2(c.sizes[k] / c.sizes[k - 1]);
    c.rates.push_back(r);
    if (!(std::abs(r - c.expected) <= c.tolerance)) c.pass = false;
  }
}

double heat_error(int m, double tau, double T) {
  const auto mesh = std::make_shared<const TriMesh>(gen_unit_square(m));
  const auto s = std::make_shared<const FeSpace>(mesh, 1);
  const SparseMat M = assemble_mass(*s);
  const SparseMat A = SparseMat(M / tau + assemble_stiffness(*s));
  const DirichletSolver solver(*s, A, s->boundary_dofs());
  Vec u = s->interpolate(std::function<double(Point2)>([](Point2 p) { return heat_exact(p, 0.0); }));
  const int n = static_cast<int>(std::lround(T / tau));
  for (int k = 1; k <= n; ++k) {
    const double t = k * tau;
    const Vec f = load_values(*s, s->sample(std::function<double(Point2)>([t](Point2 p) { return heat_source(p, t); })));
    u = solver.solve(M * u / tau + f);
  }
  const FeSpace fine(mesh, 1, QuadRule::collapsed(6));
  const auto uh = fine.eval(u);
  const auto ue = fine.sample(std::function<double(Point2)>([T](Point2 p) { return heat_exact(p, T); }));
  QuadScalars sq(uh.size());
  for (std::size_t k = 0; k < uh.size(); ++k) sq[k] = (uh[k] - ue[k]) * (uh[k] - ue[k]);
  return std::sqrt(fine.integrate(sq));
}

}  // namespace

RateCheck check_roundtrip(int r, const std::vector<int>& ms) {
  RateCheck c;
  c.name = "hodge round trip r=" + std::to_string(r);
  c.expected = r;
  c.tolerance = 0.25;
  for (int m : ms) {
    const auto mesh = std::make_shared<const TriMesh>(gen_unit_square(m));
    const auto s = std::make_shared<const FeSpace>(mesh, r);
    const auto pair = decompose_vector(s, s->sample(roundtrip_field));
    const auto fine = std::make_shared<const FeSpace>(mesh, r, QuadRule::collapsed(8));
    const auto a = reconstruct({{fine, pair.u.coeffs}, {fine, pair.v.coeffs}});
    const auto ref = fine->sample(roundtrip_field);
    QuadScalars sq(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) sq[k] = dot(a[k] - ref[k], a[k] - ref[k]);
    c.sizes.push_back(m);
    c.errors.push_back(std::sqrt(fine->integrate(sq)));
  }
  finish(c);
  return c;
}

RateCheck check_heat_space(const std::vector<int>& ms) {
  RateCheck c;
  c.name = "heat equation, space (tau = h^2)";
  c.expected = 2.0;
  c.tolerance = 0.25;
  for (int m : ms) {
    const double h = 1.0 / m;
    // tau = h^2 rounded so that T is a whole number of steps
    const double tau = 0.5 / std::round(0.5 / (h * h));
    c.sizes.push_back(m);
    c.errors.push_back(heat_error(m, tau, 0.5));
  }
  finish(c);
  return c;
}

RateCheck check_heat_time(int m, const std::vector<double>& taus) {
  RateCheck c;
  c.name = "heat equation, time (m = " + std::to_string(m) + ")";
  c.expected = 1.0;
  c.tolerance = 0.25;
  for (double tau : taus) {
    c.sizes.push_back(1.0 / tau);
    c.errors.push_back(heat_error(m, tau, 0.5));
  }
  finish(c);
  return c;
}

std::vector<RateCheck> run_selftest(bool quick) {
  const std::vector<int> ms = quick ? std::vector<int>{8, 16, 32} : std::vector<int>{16, 32, 64};
  std::vector<RateCheck> out;
  out.push_back(check_roundtrip(1, ms));
  out.push_back(check_roundtrip(2, ms));
  out.push_back(check_heat_space(quick ? std::vector<int>{8, 16} : std::vector<int>{8, 16, 32}));
  out.push_back(check_heat_time(quick ? 32 : 64, {0.05, 0.025, 0.0125}));
  return out;
}

}  // namespace glvortex
