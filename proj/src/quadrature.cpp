#include <cmath>

#include "glvortex/error.hpp"
#include "glvortex/fem.hpp"

namespace glvortex {

namespace {

// Orbits of a symmetric rule: (weight, a, b) gives the permutations of
// (a, b, 1-a-b); a == b gives three points, a == b == 1/3 one point.
struct Orbit {
  double weight;
  double a;
  double b;
};

QuadRule from_orbits(std::initializer_list<Orbit> orbits, int degree) {
  QuadRule r;
  r.degree = degree;
  for (const auto& o : orbits) {
    const double c = 1.0 - o.a - o.b;
    std::vector<std::array<double, 3>> pts;
    if (std::abs(o.a - o.b) < 1e-15 && std::abs(o.a - c) < 1e-15) {
      pts = {{o.a, o.b, c}};
    } else if (std::abs(o.a - o.b) < 1e-15) {
      pts = {{c, o.a, o.a}, {o.a, c, o.a}, {o.a, o.a, c}};
    } else {
      pts = {{o.a, o.b, c}, {o.b, c, o.a}, {c, o.a, o.b}, {o.b, o.a, c}, {o.a, c, o.b}, {c, o.b, o.a}};
    }
    for (const auto& p : pts) {
      r.bary.push_back(p);
      r.weights.push_back(0.5 * o.weight);
    }
  }
  return r;
}

}  // namespace

QuadRule QuadRule::symmetric(int degree) {
  switch (degree) {
    case 1:
      return from_orbits({{1.0, 1.0 / 3, 1.0 / 3}}, 1);
    case 2:
      return from_orbits({{1.0 / 3, 1.0 / 6, 1.0 / 6}}, 2);
    case 4:
      return from_orbits({{0.223381589678011, 0.445948490915965, 0.445948490915965},
                          {0.109951743655322, 0.091576213509771, 0.091576213509771}},
                         4);
    case 6:
      return from_orbits({{0.116786275726379, 0.249286745170910, 0.249286745170910},
                          {0.050844906370207, 0.063089014491502, 0.063089014491502},
                          {0.082851075618374, 0.310352451033784, 0.053145049844817}},
                         6);
    default:
      throw InvalidSpec("no symmetric quadrature rule of degree " + std::to_string(degree));
  }
}

QuadRule QuadRule::collapsed(int n) {
  if (n < 1) throw InvalidSpec("collapsed rule needs n >= 1");
  // Gauss-Legendre on [0, 1] by Newton iteration on P_n
  std::vector<double> x(n), w(n);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = 0.5 * (1.0 - z);
    w[i] = 1.0 / ((1.0 - z * z) * dp * dp);  // 2/((1-z^2) P'^2), halved for [0,1]
  }
  QuadRule r;
  r.degree = 2 * n - 2;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double u = x[i];
      const double v = x[j] * (1.0 - u);
      r.bary.push_back({1.0 - u - v, u, v});
      r.weights.push_back(w[i] * w[j] * (1.0 - u));
    }
  }
  return r;
}

QuadRule default_rule(int fe_degree) { return QuadRule::symmetric(fe_degree <= 1 ? 4 : 6); }

void lagrange_values(int degree, const std::array<double, 3>& lam, double* out) {
  if (degree == 1) {
    out[0] = lam[0];
    out[1] = lam[1];
    out[2] = lam[2];
    return;
  }
  for (int k = 0; k < 3; ++k) out[k] = lam[k] * (2.0 * lam[k] - 1.0);
  out[3] = 4.0 * lam[0] * lam[1];
  out[4] = 4.0 * lam[1] * lam[2];
  out[5] = 4.0 * lam[2] * lam[0];
}

}  // namespace glvortex
