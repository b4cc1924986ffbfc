#include "glvortex/fem.hpp"

namespace glvortex {

SparseMat assemble_mass(const FeSpace& space) {
  const int n = space.dofs_per_cell();
  return assemble_cells<double>(space, [&](int c, Eigen::MatrixXd& K) {
    for (int q = 0; q < space.num_quad(); ++q) {
      const double w = space.quad_weight(c, q);
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) K(i, j) += w * space.value(q, i) * space.value(q, j);
      }
    }
  });
}

SparseMat assemble_stiffness(const FeSpace& space) {
  const int n = space.dofs_per_cell();
  return assemble_cells<double>(space, [&](int c, Eigen::MatrixXd& K) {
    for (int q = 0; q < space.num_quad(); ++q) {
      const double w = space.quad_weight(c, q);
      for (int i = 0; i < n; ++i) {
        const Point2 gi = space.grad(c, q, i);
        for (int j = 0; j < n; ++j) K(i, j) += w * dot(gi, space.grad(c, q, j));
      }
    }
  });
}

SparseMat assemble_weighted_mass(const FeSpace& space, const QuadScalars& coef) {
  const int n = space.dofs_per_cell();
  const int nq = space.num_quad();
  return assemble_cells<double>(space, [&](int c, Eigen::MatrixXd& K) {
    for (int q = 0; q < nq; ++q) {
      const double w = space.quad_weight(c, q) * coef[c * nq + q];
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) K(i, j) += w * space.value(q, i) * space.value(q, j);
      }
    }
  });
}

Vec load_values(const FeSpace& space, const QuadScalars& f) {
  Vec b = Vec::Zero(space.num_dofs());
  const int nq = space.num_quad();
  for (int c = 0; c < space.num_cells(); ++c) {
    const auto d = space.cell_dofs(c);
    for (int q = 0; q < nq; ++q) {
      const double w = space.quad_weight(c, q) * f[c * nq + q];
      for (int i = 0; i < space.dofs_per_cell(); ++i) b[d[i]] += w * space.value(q, i);
    }
  }
  return b;
}

Vec load_gradient(const FeSpace& space, const QuadVectors& g) {
  Vec b = Vec::Zero(space.num_dofs());
  const int nq = space.num_quad();
  for (int c = 0; c < space.num_cells(); ++c) {
    const auto d = space.cell_dofs(c);
    for (int q = 0; q < nq; ++q) {
      const double w = space.quad_weight(c, q);
      const Point2 gq = g[c * nq + q];
      for (int i = 0; i < space.dofs_per_cell(); ++i) b[d[i]] += w * dot(gq, space.grad(c, q, i));
    }
  }
  return b;
}

Vec load_curl(const FeSpace& space, const QuadVectors& g) {
  Vec b = Vec::Zero(space.num_dofs());
  const int nq = space.num_quad();
  for (int c = 0; c < space.num_cells(); ++c) {
    const auto d = space.cell_dofs(c);
    for (int q = 0; q < nq; ++q) {
      const double w = space.quad_weight(c, q);
      const Point2 gq = g[c * nq + q];
      for (int i = 0; i < space.dofs_per_cell(); ++i) {
        b[d[i]] += w * dot(gq, curl_of_grad(space.grad(c, q, i)));
      }
    }
  }
  return b;
}

}  // namespace glvortex
