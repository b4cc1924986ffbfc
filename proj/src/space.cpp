#include <algorithm>

#include "glvortex/error.hpp"
#include "glvortex/fem.hpp"

namespace glvortex {

FeSpace::FeSpace(std::shared_ptr<const TriMesh> mesh, int degree)
    : FeSpace(mesh, degree, (degree == 1 || degree == 2) ? default_rule(degree) : QuadRule{}) {}

FeSpace::FeSpace(std::shared_ptr<const TriMesh> mesh, int degree, QuadRule rule)
    : mesh_(std::move(mesh)), degree_(degree), nloc_(degree == 1 ? 3 : 6), rule_(std::move(rule)) {
  if (degree != 1 && degree != 2) {
    throw InvalidSpec("unsupported element degree " + std::to_string(degree) + " (expected 1 or 2)");
  }
  if (!mesh_) throw InvalidSpec("finite element space needs a mesh");
  build_dofs();
  build_element_data();
  build_pattern();
}

void FeSpace::build_dofs() {
  const auto& mesh = *mesh_;
  const int nn = mesh.num_nodes();
  dof_coords_ = mesh.nodes();
  dof_class_.resize(nn);
  for (int n = 0; n < nn; ++n) {
    const auto& nc = mesh.node_class()[n];
    dof_class_[n] = {nc.kind, nc.normal};
  }
  if (degree_ == 2) {
    std::vector<Point2> edge_normal(mesh.edges().size());
    for (const auto& be : mesh.boundary_edges()) {
      const std::array<int, 2> key{std::min(be.a, be.b), std::max(be.a, be.b)};
      const auto e = std::lower_bound(mesh.edges().begin(), mesh.edges().end(), key) - mesh.edges().begin();
      const Point2 d = mesh.nodes()[be.b] - mesh.nodes()[be.a];
      edge_normal[e] = (1.0 / norm(d)) * Point2{d.y, -d.x};
    }
    for (std::size_t e = 0; e < mesh.edges().size(); ++e) {
      const auto& ed = mesh.edges()[e];
      dof_coords_.push_back(0.5 * (mesh.nodes()[ed[0]] + mesh.nodes()[ed[1]]));
      if (mesh.edge_marker()[e] != 0) {
        dof_class_.push_back({NodeKind::boundary, edge_normal[e]});
      } else {
        dof_class_.push_back({});
      }
    }
  }
  cell_dofs_.resize(static_cast<std::size_t>(mesh.num_triangles()) * nloc_);
  for (int c = 0; c < mesh.num_triangles(); ++c) {
    int* d = cell_dofs_.data() + static_cast<std::size_t>(c) * nloc_;
    for (int k = 0; k < 3; ++k) d[k] = mesh.triangles()[c][k];
    if (degree_ == 2) {
      for (int k = 0; k < 3; ++k) d[3 + k] = nn + mesh.triangle_edges()[c][k];
    }
  }
  for (int d = 0; d < num_dofs(); ++d) {
    switch (dof_class_[d].kind) {
      case NodeKind::interior:
        interior_dofs_.push_back(d);
        break;
      case NodeKind::corner:
        corner_dofs_.push_back(d);
        boundary_dofs_.push_back(d);
        break;
      case NodeKind::boundary:
        boundary_dofs_.push_back(d);
        break;
    }
  }
}

void FeSpace::build_element_data() {
  const auto& mesh = *mesh_;
  const int nq = rule_.size();
  if (nq == 0) throw InvalidSpec("empty quadrature rule");
  vals_.resize(static_cast<std::size_t>(nq) * nloc_);
  for (int q = 0; q < nq; ++q) lagrange_values(degree_, rule_.bary[q], &vals_[q * nloc_]);

  area_.resize(mesh.num_triangles());
  grads_.resize(static_cast<std::size_t>(mesh.num_triangles()) * nq * nloc_);
  dof_weights_ = Vec::Zero(num_dofs());
  for (int c = 0; c < mesh.num_triangles(); ++c) {
    const auto& tri = mesh.triangles()[c];
    const Point2 p0 = mesh.nodes()[tri[0]], p1 = mesh.nodes()[tri[1]], p2 = mesh.nodes()[tri[2]];
    const double a = mesh.signed_area(c);
    area_[c] = a;
    const double s = 1.0 / (2.0 * a);
    const Point2 gl[3] = {{s * (p1.y - p2.y), s * (p2.x - p1.x)},
                          {s * (p2.y - p0.y), s * (p0.x - p2.x)},
                          {s * (p0.y - p1.y), s * (p1.x - p0.x)}};
    for (int q = 0; q < nq; ++q) {
      Point2* g = &grads_[(static_cast<std::size_t>(c) * nq + q) * nloc_];
      if (degree_ == 1) {
        g[0] = gl[0];
        g[1] = gl[1];
        g[2] = gl[2];
      } else {
        const auto& lam = rule_.bary[q];
        for (int k = 0; k < 3; ++k) g[k] = (4.0 * lam[k] - 1.0) * gl[k];
        for (int k = 0; k < 3; ++k) {
          const int l = (k + 1) % 3;
          g[3 + k] = 4.0 * (lam[l] * gl[k] + lam[k] * gl[l]);
        }
      }
      const double w = quad_weight(c, q);
      const auto dofs = cell_dofs(c);
      for (int i = 0; i < nloc_; ++i) dof_weights_[dofs[i]] += w * value(q, i);
    }
  }
}

void FeSpace::build_pattern() {
  const int n = num_dofs();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(num_cells()) * nloc_ * nloc_);
  for (int c = 0; c < num_cells(); ++c) {
    const auto d = cell_dofs(c);
    for (int i = 0; i < nloc_; ++i) {
      for (int j = 0; j < nloc_; ++j) trip.emplace_back(d[i], d[j], 0.0);
    }
  }
  pattern_.resize(n, n);
  pattern_.setFromTriplets(trip.begin(), trip.end());
  pattern_.makeCompressed();
  const int* outer = pattern_.outerIndexPtr();
  const int* inner = pattern_.innerIndexPtr();
  slots_.resize(static_cast<std::size_t>(num_cells()) * nloc_ * nloc_);
  for (int c = 0; c < num_cells(); ++c) {
    const auto d = cell_dofs(c);
    for (int i = 0; i < nloc_; ++i) {
      const int* begin = inner + outer[d[i]];
      const int* end = inner + outer[d[i] + 1];
      for (int j = 0; j < nloc_; ++j) {
        const int* pos = std::lower_bound(begin, end, d[j]);
        slots_[(static_cast<std::size_t>(c) * nloc_ + i) * nloc_ + j] = static_cast<int>(pos - inner);
      }
    }
  }
}

Point2 FeSpace::quad_point(int cell, int q) const {
  const auto& tri = mesh_->triangles()[cell];
  const auto& lam = rule_.bary[q];
  const auto& nodes = mesh_->nodes();
  return lam[0] * nodes[tri[0]] + lam[1] * nodes[tri[1]] + lam[2] * nodes[tri[2]];
}

QuadScalars FeSpace::eval(const Vec& coeffs) const {
  const int nq = num_quad();
  QuadScalars out(static_cast<std::size_t>(quad_size()), 0.0);
  for (int c = 0; c < num_cells(); ++c) {
    const auto d = cell_dofs(c);
    for (int q = 0; q < nq; ++q) {
      double s = 0.0;
      for (int i = 0; i < nloc_; ++i) s += coeffs[d[i]] * value(q, i);
      out[c * nq + q] = s;
    }
  }
  return out;
}

std::vector<Complex> FeSpace::eval(const CVec& coeffs) const {
  const int nq = num_quad();
  std::vector<Complex> out(static_cast<std::size_t>(quad_size()));
  for (int c = 0; c < num_cells(); ++c) {
    const auto d = cell_dofs(c);
    for (int q = 0; q < nq; ++q) {
      Complex s = 0.0;
      for (int i = 0; i < nloc_; ++i) s += coeffs[d[i]] * value(q, i);
      out[c * nq + q] = s;
    }
  }
  return out;
}

QuadVectors FeSpace::eval_grad(const Vec& coeffs) const {
  const int nq = num_quad();
  QuadVectors out(static_cast<std::size_t>(quad_size()));
  for (int c = 0; c < num_cells(); ++c) {
    const auto d = cell_dofs(c);
    for (int q = 0; q < nq; ++q) {
      Point2 s;
      for (int i = 0; i < nloc_; ++i) s = s + coeffs[d[i]] * grad(c, q, i);
      out[c * nq + q] = s;
    }
  }
  return out;
}

Vec FeSpace::interpolate(const std::function<double(Point2)>& f) const {
  Vec v(num_dofs());
  for (int d = 0; d < num_dofs(); ++d) v[d] = f(dof_coords_[d]);
  return v;
}

CVec FeSpace::interpolate(const std::function<Complex(Point2)>& f) const {
  CVec v(num_dofs());
  for (int d = 0; d < num_dofs(); ++d) v[d] = f(dof_coords_[d]);
  return v;
}

QuadVectors FeSpace::sample(const std::function<Point2(Point2)>& f) const {
  QuadVectors out(static_cast<std::size_t>(quad_size()));
  for (int c = 0; c < num_cells(); ++c) {
    for (int q = 0; q < num_quad(); ++q) out[c * num_quad() + q] = f(quad_point(c, q));
  }
  return out;
}

QuadScalars FeSpace::sample(const std::function<double(Point2)>& f) const {
  QuadScalars out(static_cast<std::size_t>(quad_size()));
  for (int c = 0; c < num_cells(); ++c) {
    for (int q = 0; q < num_quad(); ++q) out[c * num_quad() + q] = f(quad_point(c, q));
  }
  return out;
}

double FeSpace::integrate(const QuadScalars& f) const {
  double s = 0.0;
  for (int c = 0; c < num_cells(); ++c) {
    for (int q = 0; q < num_quad(); ++q) s += quad_weight(c, q) * f[c * num_quad() + q];
  }
  return s;
}

double FeSpace::mean(const Vec& coeffs) const { return dof_weights_.dot(coeffs) / dof_weights_.sum(); }

}  // namespace glvortex
