#include <algorithm>
#include <cmath>

#include "glvortex/error.hpp"
#include "glvortex/fem.hpp"

namespace glvortex {

PointLocator::PointLocator(std::shared_ptr<const TriMesh> mesh) : mesh_(std::move(mesh)) {
  const auto& nodes = mesh_->nodes();
  double xmin = nodes[0].x, xmax = xmin, ymin = nodes[0].y, ymax = ymin;
  for (const auto& p : nodes) {
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  const int nb = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(mesh_->num_triangles()) / 2.0)));
  nx_ = ny_ = nb;
  const double pad = 1e-9 * std::max(xmax - xmin, ymax - ymin);
  x0_ = xmin - pad;
  y0_ = ymin - pad;
  dx_ = (xmax - xmin + 2 * pad) / nx_;
  dy_ = (ymax - ymin + 2 * pad) / ny_;
  buckets_.resize(static_cast<std::size_t>(nx_) * ny_);
  for (int t = 0; t < mesh_->num_triangles(); ++t) {
    const auto& tri = mesh_->triangles()[t];
    double bx0 = 1e300, bx1 = -1e300, by0 = 1e300, by1 = -1e300;
    for (int v : tri) {
      bx0 = std::min(bx0, nodes[v].x);
      bx1 = std::max(bx1, nodes[v].x);
      by0 = std::min(by0, nodes[v].y);
      by1 = std::max(by1, nodes[v].y);
    }
    const int i0 = std::clamp(static_cast<int>((bx0 - x0_) / dx_) - 1, 0, nx_ - 1);
    const int i1 = std::clamp(static_cast<int>((bx1 - x0_) / dx_) + 1, 0, nx_ - 1);
    const int j0 = std::clamp(static_cast<int>((by0 - y0_) / dy_) - 1, 0, ny_ - 1);
    const int j1 = std::clamp(static_cast<int>((by1 - y0_) / dy_) + 1, 0, ny_ - 1);
    for (int j = j0; j <= j1; ++j) {
      for (int i = i0; i <= i1; ++i) buckets_[static_cast<std::size_t>(j) * nx_ + i].push_back(t);
    }
  }
}

std::optional<PointLocator::Hit> PointLocator::locate(Point2 p, double tol) const {
  const int i = static_cast<int>(std::floor((p.x - x0_) / dx_));
  const int j = static_cast<int>(std::floor((p.y - y0_) / dy_));
  if (i < -1 || j < -1 || i > nx_ || j > ny_) return std::nullopt;
  std::optional<Hit> best;
  double best_violation = 1e300;
  const auto& nodes = mesh_->nodes();
  for (int jj = std::max(0, j - 1); jj <= std::min(ny_ - 1, j + 1); ++jj) {
    for (int ii = std::max(0, i - 1); ii <= std::min(nx_ - 1, i + 1); ++ii) {
      for (int t : buckets_[static_cast<std::size_t>(jj) * nx_ + ii]) {
        const auto& tri = mesh_->triangles()[t];
        const Point2 a = nodes[tri[0]], b = nodes[tri[1]], c = nodes[tri[2]];
        const double area2 = cross(b - a, c - a);
        const std::array<double, 3> lam{cross(b - p, c - p) / area2, cross(c - p, a - p) / area2,
                                        cross(a - p, b - p) / area2};
        // distance-like violation: most negative barycentric times local size
        const double size = std::sqrt(std::abs(area2));
        const double violation = -std::min({lam[0], lam[1], lam[2]}) * size;
        if (violation < best_violation) {
          best_violation = violation;
          best = Hit{t, lam};
        }
      }
    }
  }
  if (!best || best_violation > tol) return std::nullopt;
  return best;
}

double evaluate_at(const ScalarField& f, const PointLocator& locator, Point2 p, double tol) {
  const auto hit = locator.locate(p, tol);
  if (!hit) {
    throw EvaluationError("point (" + std::to_string(p.x) + ", " + std::to_string(p.y) +
                          ") lies outside the source mesh");
  }
  double phi[6];
  lagrange_values(f.space->degree(), hit->bary, phi);
  const auto dofs = f.space->cell_dofs(hit->cell);
  double s = 0.0;
  for (int k = 0; k < f.space->dofs_per_cell(); ++k) s += phi[k] * f.coeffs[dofs[k]];
  return s;
}

}  // namespace glvortex
