#include <algorithm>
#include <functional>
#include <map>

#include "glvortex/error.hpp"
#include "glvortex/mesh.hpp"

namespace glvortex {

namespace {

using MarkerFn = std::function<int(Point2 a, Point2 b)>;

/// Derives boundary edges (edges with exactly one adjacent triangle) and
/// assigns markers from the edge geometry.
TriMesh assemble_mesh(std::vector<Point2> nodes, std::vector<std::array<int, 3>> tris,
                      const MarkerFn& marker, std::vector<Arc> arcs = {}) {
  for (auto& t : tris) {
    const double a = cross(nodes[t[1]] - nodes[t[0]], nodes[t[2]] - nodes[t[0]]);
    if (a < 0) std::swap(t[1], t[2]);
  }
  std::map<std::pair<int, int>, int> count;
  for (const auto& t : tris) {
    for (int k = 0; k < 3; ++k) {
      const int a = t[k], b = t[(k + 1) % 3];
      ++count[{std::min(a, b), std::max(a, b)}];
    }
  }
  std::vector<BoundaryEdge> boundary;
  for (const auto& t : tris) {
    for (int k = 0; k < 3; ++k) {
      const int a = t[k], b = t[(k + 1) % 3];
      if (count[{std::min(a, b), std::max(a, b)}] == 1) {
        boundary.push_back({a, b, marker(nodes[a], nodes[b])});
      }
    }
  }
  return TriMesh(std::move(nodes), std::move(tris), std::move(boundary), std::move(arcs));
}

/// Structured grid over [x0, x0+n*h] x [y0, y0+n*h], keeping cells accepted by
/// `keep(cell centre)`; unused nodes are dropped.
TriMesh grid_mesh(int n, double x0, double y0, double h, const std::function<bool(Point2)>& keep,
                  const MarkerFn& marker) {
  const int stride = n + 1;
  std::vector<int> index(stride * stride, -1);
  std::vector<Point2> nodes;
  std::vector<std::array<int, 3>> tris;
  const auto node = [&](int i, int j) {
    int& id = index[j * stride + i];
    if (id < 0) {
      id = static_cast<int>(nodes.size());
      nodes.push_back({x0 + i * h, y0 + j * h});
    }
    return id;
  };
  // first pass assigns node ids in grid order so numbering is row-major
  std::vector<char> cell_on(n * n, 0);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      cell_on[j * n + i] = keep({x0 + (i + 0.5) * h, y0 + (j + 0.5) * h});
    }
  }
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      bool touched = false;
      for (int dj = -1; dj <= 0; ++dj) {
        for (int di = -1; di <= 0; ++di) {
          const int ci = i + di, cj = j + dj;
          if (ci >= 0 && cj >= 0 && ci < n && cj < n && cell_on[cj * n + ci]) touched = true;
        }
      }
      if (touched) node(i, j);
    }
  }
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      if (!cell_on[j * n + i]) continue;
      const int v00 = node(i, j), v10 = node(i + 1, j), v11 = node(i + 1, j + 1), v01 = node(i, j + 1);
      tris.push_back({v00, v10, v11});
      tris.push_back({v00, v11, v01});
    }
  }
  return assemble_mesh(std::move(nodes), std::move(tris), marker);
}

}  // namespace

TriMesh gen_unit_square(int m) {
  if (m < 2) throw InvalidSpec("unit square needs m >= 2, got " + std::to_string(m));
  const double h = 1.0 / m;
  const auto marker = [](Point2 a, Point2 b) {
    const Point2 mid = 0.5 * (a + b);
    if (mid.y < 0.25 && std::abs(a.y - b.y) < 1e-14) return 1;
    if (mid.x > 0.75 && std::abs(a.x - b.x) < 1e-14) return 2;
    if (mid.y > 0.75 && std::abs(a.y - b.y) < 1e-14) return 3;
    return 4;
  };
  return grid_mesh(m, 0.0, 0.0, h, [](Point2) { return true; }, marker);
}

TriMesh gen_lshape(int m) {
  if (m < 2) throw InvalidSpec("L-shape needs m >= 2, got " + std::to_string(m));
  if (m % 2 != 0) throw InvalidSpec("L-shape needs even m so the corner is a grid point");
  const double h = 1.0 / m;
  const auto keep = [](Point2 c) { return !(c.x > 0.0 && c.y > 0.0); };
  const auto marker = [](Point2 a, Point2 b) {
    const Point2 mid = 0.5 * (a + b);
    const double eps = 1e-12;
    if (std::abs(mid.y + 0.5) < eps) return 1;
    if (std::abs(mid.x - 0.5) < eps) return 2;
    if (std::abs(mid.y) < eps && mid.x > 0.0) return 3;
    if (std::abs(mid.x) < eps && mid.y > 0.0) return 4;
    if (std::abs(mid.y - 0.5) < eps) return 5;
    return 6;
  };
  return grid_mesh(m, -0.5, -0.5, h, keep, marker);
}

namespace {

struct PolarPoint {
  double theta;
  Point2 p;
};

/// Connects two star-shaped rings (angles increasing, one full turn) with a
/// strip of triangles.
void zip_rings(const std::vector<PolarPoint>& inner_pts, const std::vector<int>& inner,
               const std::vector<PolarPoint>& outer_pts, const std::vector<int>& outer,
               std::vector<std::array<int, 3>>& tris) {
  const int p = static_cast<int>(inner.size());
  const int q = static_cast<int>(outer.size());
  const double a0 = inner_pts[0].theta;
  // outer start: last outer angle <= a0 (cyclically)
  int j0 = q - 1;
  for (int j = 0; j < q; ++j) {
    if (outer_pts[j].theta <= a0) j0 = j;
  }
  const auto outer_angle = [&](int k) {  // k in [0, q]
    const int idx = (j0 + k) % q;
    double th = outer_pts[idx].theta;
    if (j0 + k >= q) th += 2.0 * M_PI;
    if (outer_pts[j0].theta > a0) th -= 2.0 * M_PI;  // j0 wrapped from the end
    return th;
  };
  const auto inner_angle = [&](int k) { return inner_pts[k % p].theta + (k >= p ? 2.0 * M_PI : 0.0); };
  int i = 0, j = 0;
  while (i < p || j < q) {
    const bool advance_outer = (i == p) || (j < q && outer_angle(j + 1) < inner_angle(i + 1));
    const int a = inner[i % p];
    const int b = outer[(j0 + j) % q];
    if (advance_outer) {
      tris.push_back({a, b, outer[(j0 + j + 1) % q]});
      ++j;
    } else {
      tris.push_back({a, b, inner[(i + 1) % p]});
      ++i;
    }
  }
}

/// Layered triangulation of a domain star-shaped about the origin whose
/// boundary is given by polar points; interior ring radii scale with R(theta).
TriMesh layered_star_mesh(const std::vector<Point2>& boundary_pts,
                          const std::function<double(double)>& radius_of, const MarkerFn& marker,
                          std::vector<Arc> arcs) {
  const int n = static_cast<int>(boundary_pts.size());
  double perimeter = 0.0;
  for (int k = 0; k < n; ++k) perimeter += norm(boundary_pts[(k + 1) % n] - boundary_pts[k]);
  const double h = perimeter / n;
  const int rings = std::max(2, static_cast<int>(std::lround(1.0 / h)));

  std::vector<Point2> nodes{{0.0, 0.0}};
  std::vector<std::array<int, 3>> tris;
  std::vector<std::vector<PolarPoint>> ring_pts;
  std::vector<std::vector<int>> ring_ids;
  for (int k = 1; k < rings; ++k) {
    const double rho = static_cast<double>(k) / rings;
    const int count = std::max(6, static_cast<int>(std::lround(2.0 * M_PI * rho / h)));
    const double shift = (k % 2 == 0) ? 0.0 : M_PI / count;
    std::vector<PolarPoint> pts;
    std::vector<int> ids;
    for (int j = 0; j < count; ++j) {
      double th = shift + 2.0 * M_PI * j / count;
      if (th >= M_PI) th -= 2.0 * M_PI;
      const double r = rho * radius_of(th);
      pts.push_back({th, {r * std::cos(th), r * std::sin(th)}});
    }
    std::sort(pts.begin(), pts.end(), [](const PolarPoint& a, const PolarPoint& b) { return a.theta < b.theta; });
    for (const auto& pp : pts) {
      ids.push_back(static_cast<int>(nodes.size()));
      nodes.push_back(pp.p);
    }
    ring_pts.push_back(std::move(pts));
    ring_ids.push_back(std::move(ids));
  }
  {
    std::vector<PolarPoint> pts;
    for (const auto& p : boundary_pts) pts.push_back({std::atan2(p.y, p.x), p});
    std::sort(pts.begin(), pts.end(), [](const PolarPoint& a, const PolarPoint& b) { return a.theta < b.theta; });
    std::vector<int> ids;
    for (const auto& pp : pts) {
      ids.push_back(static_cast<int>(nodes.size()));
      nodes.push_back(pp.p);
    }
    ring_pts.push_back(std::move(pts));
    ring_ids.push_back(std::move(ids));
  }
  // centre fan
  const auto& first = ring_ids.front();
  for (std::size_t j = 0; j < first.size(); ++j) {
    tris.push_back({0, first[j], first[(j + 1) % first.size()]});
  }
  for (std::size_t k = 0; k + 1 < ring_ids.size(); ++k) {
    zip_rings(ring_pts[k], ring_ids[k], ring_pts[k + 1], ring_ids[k + 1], tris);
  }
  for (auto& t : tris) {
    if (cross(nodes[t[1]] - nodes[t[0]], nodes[t[2]] - nodes[t[0]]) < 0) std::swap(t[1], t[2]);
  }

  // Laplacian smoothing of interior nodes, rejecting moves that fold a triangle
  const int first_boundary = static_cast<int>(nodes.size()) - n;
  std::vector<std::vector<int>> node_tris(nodes.size());
  std::vector<std::vector<int>> nbrs(nodes.size());
  for (std::size_t t = 0; t < tris.size(); ++t) {
    for (int k = 0; k < 3; ++k) {
      node_tris[tris[t][k]].push_back(static_cast<int>(t));
      nbrs[tris[t][k]].push_back(tris[t][(k + 1) % 3]);
      nbrs[tris[t][k]].push_back(tris[t][(k + 2) % 3]);
    }
  }
  for (auto& l : nbrs) {
    std::sort(l.begin(), l.end());
    l.erase(std::unique(l.begin(), l.end()), l.end());
  }
  const auto min_local_angle = [&](int v) {
    double amin = M_PI;
    for (int t : node_tris[v]) {
      const Point2 a = nodes[tris[t][0]], b = nodes[tris[t][1]], c = nodes[tris[t][2]];
      if (cross(b - a, c - a) <= 0) return -1.0;
      for (int s = 0; s < 3; ++s) {
        const Point2 p = nodes[tris[t][s]], q = nodes[tris[t][(s + 1) % 3]], r = nodes[tris[t][(s + 2) % 3]];
        amin = std::min(amin, std::atan2(std::abs(cross(q - p, r - p)), dot(q - p, r - p)));
      }
    }
    return amin;
  };
  for (int sweep = 0; sweep < 8; ++sweep) {
    for (int v = 1; v < first_boundary; ++v) {
      Point2 avg;
      for (int w : nbrs[v]) avg = avg + nodes[w];
      avg = (1.0 / nbrs[v].size()) * avg;
      const Point2 old = nodes[v];
      const double before = min_local_angle(v);
      nodes[v] = avg;
      if (min_local_angle(v) < std::min(before, 0.35)) nodes[v] = old;
    }
  }
  return assemble_mesh(std::move(nodes), std::move(tris), marker, std::move(arcs));
}

}  // namespace

TriMesh gen_disk(int boundary_points) {
  if (boundary_points < 16) throw InvalidSpec("disk needs at least 16 boundary points");
  std::vector<Point2> bpts;
  for (int k = 0; k < boundary_points; ++k) {
    const double th = 2.0 * M_PI * k / boundary_points;
    bpts.push_back({std::cos(th), std::sin(th)});
  }
  return layered_star_mesh(
      bpts, [](double) { return 1.0; }, [](Point2, Point2) { return 1; },
      {Arc{1, {0.0, 0.0}, 1.0}});
}

TriMesh gen_disk_notch(const MeshSpec& spec) {
  MeshSpec s = spec;
  s.kind = DomainKind::disk_notch;
  validate(s);
  const int n = spec.boundary_points;
  const double alpha = spec.notch_halfangle;
  const Point2 apex{1.0 - spec.notch_depth, 0.0};
  const Point2 s_plus{std::cos(alpha), std::sin(alpha)};
  const Point2 s_minus{std::cos(alpha), -std::sin(alpha)};
  if (apex.x >= s_plus.x) {
    throw InvalidSpec("degenerate notch: apex does not cut inside the chord between the shoulders");
  }
  const double edge_len = norm(s_plus - apex);
  const double arc_len = 2.0 * M_PI - 2.0 * alpha;
  const double h = (arc_len + 2.0 * edge_len) / n;
  const int edge_segs = std::max(2, static_cast<int>(std::lround(edge_len / h)));
  const int arc_segs = n - 2 * edge_segs;
  if (arc_segs < 8) throw InvalidSpec("degenerate notch: too few boundary points on the arc");

  std::vector<Point2> bpts;
  for (int k = 0; k <= arc_segs; ++k) {  // s_plus .. s_minus, counterclockwise
    const double th = alpha + arc_len * k / arc_segs;
    bpts.push_back({std::cos(th), std::sin(th)});
  }
  bpts.back() = s_minus;
  bpts.front() = s_plus;
  for (int k = 1; k <= edge_segs; ++k) {
    bpts.push_back(s_minus + (static_cast<double>(k) / edge_segs) * (apex - s_minus));
  }
  for (int k = 1; k < edge_segs; ++k) {
    bpts.push_back(apex + (static_cast<double>(k) / edge_segs) * (s_plus - apex));
  }

  const auto radius_of = [=](double th) {
    if (std::abs(th) >= alpha) return 1.0;
    // ray from origin meets the notch edge apex -> shoulder
    const Point2 sh = th >= 0 ? s_plus : s_minus;
    const Point2 dir{std::cos(th), std::sin(th)};
    const Point2 e = sh - apex;
    return cross(apex, e) / cross(dir, e);
  };
  const auto marker = [=](Point2 a, Point2 b) {
    const Point2 mid = 0.5 * (a + b);
    if (std::abs(std::atan2(mid.y, mid.x)) > alpha) return 1;
    return mid.y < 0 ? 2 : 3;
  };
  return layered_star_mesh(bpts, radius_of, marker, {Arc{1, {0.0, 0.0}, 1.0}});
}

}  // namespace glvortex
