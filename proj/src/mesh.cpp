#include "glvortex/mesh.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "glvortex/error.hpp"

namespace glvortex {

namespace {

double angle_at(Point2 p, Point2 q, Point2 r) {
  // angle of triangle pqr at p
  const Point2 a = q - p;
  const Point2 b = r - p;
  return std::atan2(std::abs(cross(a, b)), dot(a, b));
}

Point2 edge_normal(Point2 a, Point2 b) {
  const Point2 d = b - a;
  const double len = norm(d);
  return {d.y / len, -d.x / len};
}

}  // namespace

TriMesh::TriMesh(std::vector<Point2> nodes, std::vector<std::array<int, 3>> triangles,
                 std::vector<BoundaryEdge> boundary, std::vector<Arc> arcs)
    : nodes_(std::move(nodes)),
      triangles_(std::move(triangles)),
      boundary_(std::move(boundary)),
      arcs_(std::move(arcs)) {
  const int nn = num_nodes();
  if (nn < 3 || triangles_.empty()) throw InvalidSpec("mesh needs at least one triangle");
  for (const auto& p : nodes_) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw InvalidSpec("non-finite node coordinate");
  }
  std::vector<char> used(nn, 0);
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    auto& tri = triangles_[t];
    for (int v : tri) {
      if (v < 0 || v >= nn) {
        throw InvalidSpec("triangle " + std::to_string(t) + " references missing node " +
                          std::to_string(v));
      }
      used[v] = 1;
    }
    const double a = signed_area(static_cast<int>(t));
    if (a == 0.0) throw InvalidSpec("triangle " + std::to_string(t) + " is degenerate");
    if (a < 0.0) std::swap(tri[1], tri[2]);
  }
  if (std::find(used.begin(), used.end(), 0) != used.end()) {
    throw InvalidSpec("mesh has nodes not referenced by any triangle");
  }

  // duplicate nodes
  double xmin = nodes_[0].x, xmax = xmin, ymin = nodes_[0].y, ymax = ymin;
  for (const auto& p : nodes_) {
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  const double tol = 1e-12 * std::max(xmax - xmin, ymax - ymin);
  std::vector<int> order(nn);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return nodes_[a].x < nodes_[b].x || (nodes_[a].x == nodes_[b].x && nodes_[a].y < nodes_[b].y);
  });
  for (int i = 0; i < nn; ++i) {
    for (int j = i + 1; j < nn && nodes_[order[j]].x - nodes_[order[i]].x <= tol; ++j) {
      if (std::abs(nodes_[order[j]].y - nodes_[order[i]].y) <= tol) {
        throw InvalidSpec("duplicate nodes " + std::to_string(order[i]) + " and " +
                          std::to_string(order[j]));
      }
    }
  }

  build_edges();
  orient_boundary();
  classify_nodes();
}

double TriMesh::signed_area(int t) const {
  const auto& tri = triangles_[t];
  return 0.5 * cross(nodes_[tri[1]] - nodes_[tri[0]], nodes_[tri[2]] - nodes_[tri[0]]);
}

double TriMesh::total_area() const {
  double s = 0.0;
  for (int t = 0; t < num_triangles(); ++t) s += signed_area(t);
  return s;
}

double TriMesh::min_angle() const {
  double amin = M_PI;
  for (const auto& tri : triangles_) {
    const Point2 p = nodes_[tri[0]], q = nodes_[tri[1]], r = nodes_[tri[2]];
    amin = std::min({amin, angle_at(p, q, r), angle_at(q, r, p), angle_at(r, p, q)});
  }
  return amin;
}

std::vector<std::vector<int>> TriMesh::node_neighbors() const {
  std::vector<std::vector<int>> nb(nodes_.size());
  for (const auto& e : edges_) {
    nb[e[0]].push_back(e[1]);
    nb[e[1]].push_back(e[0]);
  }
  for (auto& l : nb) std::sort(l.begin(), l.end());
  return nb;
}

const Arc* TriMesh::arc_for_marker(int marker) const {
  for (const auto& a : arcs_) {
    if (a.marker == marker) return &a;
  }
  return nullptr;
}

void TriMesh::build_edges() {
  std::vector<std::array<int, 3>> all;  // (lo, hi, tri*3+k)
  all.reserve(triangles_.size() * 3);
  for (int t = 0; t < num_triangles(); ++t) {
    for (int k = 0; k < 3; ++k) {
      int a = triangles_[t][k], b = triangles_[t][(k + 1) % 3];
      all.push_back({std::min(a, b), std::max(a, b), t * 3 + k});
    }
  }
  std::sort(all.begin(), all.end());
  tri_edges_.assign(triangles_.size(), {-1, -1, -1});
  edges_.clear();
  edge_tri_count_.clear();
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (i == 0 || all[i][0] != all[i - 1][0] || all[i][1] != all[i - 1][1]) {
      edges_.push_back({all[i][0], all[i][1]});
      edge_tri_count_.push_back(0);
    }
    const int e = static_cast<int>(edges_.size()) - 1;
    if (++edge_tri_count_[e] > 2) {
      throw InvalidSpec("edge " + std::to_string(all[i][0]) + "-" + std::to_string(all[i][1]) +
                        " is shared by more than two triangles");
    }
    tri_edges_[all[i][2] / 3][all[i][2] % 3] = e;
  }
}

void TriMesh::orient_boundary() {
  const auto edge_index = [&](int a, int b) -> int {
    const std::array<int, 2> key{std::min(a, b), std::max(a, b)};
    auto it = std::lower_bound(edges_.begin(), edges_.end(), key);
    if (it == edges_.end() || *it != key) return -1;
    return static_cast<int>(it - edges_.begin());
  };
  edge_marker_.assign(edges_.size(), 0);
  std::vector<char> seen(edges_.size(), 0);
  std::vector<int> boundary_of_edge(edges_.size(), -1);
  for (std::size_t i = 0; i < boundary_.size(); ++i) {
    auto& be = boundary_[i];
    const int e = edge_index(be.a, be.b);
    if (e < 0) {
      throw InvalidSpec("boundary edge " + std::to_string(be.a) + "-" + std::to_string(be.b) +
                        " is not a triangle edge");
    }
    if (edge_tri_count_[e] != 1) {
      throw InvalidSpec("boundary edge " + std::to_string(be.a) + "-" + std::to_string(be.b) +
                        " does not belong to exactly one triangle");
    }
    if (seen[e]) throw InvalidSpec("boundary edge listed twice");
    seen[e] = 1;
    boundary_of_edge[e] = static_cast<int>(i);
    if (be.marker == 0) throw InvalidSpec("boundary marker 0 is reserved for interior edges");
    edge_marker_[e] = be.marker;
  }
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    if (edge_tri_count_[e] == 1 && !seen[e]) {
      throw InvalidSpec("triangle edge " + std::to_string(edges_[e][0]) + "-" +
                        std::to_string(edges_[e][1]) + " lies on the boundary but has no marker");
    }
  }
  // orient each boundary edge as it appears in its counterclockwise triangle
  for (int t = 0; t < num_triangles(); ++t) {
    for (int k = 0; k < 3; ++k) {
      const int e = tri_edges_[t][k];
      if (edge_tri_count_[e] != 1) continue;
      auto& be = boundary_[boundary_of_edge[e]];
      be.a = triangles_[t][k];
      be.b = triangles_[t][(k + 1) % 3];
    }
  }
}

void TriMesh::classify_nodes() {
  const int nn = num_nodes();
  node_class_.assign(nn, NodeClass{});
  std::vector<int> incoming(nn, -1), outgoing(nn, -1);
  for (std::size_t i = 0; i < boundary_.size(); ++i) {
    const auto& be = boundary_[i];
    if (outgoing[be.a] != -1 || incoming[be.b] != -1) {
      throw InvalidSpec("boundary node with more than two boundary edges");
    }
    outgoing[be.a] = static_cast<int>(i);
    incoming[be.b] = static_cast<int>(i);
  }
  for (int n = 0; n < nn; ++n) {
    if (incoming[n] == -1 && outgoing[n] == -1) continue;
    if (incoming[n] == -1 || outgoing[n] == -1) {
      throw InvalidSpec("boundary loop is not closed at node " + std::to_string(n));
    }
    const auto& ein = boundary_[incoming[n]];
    const auto& eout = boundary_[outgoing[n]];
    auto& nc = node_class_[n];
    if (ein.marker == eout.marker) {
      if (const Arc* arc = arc_for_marker(ein.marker)) {
        const Point2 r = nodes_[n] - arc->center;
        nc.kind = NodeKind::boundary;
        nc.normal = (1.0 / norm(r)) * r;
        continue;
      }
    }
    const Point2 n_in = edge_normal(nodes_[ein.a], nodes_[ein.b]);
    const Point2 n_out = edge_normal(nodes_[eout.a], nodes_[eout.b]);
    const double turn = std::atan2(std::abs(cross(n_in, n_out)), dot(n_in, n_out));
    if (turn <= 1e-8) {
      nc.kind = NodeKind::boundary;
      nc.normal = n_in;
      continue;
    }
    nc.kind = NodeKind::corner;
    nc.normal = n_in;
    nc.normal2 = n_out;
    const Point2 to_next = nodes_[eout.b] - nodes_[n];
    const Point2 to_prev = nodes_[ein.a] - nodes_[n];
    double ang = std::atan2(cross(to_next, to_prev), dot(to_next, to_prev));
    if (ang <= 0.0) ang += 2.0 * M_PI;
    nc.interior_angle = ang;
  }
}

void validate(const MeshSpec& spec) {
  switch (spec.kind) {
    case DomainKind::unit_square:
      if (spec.m < 2) throw InvalidSpec("mesh.m must be >= 2");
      break;
    case DomainKind::lshape:
      if (spec.m < 2) throw InvalidSpec("mesh.m must be >= 2");
      if (spec.m % 2 != 0) throw InvalidSpec("mesh.m must be even for the L-shape");
      break;
    case DomainKind::disk_notch:
      if (spec.boundary_points < 16) throw InvalidSpec("mesh.boundary_points must be >= 16");
      if (!(spec.notch_depth > 0.0 && spec.notch_depth < 1.0)) {
        throw InvalidSpec("mesh.notch_depth must lie in (0, 1)");
      }
      if (!(spec.notch_halfangle > 0.0 && spec.notch_halfangle < M_PI / 4)) {
        throw InvalidSpec("mesh.notch_halfangle must lie in (0, pi/4)");
      }
      break;
    case DomainKind::file:
      if (spec.path.empty()) throw InvalidSpec("mesh.path is required for file meshes");
      break;
  }
  if (spec.refine) {
    if (spec.refine->levels < 0) throw InvalidSpec("mesh.refine_levels must be >= 0");
    if (spec.refine->levels > 0 && !(spec.refine->radius > 0.0)) {
      throw InvalidSpec("mesh.refine_radius must be > 0");
    }
  }
}

TriMesh make_mesh(const MeshSpec& spec) {
  validate(spec);
  auto base = [&]() -> TriMesh {
    switch (spec.kind) {
      case DomainKind::unit_square:
        return gen_unit_square(spec.m);
      case DomainKind::lshape:
        return gen_lshape(spec.m);
      case DomainKind::disk_notch:
        return gen_disk_notch(spec);
      case DomainKind::file:
        break;
    }
    return read_mesh(spec.path);
  }();
  if (spec.refine && spec.refine->levels > 0) {
    return refine_local(base, spec.refine->center, spec.refine->radius, spec.refine->levels);
  }
  return base;
}

std::vector<std::string> check_mesh(const TriMesh& mesh) {
  std::vector<std::string> problems;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    if (mesh.signed_area(t) <= 0.0) problems.push_back("triangle " + std::to_string(t) + " has non-positive area");
  }
  const double min_deg = mesh.min_angle() * 180.0 / M_PI;
  if (min_deg < 10.0) problems.push_back("minimum angle " + std::to_string(min_deg) + " deg below 10 deg");
  std::vector<int> deg(mesh.num_nodes(), 0);
  for (const auto& be : mesh.boundary_edges()) {
    ++deg[be.a];
    ++deg[be.b];
  }
  for (int n = 0; n < mesh.num_nodes(); ++n) {
    if (deg[n] != 0 && deg[n] != 2) {
      problems.push_back("boundary node " + std::to_string(n) + " has " + std::to_string(deg[n]) +
                         " boundary edges");
    }
  }
  return problems;
}

}  // namespace glvortex
