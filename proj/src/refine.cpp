#include <algorithm>
#include <map>

#include "glvortex/error.hpp"
#include "glvortex/mesh.hpp"

namespace glvortex {

namespace {

double point_segment_distance(Point2 p, Point2 a, Point2 b) {
  const Point2 d = b - a;
  const double len2 = dot(d, d);
  double s = len2 > 0 ? dot(p - a, d) / len2 : 0.0;
  s = std::clamp(s, 0.0, 1.0);
  return norm(p - (a + s * d));
}

double point_triangle_distance(Point2 p, Point2 a, Point2 b, Point2 c) {
  const double d1 = cross(b - a, p - a), d2 = cross(c - b, p - b), d3 = cross(a - c, p - c);
  if (d1 >= 0 && d2 >= 0 && d3 >= 0) return 0.0;
  return std::min({point_segment_distance(p, a, b), point_segment_distance(p, b, c),
                   point_segment_distance(p, c, a)});
}

/// Local index (0..2) of the longest edge; ties broken by the smaller global
/// edge id so neighbours agree.
int longest_edge(const TriMesh& mesh, int t) {
  const auto& tri = mesh.triangles()[t];
  const auto& te = mesh.triangle_edges()[t];
  int best = 0;
  double best_len = -1.0;
  for (int k = 0; k < 3; ++k) {
    const double len = norm(mesh.nodes()[tri[(k + 1) % 3]] - mesh.nodes()[tri[k]]);
    if (len > best_len * (1.0 + 1e-12) ||
        (std::abs(len - best_len) <= 1e-12 * best_len && te[k] < te[best])) {
      best = k;
      best_len = len;
    }
  }
  return best;
}

/// One round of longest-edge bisection of the marked triangles.
TriMesh bisect_once(const TriMesh& mesh, const std::vector<char>& marked_tri, int max_sweeps) {
  const int ne = static_cast<int>(mesh.edges().size());
  std::vector<char> edge_marked(ne, 0);
  std::vector<int> longest(mesh.num_triangles());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    longest[t] = longest_edge(mesh, t);
    if (marked_tri[t]) edge_marked[mesh.triangle_edges()[t][longest[t]]] = 1;
  }
  // closure: any triangle with a marked edge must also split its longest edge
  bool changed = true;
  int sweeps = 0;
  while (changed) {
    if (++sweeps > max_sweeps) throw Error("refinement closure did not terminate");
    changed = false;
    for (int t = 0; t < mesh.num_triangles(); ++t) {
      const auto& te = mesh.triangle_edges()[t];
      const int le = te[longest[t]];
      if (!edge_marked[le] && (edge_marked[te[0]] || edge_marked[te[1]] || edge_marked[te[2]])) {
        edge_marked[le] = 1;
        changed = true;
      }
    }
  }

  std::vector<Point2> nodes = mesh.nodes();
  std::vector<int> midpoint(ne, -1);
  for (int e = 0; e < ne; ++e) {
    if (!edge_marked[e]) continue;
    const auto& ed = mesh.edges()[e];
    Point2 mid = 0.5 * (nodes[ed[0]] + nodes[ed[1]]);
    if (const Arc* arc = mesh.arc_for_marker(mesh.edge_marker()[e])) {
      const Point2 r = mid - arc->center;
      mid = arc->center + (arc->radius / norm(r)) * r;
    }
    midpoint[e] = static_cast<int>(nodes.size());
    nodes.push_back(mid);
  }

  std::vector<std::array<int, 3>> tris;
  tris.reserve(mesh.num_triangles() * 2);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& te = mesh.triangle_edges()[t];
    const int L = longest[t];
    if (!edge_marked[te[L]]) {
      tris.push_back(mesh.triangles()[t]);
      continue;
    }
    // rotate so the longest edge is local edge 0: vertices v0 v1 (edge) and v2
    const auto& tri = mesh.triangles()[t];
    const int v0 = tri[L], v1 = tri[(L + 1) % 3], v2 = tri[(L + 2) % 3];
    const int e1 = te[(L + 1) % 3];  // v1-v2
    const int e2 = te[(L + 2) % 3];  // v2-v0
    const int m0 = midpoint[te[L]];
    // halves: (v0, m0, v2) and (m0, v1, v2)
    if (edge_marked[e2]) {
      const int m2 = midpoint[e2];
      tris.push_back({v0, m0, m2});
      tris.push_back({m0, v2, m2});
    } else {
      tris.push_back({v0, m0, v2});
    }
    if (edge_marked[e1]) {
      const int m1 = midpoint[e1];
      tris.push_back({m0, v1, m1});
      tris.push_back({m0, m1, v2});
    } else {
      tris.push_back({m0, v1, v2});
    }
  }

  std::vector<BoundaryEdge> boundary;
  {
    std::map<std::pair<int, int>, int> edge_id;
    for (int e = 0; e < ne; ++e) edge_id[{mesh.edges()[e][0], mesh.edges()[e][1]}] = e;
    for (const auto& be : mesh.boundary_edges()) {
      const int e = edge_id.at({std::min(be.a, be.b), std::max(be.a, be.b)});
      if (edge_marked[e]) {
        boundary.push_back({be.a, midpoint[e], be.marker});
        boundary.push_back({midpoint[e], be.b, be.marker});
      } else {
        boundary.push_back(be);
      }
    }
  }
  for (const auto& t : tris) {
    if (cross(nodes[t[1]] - nodes[t[0]], nodes[t[2]] - nodes[t[0]]) <= 0) {
      throw Error("refinement produced an inverted triangle (boundary projection too coarse)");
    }
  }
  return TriMesh(std::move(nodes), std::move(tris), std::move(boundary), mesh.arcs());
}

}  // namespace

TriMesh refine_local(const TriMesh& mesh, Point2 center, double radius, int levels) {
  if (levels < 0) throw InvalidSpec("refinement levels must be >= 0");
  if (levels == 0) return mesh;
  if (!(radius > 0.0)) throw InvalidSpec("refinement radius must be > 0");
  TriMesh current = mesh;
  for (int level = 0; level < levels; ++level) {
    std::vector<char> marked(current.num_triangles(), 0);
    for (int t = 0; t < current.num_triangles(); ++t) {
      const auto& tri = current.triangles()[t];
      marked[t] = point_triangle_distance(center, current.nodes()[tri[0]], current.nodes()[tri[1]],
                                          current.nodes()[tri[2]]) <= radius;
    }
    current = bisect_once(current, marked, 10 * levels);
  }
  return current;
}

}  // namespace glvortex
