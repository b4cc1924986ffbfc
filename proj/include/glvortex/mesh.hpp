#pragma once

#include <array>
#include <cmath>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace glvortex {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Point2 a, Point2 b) = default;
};

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }

/// Boundary edge oriented with the domain on its left.
struct BoundaryEdge {
  int a = 0;
  int b = 0;
  int marker = 0;
};

/// A boundary segment that lies on a circle; nodes created on it by
/// refinement are projected back onto the circle.
struct Arc {
  int marker = 0;
  Point2 center;
  double radius = 1.0;
};

enum class NodeKind { interior, boundary, corner };

struct NodeClass {
  NodeKind kind = NodeKind::interior;
  Point2 normal;           // outward unit normal (boundary), or incoming-edge normal (corner)
  Point2 normal2;          // outgoing-edge normal (corner only)
  double interior_angle = M_PI;  // corner only
};

/// Conforming triangulation. Immutable after construction: the constructor
/// reorients clockwise triangles, orients boundary edges, checks topology and
/// classifies nodes.
class TriMesh {
 public:
  TriMesh(std::vector<Point2> nodes, std::vector<std::array<int, 3>> triangles,
          std::vector<BoundaryEdge> boundary, std::vector<Arc> arcs = {});

  const std::vector<Point2>& nodes() const { return nodes_; }
  const std::vector<std::array<int, 3>>& triangles() const { return triangles_; }
  const std::vector<BoundaryEdge>& boundary_edges() const { return boundary_; }
  const std::vector<Arc>& arcs() const { return arcs_; }
  const std::vector<NodeClass>& node_class() const { return node_class_; }

  int num_nodes() const { return static_cast<int>(nodes_.size()); }
  int num_triangles() const { return static_cast<int>(triangles_.size()); }

  /// Unique undirected edges (i < j), sorted lexicographically.
  const std::vector<std::array<int, 2>>& edges() const { return edges_; }
  /// Edge k of triangle t joins local vertices k and (k+1)%3.
  const std::vector<std::array<int, 3>>& triangle_edges() const { return tri_edges_; }
  /// Marker of each edge, or 0 for interior edges.
  const std::vector<int>& edge_marker() const { return edge_marker_; }

  double signed_area(int t) const;
  double total_area() const;
  /// Smallest interior angle over all triangles, radians.
  double min_angle() const;
  /// Node-adjacency lists (sorted).
  std::vector<std::vector<int>> node_neighbors() const;
  const Arc* arc_for_marker(int marker) const;
  bool is_boundary_node(int n) const { return node_class_[n].kind != NodeKind::interior; }

 private:
  void build_edges();
  void orient_boundary();
  void classify_nodes();

  std::vector<Point2> nodes_;
  std::vector<std::array<int, 3>> triangles_;
  std::vector<BoundaryEdge> boundary_;
  std::vector<Arc> arcs_;
  std::vector<NodeClass> node_class_;
  std::vector<std::array<int, 2>> edges_;
  std::vector<std::array<int, 3>> tri_edges_;
  std::vector<int> edge_marker_;
  std::vector<int> edge_tri_count_;
};

enum class DomainKind { unit_square, lshape, disk_notch, file };

struct RefineSpec {
  Point2 center;
  double radius = 0.0;
  int levels = 0;
};

struct MeshSpec {
  DomainKind kind = DomainKind::unit_square;
  int m = 16;
  int boundary_points = 256;
  double notch_depth = 0.25;
  double notch_halfangle = 0.1 * M_PI;
  std::string path;
  std::optional<RefineSpec> refine;
};

void validate(const MeshSpec& spec);

/// (m+1)x(m+1) grid on [0,1]^2, each cell cut along the (0,0)-(1,1) diagonal.
/// Markers 1..4: bottom, right, top, left.
TriMesh gen_unit_square(int m);

/// L-shape [-1/2,1/2]^2 minus the upper-right quadrant, h = 1/m. Markers 1..6
/// counterclockwise from the bottom side.
TriMesh gen_lshape(int m);

/// Unit disk with an inward triangular notch centred at polar angle 0.
/// Marker 1 is the circular arc, 2 and 3 the two notch edges.
TriMesh gen_disk_notch(const MeshSpec& spec);

/// Plain polygonal unit disk (no notch); marker 1.
TriMesh gen_disk(int boundary_points);

/// Longest-edge bisection of every triangle within `radius` of `center`,
/// repeated `levels` times, with conformity closure.
TriMesh refine_local(const TriMesh& mesh, Point2 center, double radius, int levels);

/// Builds the mesh described by a spec, including optional refinement.
TriMesh make_mesh(const MeshSpec& spec);

TriMesh read_mesh(const std::filesystem::path& path);
TriMesh parse_mesh(const std::string& text);
void write_mesh(const TriMesh& mesh, const std::filesystem::path& path);
std::string format_mesh(const TriMesh& mesh);

/// Topology and quality checks; returns a list of problems (empty when valid).
std::vector<std::string> check_mesh(const TriMesh& mesh);

}  // namespace glvortex
