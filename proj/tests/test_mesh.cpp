#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>

#include "glvortex/error.hpp"
#include "glvortex/mesh.hpp"

using namespace glvortex;

namespace {

int count_corners(const TriMesh& mesh, double angle, double tol = 1e-9) {
  int c = 0;
  for (const auto& nc : mesh.node_class()) {
    if (nc.kind == NodeKind::corner && std::abs(nc.interior_angle - angle) < tol) ++c;
  }
  return c;
}

int count_all_corners(const TriMesh& mesh) {
  int c = 0;
  for (const auto& nc : mesh.node_class()) c += nc.kind == NodeKind::corner;
  return c;
}

// Boundary polygon traversal used by the brute-force oracle below.
std::vector<Point2> boundary_polygon(const TriMesh& mesh) {
  std::vector<int> next(mesh.num_nodes(), -1);
  for (const auto& be : mesh.boundary_edges()) next[be.a] = be.b;
  std::vector<Point2> poly;
  const int start = mesh.boundary_edges().front().a;
  int v = start;
  do {
    poly.push_back(mesh.nodes()[v]);
    v = next[v];
  } while (v != start);
  return poly;
}

bool inside_polygon(const std::vector<Point2>& poly, Point2 p) {
  bool in = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const Point2 a = poly[i], b = poly[j];
    if ((a.y > p.y) != (b.y > p.y) && p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x) in = !in;
  }
  return in;
}

// Interior angle at a boundary point by scanning directions on a tiny circle.
double scanned_angle(const std::vector<Point2>& poly, Point2 p, double radius) {
  const int samples = 20000;
  int inside = 0;
  for (int k = 0; k < samples; ++k) {
    const double th = 2.0 * M_PI * (k + 0.5) / samples;
    inside += inside_polygon(poly, {p.x + radius * std::cos(th), p.y + radius * std::sin(th)});
  }
  return 2.0 * M_PI * inside / samples;
}

void check_invariants(const TriMesh& mesh) {
  for (int t = 0; t < mesh.num_triangles(); ++t) REQUIRE(mesh.signed_area(t) > 0.0);
  CHECK(check_mesh(mesh).empty());
}

}  // namespace

TEST_CASE("unit square counts and area") {
  const auto mesh = gen_unit_square(2);
  CHECK(mesh.num_nodes() == 9);
  CHECK(mesh.num_triangles() == 8);
  CHECK(mesh.boundary_edges().size() == 8);
  for (int m : {2, 3, 7, 32}) {
    const auto mm = gen_unit_square(m);
    CHECK(std::abs(mm.total_area() - 1.0) < 1e-12);
    CHECK(count_corners(mm, M_PI / 2) == 4);
    CHECK(count_all_corners(mm) == 4);
    check_invariants(mm);
  }
  const auto m32 = gen_unit_square(32);
  CHECK(m32.num_nodes() == 33 * 33);
  CHECK_THROWS_AS(gen_unit_square(1), InvalidSpec);
}

TEST_CASE("unit square markers follow the sides") {
  const auto mesh = gen_unit_square(4);
  for (const auto& be : mesh.boundary_edges()) {
    const Point2 mid = 0.5 * (mesh.nodes()[be.a] + mesh.nodes()[be.b]);
    if (mid.y == 0.0) CHECK(be.marker == 1);
    if (mid.x == 1.0) CHECK(be.marker == 2);
    if (mid.y == 1.0) CHECK(be.marker == 3);
    if (mid.x == 0.0) CHECK(be.marker == 4);
  }
}

TEST_CASE("L-shape geometry") {
  for (int m : {2, 4, 16, 32}) {
    const auto mesh = gen_lshape(m);
    CHECK(std::abs(mesh.total_area() - 0.75) < 1e-12);
    CHECK(count_corners(mesh, 1.5 * M_PI) == 1);
    CHECK(count_corners(mesh, 0.5 * M_PI) == 5);
    check_invariants(mesh);
  }
  const auto mesh = gen_lshape(16);
  int found = 0;
  for (int n = 0; n < mesh.num_nodes(); ++n) {
    const auto& nc = mesh.node_class()[n];
    if (nc.kind == NodeKind::corner && std::abs(nc.interior_angle - 1.5 * M_PI) < 1e-9) {
      CHECK(mesh.nodes()[n] == Point2{0.0, 0.0});
      ++found;
    }
  }
  CHECK(found == 1);
  CHECK_THROWS_AS(gen_lshape(15), InvalidSpec);
  CHECK_THROWS_AS(gen_lshape(0), InvalidSpec);
}

TEST_CASE("disk with notch") {
  MeshSpec spec;
  spec.kind = DomainKind::disk_notch;
  spec.boundary_points = 256;
  const auto mesh = gen_disk_notch(spec);
  check_invariants(mesh);
  CHECK(mesh.boundary_edges().size() == 256);
  for (const auto& be : mesh.boundary_edges()) {
    if (be.marker != 1) continue;
    CHECK(std::abs(norm(mesh.nodes()[be.a]) - 1.0) < 1e-12);
    CHECK(std::abs(norm(mesh.nodes()[be.b]) - 1.0) < 1e-12);
  }
  CHECK(count_all_corners(mesh) == 3);

  SUBCASE("corner angles agree with a brute-force scan") {
    const auto poly = boundary_polygon(mesh);
    int reentrant = 0, convex = 0;
    for (int n = 0; n < mesh.num_nodes(); ++n) {
      const auto& nc = mesh.node_class()[n];
      if (nc.kind != NodeKind::corner) continue;
      const double scanned = scanned_angle(poly, mesh.nodes()[n], 1e-4);
      CHECK(std::abs(scanned - nc.interior_angle) < 2e-3);
      if (nc.interior_angle > M_PI) {
        ++reentrant;
        CHECK(mesh.nodes()[n].x == doctest::Approx(0.75));
      } else {
        ++convex;
      }
    }
    CHECK(reentrant == 1);
    CHECK(convex == 2);
  }

  SUBCASE("area converges to the notched-disk area") {
    const double alpha = spec.notch_halfangle, d = spec.notch_depth;
    const double exact = M_PI - alpha + (1.0 - d) * std::sin(alpha);
    for (int n : {64, 128, 256, 512}) {
      MeshSpec s = spec;
      s.boundary_points = n;
      const auto mm = gen_disk_notch(s);
      CHECK(std::abs(mm.total_area() - exact) < 30.0 / (static_cast<double>(n) * n));
      CHECK(mm.total_area() < exact);
    }
  }

  SUBCASE("degenerate notches are rejected") {
    MeshSpec s = spec;
    s.notch_depth = 0.01;
    s.notch_halfangle = 0.7;  // apex beyond the chord
    CHECK_THROWS_AS(gen_disk_notch(s), InvalidSpec);
    s = spec;
    s.notch_depth = 1.0;
    CHECK_THROWS_AS(gen_disk_notch(s), InvalidSpec);
    s = spec;
    s.boundary_points = 8;
    CHECK_THROWS_AS(gen_disk_notch(s), InvalidSpec);
  }
}

TEST_CASE("plain disk area approaches pi at second order") {
  double prev = 0.0;
  for (int n : {64, 128, 256}) {
    const auto mesh = gen_disk(n);
    check_invariants(mesh);
    const double err = M_PI - mesh.total_area();
    CHECK(err > 0.0);
    CHECK(err < 25.0 / (static_cast<double>(n) * n));
    if (prev > 0.0) CHECK(prev / err == doctest::Approx(4.0).epsilon(0.05));
    prev = err;
    CHECK(count_all_corners(mesh) == 0);
  }
}

TEST_CASE("minimum angle of generated meshes") {
  for (int m : {2, 8, 16, 64}) CHECK(gen_unit_square(m).min_angle() >= 10.0 * M_PI / 180.0);
  for (int m : {2, 8, 16, 64}) CHECK(gen_lshape(m).min_angle() >= 10.0 * M_PI / 180.0);
  for (int n : {16, 32, 64, 100, 256, 512}) {
    MeshSpec s;
    s.kind = DomainKind::disk_notch;
    s.boundary_points = n;
    const auto mesh = gen_disk_notch(s);
    CHECK_MESSAGE(mesh.min_angle() >= 10.0 * M_PI / 180.0, "boundary_points=" << n);
    CHECK(check_mesh(mesh).empty());
  }
}

TEST_CASE("local refinement") {
  SUBCASE("zero levels is the identity") {
    const auto mesh = gen_unit_square(4);
    const auto same = refine_local(mesh, {0.5, 0.5}, 0.3, 0);
    CHECK(same.nodes() == mesh.nodes());
    CHECK(same.triangles() == mesh.triangles());
  }
  SUBCASE("corner refinement of the 2x2 square") {
    const auto mesh = gen_unit_square(2);
    const auto fine = refine_local(mesh, {0.0, 0.0}, 0.25, 1);
    CHECK(fine.num_triangles() > 8);
    CHECK(fine.min_angle() >= 0.5 * mesh.min_angle() - 1e-12);
    CHECK(std::abs(fine.total_area() - 1.0) < 1e-12);
    check_invariants(fine);
    CHECK(count_corners(fine, M_PI / 2) == 4);
  }
  SUBCASE("repeated refinement stays conforming") {
    const auto mesh = gen_lshape(8);
    const auto fine = refine_local(mesh, {0.0, 0.0}, 0.1, 3);
    CHECK(std::abs(fine.total_area() - 0.75) < 1e-12);
    CHECK(fine.min_angle() >= 0.5 * mesh.min_angle() - 1e-12);
    CHECK(count_corners(fine, 1.5 * M_PI) == 1);
    check_invariants(fine);
  }
  SUBCASE("arc nodes are projected onto the circle") {
    MeshSpec s;
    s.kind = DomainKind::disk_notch;
    s.boundary_points = 64;
    const auto mesh = gen_disk_notch(s);
    const auto fine = refine_local(mesh, {0.75, 0.0}, 0.4, 2);
    CHECK(fine.num_nodes() > mesh.num_nodes());
    CHECK(fine.boundary_edges().size() > mesh.boundary_edges().size());
    for (const auto& be : fine.boundary_edges()) {
      if (be.marker != 1) continue;
      CHECK(std::abs(norm(fine.nodes()[be.a]) - 1.0) < 1e-12);
    }
    CHECK(count_all_corners(fine) == 3);
    check_invariants(fine);
  }
}

TEST_CASE("mesh file round trip") {
  const auto dir = std::filesystem::temp_directory_path() / "glvortex_mesh_test";
  std::filesystem::create_directories(dir);
  for (const auto& mesh : {gen_unit_square(2), gen_lshape(4), gen_disk(32)}) {
    write_mesh(mesh, dir / "m.glmesh");
    const auto back = read_mesh(dir / "m.glmesh");
    CHECK(back.nodes() == mesh.nodes());
    CHECK(back.triangles() == mesh.triangles());
    REQUIRE(back.boundary_edges().size() == mesh.boundary_edges().size());
    for (std::size_t i = 0; i < mesh.boundary_edges().size(); ++i) {
      CHECK(back.boundary_edges()[i].a == mesh.boundary_edges()[i].a);
      CHECK(back.boundary_edges()[i].b == mesh.boundary_edges()[i].b);
      CHECK(back.boundary_edges()[i].marker == mesh.boundary_edges()[i].marker);
    }
    CHECK(back.arcs().size() == mesh.arcs().size());
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("mesh parse errors and reorientation") {
  const std::string missing =
      "glmesh 1\nnodes 3\n0 0\n1 0\n0 1\ntriangles 1\n0 1 7\nboundary 3\n0 1 1\n1 2 1\n2 0 1\n";
  try {
    parse_mesh(missing);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("triangle 0") != std::string::npos);
    CHECK(e.line() == 7);
  }
  CHECK_THROWS_AS(parse_mesh("glmesh 2\n"), ParseError);
  CHECK_THROWS_AS(parse_mesh("glmesh 1\nnodes 1\n0\n"), ParseError);

  const std::string clockwise =
      "# comment\nglmesh 1\n\nnodes 3\n0 0\n1 0\n0 1\ntriangles 1\n0 2 1\nboundary 3\n0 1 1\n1 2 1\n2 0 1\n";
  const auto mesh = parse_mesh(clockwise);
  CHECK(mesh.signed_area(0) == doctest::Approx(0.5));
  CHECK(count_all_corners(mesh) == 3);
}
