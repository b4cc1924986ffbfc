#include <cstdio>
#include <fstream>
#include <sstream>

#include "glvortex/error.hpp"
#include "glvortex/mesh.hpp"

namespace glvortex {

// Format:
//   glmesh 1
//   nodes N      / N lines "x y"
//   triangles M  / M lines "i j k" (0-based)
//   boundary K   / K lines "a b marker"
// Curved segments are recorded as "# arc <marker> <cx> <cy> <r>" comment
// lines so that readers unaware of them still accept the file.

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct LineReader {
  std::istringstream in;
  int line_no = 0;
  std::vector<Arc> arcs;

  explicit LineReader(const std::string& text) : in(text) {}

  /// Next non-blank, non-comment line; false at end of input.
  bool next(std::string& out) {
    std::string line;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      const auto first = line.find_first_not_of(" \t");
      if (first == std::string::npos) continue;
      if (line[first] == '#') {
        std::istringstream c(line.substr(first + 1));
        std::string tag;
        Arc a;
        if (c >> tag && tag == "arc" && c >> a.marker >> a.center.x >> a.center.y >> a.radius) {
          arcs.push_back(a);
        }
        continue;
      }
      out = line.substr(first);
      return true;
    }
    return false;
  }
};

int section_count(LineReader& r, const std::string& name) {
  std::string line;
  if (!r.next(line)) throw ParseError("expected section '" + name + "', got end of file", r.line_no);
  std::istringstream s(line);
  std::string key;
  long count = -1;
  std::string extra;
  if (!(s >> key >> count) || key != name || count < 0 || (s >> extra)) {
    throw ParseError("expected '" + name + " <count>', got '" + line + "'", r.line_no);
  }
  return static_cast<int>(count);
}

}  // namespace

std::string format_mesh(const TriMesh& mesh) {
  std::ostringstream out;
  out << "glmesh 1\n";
  for (const auto& a : mesh.arcs()) {
    out << "# arc " << a.marker << ' ' << fmt17(a.center.x) << ' ' << fmt17(a.center.y) << ' '
        << fmt17(a.radius) << '\n';
  }
  out << "nodes " << mesh.num_nodes() << '\n';
  for (const auto& p : mesh.nodes()) out << fmt17(p.x) << ' ' << fmt17(p.y) << '\n';
  out << "triangles " << mesh.num_triangles() << '\n';
  for (const auto& t : mesh.triangles()) out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  out << "boundary " << mesh.boundary_edges().size() << '\n';
  for (const auto& b : mesh.boundary_edges()) out << b.a << ' ' << b.b << ' ' << b.marker << '\n';
  return out.str();
}

TriMesh parse_mesh(const std::string& text) {
  LineReader r(text);
  std::string line;
  if (!r.next(line)) throw ParseError("empty mesh file", r.line_no);
  {
    std::istringstream s(line);
    std::string magic;
    int version = 0;
    if (!(s >> magic >> version) || magic != "glmesh" || version != 1) {
      throw ParseError("expected header 'glmesh 1'", r.line_no);
    }
  }
  const int nn = section_count(r, "nodes");
  std::vector<Point2> nodes(nn);
  for (int i = 0; i < nn; ++i) {
    if (!r.next(line)) throw ParseError("unexpected end of file in nodes", r.line_no);
    std::istringstream s(line);
    std::string extra;
    if (!(s >> nodes[i].x >> nodes[i].y) || (s >> extra)) {
      throw ParseError("node " + std::to_string(i) + ": expected 'x y'", r.line_no);
    }
  }
  const int nt = section_count(r, "triangles");
  std::vector<std::array<int, 3>> tris(nt);
  for (int i = 0; i < nt; ++i) {
    if (!r.next(line)) throw ParseError("unexpected end of file in triangles", r.line_no);
    std::istringstream s(line);
    std::string extra;
    auto& t = tris[i];
    if (!(s >> t[0] >> t[1] >> t[2]) || (s >> extra)) {
      throw ParseError("triangle " + std::to_string(i) + ": expected 'i j k'", r.line_no);
    }
    for (int v : t) {
      if (v < 0 || v >= nn) {
        throw ParseError("triangle " + std::to_string(i) + " references missing node " + std::to_string(v),
                         r.line_no);
      }
    }
  }
  const int nb = section_count(r, "boundary");
  std::vector<BoundaryEdge> boundary(nb);
  for (int i = 0; i < nb; ++i) {
    if (!r.next(line)) throw ParseError("unexpected end of file in boundary", r.line_no);
    std::istringstream s(line);
    std::string extra;
    auto& b = boundary[i];
    if (!(s >> b.a >> b.b >> b.marker) || (s >> extra)) {
      throw ParseError("boundary edge " + std::to_string(i) + ": expected 'a b marker'", r.line_no);
    }
    if (b.a < 0 || b.a >= nn || b.b < 0 || b.b >= nn) {
      throw ParseError("boundary edge " + std::to_string(i) + " references a missing node", r.line_no);
    }
  }
  if (r.next(line)) throw ParseError("trailing content '" + line + "'", r.line_no);
  try {
    return TriMesh(std::move(nodes), std::move(tris), std::move(boundary), std::move(r.arcs));
  } catch (const InvalidSpec& e) {
    throw ParseError(e.what(), r.line_no);
  }
}

TriMesh read_mesh(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open mesh file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_mesh(ss.str());
}

void write_mesh(const TriMesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write mesh file " + path.string());
  out << format_mesh(mesh);
  if (!out) throw Error("write failed for " + path.string());
}

}  // namespace glvortex
