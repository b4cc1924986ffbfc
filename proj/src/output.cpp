#include "glvortex/output.hpp"

#include <cstdio>
#include <fstream>

#include "glvortex/error.hpp"

namespace glvortex {

namespace {

void append(std::string& out, const char* fmt, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, fmt, v);
  out += buf;
}

void append_g(std::string& out, double v) { append(out, "%.17g", v); }

void scalars(std::string& out, const char* name, const Vec& v) {
  out += "SCALARS ";
  out += name;
  out += " double 1\nLOOKUP_TABLE default\n";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    append_g(out, v[i]);
    out += '\n';
  }
}

void vectors(std::string& out, const char* name, const Vec& x, const Vec& y) {
  out += "VECTORS ";
  out += name;
  out += " double\n";
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    append_g(out, x[i]);
    out += ' ';
    append_g(out, y[i]);
    out += " 0\n";
  }
}

}  // namespace

std::string snapshot_name(double t, SolverKind solver, OutputFormat format) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "snap_t%.3f_%s.%s", t, to_string(solver).c_str(),
                format == OutputFormat::csv ? "csv" : "vtk");
  return buf;
}

std::string format_snapshot_csv(const FieldSnapshot& snap) {
  const auto& nodes = snap.mesh->nodes();
  const bool e = snap.Ex.has_value();
  std::string out = e ? "x,y,re_psi,im_psi,density,B,Ax,Ay,Ex,Ey\n" : "x,y,re_psi,im_psi,density,B,Ax,Ay\n";
  out.reserve(out.size() + nodes.size() * (e ? 250 : 200));
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double row[] = {nodes[i].x,       nodes[i].y, snap.re_psi[i], snap.im_psi[i], snap.density[i],
                          snap.B[i],        snap.Ax[i], snap.Ay[i],     e ? (*snap.Ex)[i] : 0.0,
                          e ? (*snap.Ey)[i] : 0.0};
    const int cols = e ? 10 : 8;
    for (int c = 0; c < cols; ++c) {
      if (c) out += ',';
      append_g(out, row[c]);
    }
    out += '\n';
  }
  return out;
}

std::string format_snapshot_vtk(const FieldSnapshot& snap) {
  const TriMesh& mesh = *snap.mesh;
  const int n = mesh.num_nodes(), m = mesh.num_triangles();
  std::string out = "# vtk DataFile Version 3.0\n";
  char title[96];
  std::snprintf(title, sizeof title, "glvortex t=%.3f solver=%s\n", snap.t, to_string(snap.solver).c_str());
  out += title;
  out += "ASCII\nDATASET UNSTRUCTURED_GRID\n";
  out += "POINTS " + std::to_string(n) + " double\n";
  for (const auto& p : mesh.nodes()) {
    append_g(out, p.x);
    out += ' ';
    append_g(out, p.y);
    out += " 0\n";
  }
  out += "CELLS " + std::to_string(m) + " " + std::to_string(4 * m) + "\n";
  for (const auto& t : mesh.triangles()) {
    out += "3 " + std::to_string(t[0]) + " " + std::to_string(t[1]) + " " + std::to_string(t[2]) + "\n";
  }
  out += "CELL_TYPES " + std::to_string(m) + "\n";
  for (int c = 0; c < m; ++c) out += "5\n";
  out += "POINT_DATA " + std::to_string(n) + "\n";
  scalars(out, "density", snap.density);
  scalars(out, "B", snap.B);
  scalars(out, "re_psi", snap.re_psi);
  scalars(out, "im_psi", snap.im_psi);
  vectors(out, "A", snap.Ax, snap.Ay);
  if (snap.Ex) vectors(out, "E", *snap.Ex, *snap.Ey);
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  auto partial = path;
  partial += ".partial";
  {
    std::ofstream f(partial, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot open " + partial.string() + " for writing");
    f.write(text.data(), static_cast<std::streamsize>(text.size()));
    f.close();
    if (!f) throw Error("write failed: " + partial.string());
  }
  std::error_code ec;
  std::filesystem::rename(partial, path, ec);
  if (ec) throw Error("cannot rename " + partial.string() + ": " + ec.message());
}

std::vector<std::filesystem::path> write_snapshot(const FieldSnapshot& snap, const std::filesystem::path& dir,
                                                  const std::vector<OutputFormat>& formats) {
  std::vector<std::filesystem::path> paths;
  for (auto f : formats) {
    const auto path = dir / snapshot_name(snap.t, snap.solver, f);
    write_file(path, f == OutputFormat::csv ? format_snapshot_csv(snap) : format_snapshot_vtk(snap));
    paths.push_back(path);
  }
  return paths;
}

std::string format_diagnostics_row(const Diagnostics& d) {
  std::string out;
  for (double v : {d.t, d.mean_density, d.min_density, d.max_abs_psi, d.energy}) {
    append_g(out, v);
    out += ',';
  }
  out += std::to_string(d.vortices) + "," + std::to_string(d.psi_iters) + "," + std::to_string(d.field_iters) + "\n";
  return out;
}

DiagnosticsWriter::DiagnosticsWriter(std::filesystem::path path) : path_(std::move(path)) {
  partial_ = path_;
  partial_ += ".partial";
  file_ = std::fopen(partial_.c_str(), "wb");
  if (!file_) throw Error("cannot open " + partial_.string() + " for writing");
  std::fputs("t,mean_density,min_density,max_abs_psi,energy,vortices,psi_iters,field_iters\n", file_);
}

DiagnosticsWriter::~DiagnosticsWriter() {
  if (file_) std::fclose(file_);
}

void DiagnosticsWriter::write(const Diagnostics& d) {
  if (!file_) throw Error("diagnostics already finished: " + path_.string());
  const auto row = format_diagnostics_row(d);
  if (std::fputs(row.c_str(), file_) < 0) throw Error("write failed: " + partial_.string());
}

void DiagnosticsWriter::finish() {
  if (!file_) return;
  const bool ok = std::fclose(file_) == 0;
  file_ = nullptr;
  if (!ok) throw Error("write failed: " + partial_.string());
  std::error_code ec;
  std::filesystem::rename(partial_, path_, ec);
  if (ec) throw Error("cannot rename " + partial_.string() + ": " + ec.message());
}

}  // namespace glvortex
