#pragma once

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "glvortex/run.hpp"

namespace glvortex {

/// `snap_t5.000_hodge.csv`
std::string snapshot_name(double t, SolverKind solver, OutputFormat format);

/// x,y,re_psi,im_psi,density,B,Ax,Ay[,Ex,Ey], one row per vertex.
std::string format_snapshot_csv(const FieldSnapshot& snap);
/// Legacy ASCII VTK 3.0 unstructured grid of triangles.
std::string format_snapshot_vtk(const FieldSnapshot& snap);

/// Writes one file per format. Each file is written to `<name>.partial` and
/// renamed once complete. Throws Error naming the path on I/O failure.
std::vector<std::filesystem::path> write_snapshot(const FieldSnapshot& snap, const std::filesystem::path& dir,
                                                  const std::vector<OutputFormat>& formats);

/// Writes `text` to `path` through a `.partial` file.
void write_file(const std::filesystem::path& path, const std::string& text);

/// Streams the per-step diagnostics table to `<path>.partial`; finish()
/// renames it. Destroying an unfinished writer leaves the `.partial` file.
class DiagnosticsWriter {
 public:
  explicit DiagnosticsWriter(std::filesystem::path path);
  ~DiagnosticsWriter();
  DiagnosticsWriter(const DiagnosticsWriter&) = delete;
  DiagnosticsWriter& operator=(const DiagnosticsWriter&) = delete;

  void write(const Diagnostics& d);
  void finish();
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::filesystem::path partial_;
  std::FILE* file_ = nullptr;
};

std::string format_diagnostics_row(const Diagnostics& d);

}  // namespace glvortex
