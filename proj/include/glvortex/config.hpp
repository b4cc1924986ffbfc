#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "glvortex/run.hpp"

namespace glvortex {

/// Config files are `key = value` lines grouped under `[mesh]`, `[params]`,
/// `[time]` and `[output]`. `#` starts a comment. Unknown sections or keys,
/// malformed values and failed validation raise ConfigError naming the key
/// and line.
///
///   [mesh]    domain = unit_square | lshape | disk_notch | file
///             m, boundary_points, notch_depth, notch_halfangle, path,
///             refine_center = x y, refine_radius, refine_levels
///   [params]  solver, degree, eta, kappa, H, psi0 (e.g. 0.6+0.8i), A0 = zero,
///             track_w
///   [time]    tau, T, snapshots = t1, t2, ...
///   [output]  dir, formats = csv, vtk, diagnostics = true|false
///
/// A `preset = NAME` line in `[params]` or before any section starts from
/// that preset; later keys override it.
RunConfig parse_config(const std::filesystem::path& path);
RunConfig parse_config_text(const std::string& text);

/// Default text of the config format, listing every key with its default.
std::string config_help();

std::vector<std::string> preset_names();
/// example31, example32_h08, example32_h09, example32_h202, example33.
/// `full` selects the complete long-horizon run where the default is
/// shortened.
RunConfig preset(const std::string& name, bool full = false);

}  // namespace glvortex
