#pragma once

#include <string>
#include <vector>

#include "glvortex/fem.hpp"

namespace glvortex {

/// Observed convergence of one refinement sweep.
struct RateCheck {
  std::string name;
  std::vector<double> sizes;   // m or 1/tau per run
  std::vector<double> errors;  // L2 errors
  std::vector<double> rates;   // log2 of successive error ratios
  double expected = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// Decomposition round trip for A = curl(sin pi x sin pi y) + grad(cos pi x cos pi y)
/// on the unit square with degree r.
RateCheck check_roundtrip(int r, const std::vector<int>& ms);
/// Backward-Euler heat problem u_t - Lap u = f with zero trace and a known
/// solution; error at T = 0.5. Space sweep uses tau = h^2.
RateCheck check_heat_space(const std::vector<int>& ms);
RateCheck check_heat_time(int m, const std::vector<double>& taus);

/// Full suite; `quick` uses smaller meshes.
std::vector<RateCheck> run_selftest(bool quick);

}  // namespace glvortex
