#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "glvortex/post.hpp"

namespace glvortex {

enum class OutputFormat { csv, vtk };

struct RunConfig {
  std::string name = "run";
  MeshSpec mesh;
  SimParams params;
  Complex psi0 = 1.0;  // constant initial order parameter; A0 = 0
  std::vector<double> snapshot_times;
  std::filesystem::path output_dir = "out";
  std::vector<OutputFormat> formats{OutputFormat::csv};
  bool diagnostics = true;
};

/// Throws ConfigError when a field is out of range or a snapshot time is
/// outside [0, T] or not a multiple of tau (within 1e-9 tau).
void validate(const RunConfig& config);

/// Number of time steps, round(T / tau).
int num_steps(const SimParams& params);
/// Step index of a snapshot time; throws ConfigError unless t is within
/// 1e-9 tau of a step.
int snapshot_step(double t, double tau);

/// One time-dependent solve: mesh, space, solver, post-processor and the
/// current state.
class Simulation {
 public:
  Simulation(std::shared_ptr<const TriMesh> mesh, const SimParams& params, Complex psi0);
  explicit Simulation(const RunConfig& config);

  const SimState& state() const { return state_; }
  const TdglSolver& solver() const { return *solver_; }
  const PostProcessor& post() const { return *post_; }
  const SpacePtr& space() const { return space_; }
  const TriMesh& mesh() const { return space_->mesh(); }

  /// One step. A failure is rethrown as StepError naming the step index.
  void advance();
  /// Advances until state().step == step.
  void advance_to(int step);

  FieldSnapshot snapshot() const { return make_snapshot(*post_, *solver_, state_); }
  Diagnostics diagnostics() const { return diagnose(*post_, state_); }

 private:
  SpacePtr space_;
  std::unique_ptr<TdglSolver> solver_;
  std::unique_ptr<PostProcessor> post_;
  SimState state_;
};

struct RunSummary {
  int steps = 0;
  double seconds = 0.0;
  std::vector<std::filesystem::path> files;
  Diagnostics last;
};

/// Runs a config to T, writing snapshots and the diagnostics table into
/// config.output_dir. `on_snapshot` sees every snapshot before it is
/// written. Progress lines go to `log` when given.
RunSummary run(const RunConfig& config, std::ostream* log = nullptr,
               const std::function<void(const FieldSnapshot&)>& on_snapshot = nullptr);

}  // namespace glvortex
