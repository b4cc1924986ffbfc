#include "glvortex/run.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "glvortex/error.hpp"
#include "glvortex/output.hpp"

namespace glvortex {

void validate(const RunConfig& config) {
  try {
    validate(config.mesh);
    validate(config.params);
  } catch (const InvalidSpec& e) {
    throw ConfigError(e.what());
  }
  const double T = config.params.T, tau = config.params.tau;
  for (double t : config.snapshot_times) {
    if (t < 0.0 || t > T + 1e-9 * tau) {
      throw ConfigError("time.snapshots: " + std::to_string(t) + " outside [0, T]");
    }
    snapshot_step(t, tau);
  }
}

int num_steps(const SimParams& params) { return static_cast<int>(std::lround(params.T / params.tau)); }

int snapshot_step(double t, double tau) {
  const double k = std::round(t / tau);
  if (std::abs(k * tau - t) > 1e-9 * tau) {
    throw ConfigError("time.snapshots: " + std::to_string(t) + " is not a multiple of tau");
  }
  return static_cast<int>(k);
}

Simulation::Simulation(std::shared_ptr<const TriMesh> mesh, const SimParams& params, Complex psi0)
    : space_(std::make_shared<const FeSpace>(std::move(mesh), params.degree)),
      solver_(std::make_unique<TdglSolver>(space_, params)),
      post_(std::make_unique<PostProcessor>(*solver_)),
      state_(solver_->init_state([psi0](Point2) { return psi0; })) {}

Simulation::Simulation(const RunConfig& config)
    : Simulation(std::make_shared<const TriMesh>(make_mesh(config.mesh)), config.params, config.psi0) {}

void Simulation::advance() {
  const int step = state_.step + 1;
  try {
    state_ = solver_->step(state_);
  } catch (const StepError& e) {
    throw StepError("step " + std::to_string(step) + ": " + e.what(), e.equation());
  } catch (const Error& e) {
    throw StepError("step " + std::to_string(step) + ": " + e.what(), "");
  }
}

void Simulation::advance_to(int step) {
  while (state_.step < step) advance();
}

RunSummary run(const RunConfig& config, std::ostream* log,
               const std::function<void(const FieldSnapshot&)>& on_snapshot) {
  validate(config);
  const auto start = std::chrono::steady_clock::now();
  std::filesystem::create_directories(config.output_dir);
  Simulation sim(config);
  const int n = num_steps(config.params);

  std::vector<int> snap_steps;
  for (double t : config.snapshot_times) snap_steps.push_back(snapshot_step(t, config.params.tau));

  RunSummary summary;
  std::unique_ptr<DiagnosticsWriter> diag;
  if (config.diagnostics) {
    diag = std::make_unique<DiagnosticsWriter>(config.output_dir /
                                               ("diagnostics_" + to_string(config.params.solver) + ".csv"));
  }
  const auto emit = [&]() {
    const int k = sim.state().step;
    for (int s : snap_steps) {
      if (s != k) continue;
      const auto snap = sim.snapshot();
      if (on_snapshot) on_snapshot(snap);
      for (auto& p : write_snapshot(snap, config.output_dir, config.formats)) summary.files.push_back(p);
      break;
    }
    if (diag) {
      summary.last = sim.diagnostics();
      diag->write(summary.last);
    }
  };

  emit();
  const int every = std::max(1, n / 20);
  while (sim.state().step < n) {
    sim.advance();
    emit();
    if (log && (sim.state().step % every == 0 || sim.state().step == n)) {
      char line[160];
      std::snprintf(line, sizeof line, "%s: step %d/%d t=%.3f\n", to_string(config.params.solver).c_str(),
                    sim.state().step, n, sim.state().t);
      *log << line << std::flush;
    }
  }
  if (diag) {
    diag->finish();
    summary.files.push_back(diag->path());
  }
  summary.steps = n;
  summary.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return summary;
}

}  // namespace glvortex
