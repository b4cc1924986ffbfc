// glvortex command-line driver: run, compare, mesh, selftest.

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "glvortex/config.hpp"
#include "glvortex/error.hpp"
#include "glvortex/output.hpp"
#include "glvortex/verify.hpp"

using namespace glvortex;

namespace {

int thread_count() {
  if (const char* env = std::getenv("GLVORTEX_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || n < 1) throw ConfigError("GLVORTEX_THREADS must be a positive integer");
    return static_cast<int>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

struct Source {
  std::string config;
  std::string preset;
  bool full = false;

  RunConfig load() const {
    if (!config.empty() && !preset.empty()) throw ConfigError("give either a config file or --preset, not both");
    if (!preset.empty()) return glvortex::preset(preset, full);
    if (config.empty()) throw ConfigError("a config file or --preset is required");
    return parse_config(config);
  }
};

void add_source(CLI::App* cmd, Source& src) {
  cmd->add_option("config", src.config, "Config file");
  cmd->add_option("--preset", src.preset, "Built-in experiment")
      ->check(CLI::IsMember(preset_names()));
  cmd->add_flag("--full", src.full, "Complete long-horizon run for presets that shorten it by default");
}

std::string format_rates(const std::vector<double>& v) {
  std::string out;
  char buf[32];
  for (double r : v) {
    std::snprintf(buf, sizeof buf, "%s%.3f", out.empty() ? "" : " ", r);
    out += buf;
  }
  return out;
}

// ---------------------------------------------------------------------------

int cmd_run(const Source& src, const std::string& solver, const std::string& out, bool quiet) {
  RunConfig cfg = src.load();
  if (!solver.empty()) cfg.params.solver = parse_solver(solver);
  if (!out.empty()) cfg.output_dir = out;
  const auto summary = run(cfg, quiet ? nullptr : &std::cerr);
  for (const auto& f : summary.files) std::cout << f.string() << '\n';
  std::fprintf(stderr, "%d steps in %.1f s\n", summary.steps, summary.seconds);
  return 0;
}

struct Captured {
  std::shared_ptr<const TriMesh> mesh;
  Vec density;
};

int cmd_compare(const Source& src, const std::string& solvers_arg, const std::string& sweep_arg,
                const std::string& out) {
  const RunConfig base = src.load();
  std::vector<SolverKind> solvers;
  for (const auto& s : split_list(solvers_arg)) solvers.push_back(parse_solver(s));
  if (solvers.empty()) throw ConfigError("--solvers needs at least one solver");
  std::vector<int> meshes;
  for (const auto& s : split_list(sweep_arg)) meshes.push_back(std::stoi(s));
  const bool sweep = !meshes.empty();
  if (!sweep) meshes.push_back(base.mesh.m);
  if (sweep && base.mesh.kind != DomainKind::unit_square && base.mesh.kind != DomainKind::lshape) {
    throw ConfigError("--mesh-sweep needs a unit_square or lshape domain");
  }
  const std::filesystem::path root = out.empty() ? base.output_dir : std::filesystem::path(out);

  struct Job {
    RunConfig cfg;
    int m;
    SolverKind solver;
    double seconds = 0.0;
  };
  std::vector<Job> jobs;
  for (int m : meshes) {
    for (auto s : solvers) {
      RunConfig c = base;
      c.mesh.m = m;
      c.params.solver = s;
      c.output_dir = sweep ? root / ("m" + std::to_string(m)) : root;
      jobs.push_back({c, m, s});
    }
  }

  std::mutex lock;
  std::map<std::tuple<int, int, int>, Captured> snaps;  // (m, solver, snapshot index)
  std::atomic<std::size_t> next{0};
  std::string failure;
  const auto worker = [&]() {
    for (std::size_t j; (j = next++) < jobs.size();) {
      Job& job = jobs[j];
      try {
        const auto& times = job.cfg.snapshot_times;
        const auto summary = run(job.cfg, nullptr, [&](const FieldSnapshot& snap) {
          for (std::size_t i = 0; i < times.size(); ++i) {
            if (snapshot_step(times[i], job.cfg.params.tau) != static_cast<int>(std::lround(snap.t / job.cfg.params.tau))) continue;
            std::lock_guard<std::mutex> g(lock);
            snaps[{job.m, static_cast<int>(job.solver), static_cast<int>(i)}] = {snap.mesh, snap.density};
          }
        });
        job.seconds = summary.seconds;
        std::lock_guard<std::mutex> g(lock);
        std::fprintf(stderr, "%s m=%d finished in %.1f s\n", to_string(job.solver).c_str(), job.m, job.seconds);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> g(lock);
        if (failure.empty()) failure = to_string(job.solver) + " m=" + std::to_string(job.m) + ": " + e.what();
        next = jobs.size();
      }
    }
  };
  const int nthreads = std::min<int>(thread_count(), static_cast<int>(jobs.size()));
  std::vector<std::thread> pool;
  for (int i = 1; i < nthreads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (!failure.empty()) throw Error(failure);

  const auto field = [&](int m, SolverKind s, int i) {
    const auto& c = snaps.at({m, static_cast<int>(s), i});
    return ScalarField{std::make_shared<const FeSpace>(c.mesh, 1), c.density};
  };

  std::string csv = "kind,t,a,b,m_a,m_b,rel_l2_density\n";
  std::ostringstream text;
  char buf[256];
  const auto& times = base.snapshot_times;
  for (std::size_t i = 0; i < times.size(); ++i) {
    for (int m : meshes) {
      for (std::size_t a = 0; a < solvers.size(); ++a) {
        for (std::size_t b = a + 1; b < solvers.size(); ++b) {
          const double d = compare_fields(field(m, solvers[a], i), field(m, solvers[b], i));
          std::snprintf(buf, sizeof buf, "solver,%.17g,%s,%s,%d,%d,%.17g\n", times[i], to_string(solvers[a]).c_str(),
                        to_string(solvers[b]).c_str(), m, m, d);
          csv += buf;
          std::snprintf(buf, sizeof buf, "t=%-8.3f m=%-3d %s vs %s: %.4e\n", times[i], m, to_string(solvers[a]).c_str(),
                        to_string(solvers[b]).c_str(), d);
          text << buf;
        }
      }
    }
    for (std::size_t k = 1; k < meshes.size(); ++k) {
      for (auto s : solvers) {
        const double d = compare_fields(field(meshes[k - 1], s, i), field(meshes[k], s, i));
        std::snprintf(buf, sizeof buf, "mesh,%.17g,%s,%s,%d,%d,%.17g\n", times[i], to_string(s).c_str(),
                      to_string(s).c_str(), meshes[k - 1], meshes[k], d);
        csv += buf;
        std::snprintf(buf, sizeof buf, "t=%-8.3f %s m=%d vs m=%d: %.4e\n", times[i], to_string(s).c_str(),
                      meshes[k - 1], meshes[k], d);
        text << buf;
      }
    }
  }
  text << "\nvortices (threshold 0.1 of max density):\n";
  for (const auto& job : jobs) {
    std::snprintf(buf, sizeof buf, "  %-9s m=%-3d %6.1f s ", to_string(job.solver).c_str(), job.m, job.seconds);
    text << buf;
    for (std::size_t i = 0; i < times.size(); ++i) {
      const auto& c = snaps.at({job.m, static_cast<int>(job.solver), static_cast<int>(i)});
      std::snprintf(buf, sizeof buf, " t=%g:%d", times[i],
                    vortex_regions(*c.mesh, c.density, 0.1 * c.density.maxCoeff()).count);
      text << buf;
    }
    text << '\n';
  }
  std::filesystem::create_directories(root);
  write_file(root / "compare_report.csv", csv);
  write_file(root / "compare_report.txt", text.str());
  std::cout << text.str();
  return 0;
}

int cmd_mesh(const std::string& domain, int m, int boundary_points, double depth, double halfangle,
             const std::string& refine, const std::string& out, const std::string& check) {
  if (!check.empty()) {
    const TriMesh mesh = read_mesh(check);
    const auto issues = check_mesh(mesh);
    std::printf("%s: %d nodes, %d triangles, area %.6f, min angle %.2f deg\n", check.c_str(), mesh.num_nodes(),
                mesh.num_triangles(), mesh.total_area(), mesh.min_angle() * 180.0 / M_PI);
    for (const auto& i : issues) std::printf("  %s\n", i.c_str());
    if (!issues.empty()) throw InvalidSpec(check + ": " + std::to_string(issues.size()) + " mesh issue(s)");
    std::printf("ok\n");
    return 0;
  }
  if (out.empty()) throw ConfigError("mesh: give --out or --check");
  MeshSpec spec;
  if (domain == "unit_square") spec.kind = DomainKind::unit_square;
  else if (domain == "lshape") spec.kind = DomainKind::lshape;
  else if (domain == "disk_notch") spec.kind = DomainKind::disk_notch;
  else throw ConfigError("mesh: unknown domain '" + domain + "'");
  spec.m = m;
  spec.boundary_points = boundary_points;
  spec.notch_depth = depth;
  spec.notch_halfangle = halfangle;
  if (!refine.empty()) {
    const auto parts = split_list(refine);
    if (parts.size() != 4) throw ConfigError("mesh: --refine expects x,y,radius,levels");
    spec.refine = RefineSpec{{std::stod(parts[0]), std::stod(parts[1])}, std::stod(parts[2]), std::stoi(parts[3])};
  }
  const TriMesh mesh = make_mesh(spec);
  write_mesh(mesh, out);
  std::printf("%s: %d nodes, %d triangles\n", out.c_str(), mesh.num_nodes(), mesh.num_triangles());
  return 0;
}

int cmd_selftest(bool quick) {
  bool ok = true;
  for (const auto& c : run_selftest(quick)) {
    std::printf("%s %-36s rates %s (expected %.1f +- %.2f)\n", c.pass ? "PASS" : "FAIL", c.name.c_str(),
                format_rates(c.rates).c_str(), c.expected, c.tolerance);
    ok = ok && c.pass;
  }
  if (!ok) throw Error("selftest failed");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-dependent Ginzburg-Landau vortex simulations"};
  app.require_subcommand(1);

  Source run_src;
  std::string run_solver, run_out;
  bool quiet = false;
  auto* run_cmd = app.add_subcommand("run", "Run one simulation");
  add_source(run_cmd, run_src);
  run_cmd->add_option("--solver", run_solver, "temporal, lorentz or hodge (overrides the config)");
  run_cmd->add_option("--out", run_out, "Output directory (overrides the config)");
  run_cmd->add_flag("-q,--quiet", quiet, "No progress output");
  run_cmd->footer(config_help());

  Source cmp_src;
  std::string cmp_solvers = "temporal,lorentz,hodge", cmp_sweep, cmp_out;
  auto* cmp_cmd = app.add_subcommand("compare", "Run one config under several solvers and compare |psi|^2");
  add_source(cmp_cmd, cmp_src);
  cmp_cmd->add_option("--solvers", cmp_solvers, "Comma-separated solvers")->capture_default_str();
  cmp_cmd->add_option("--mesh-sweep", cmp_sweep, "Comma-separated mesh sizes m");
  cmp_cmd->add_option("--out", cmp_out, "Output directory");

  std::string domain = "unit_square", refine, mesh_out, mesh_check;
  int m = 16, boundary_points = 256;
  double depth = 0.25, halfangle = 0.1 * M_PI;
  auto* mesh_cmd = app.add_subcommand("mesh", "Generate or check a mesh");
  mesh_cmd->add_option("--domain", domain, "unit_square, lshape or disk_notch")->capture_default_str();
  mesh_cmd->add_option("--m", m, "Nodes per unit length")->capture_default_str();
  mesh_cmd->add_option("--boundary-points", boundary_points, "Disk boundary points")->capture_default_str();
  mesh_cmd->add_option("--notch-depth", depth, "Notch depth (fraction of radius)")->capture_default_str();
  mesh_cmd->add_option("--notch-halfangle", halfangle, "Notch half-angle, radians")->capture_default_str();
  mesh_cmd->add_option("--refine", refine, "Local refinement x,y,radius,levels");
  mesh_cmd->add_option("--out", mesh_out, "Write the mesh to this glmesh file");
  mesh_cmd->add_option("--check", mesh_check, "Validate a glmesh file");

  bool st_quick = false;
  auto* st_cmd = app.add_subcommand("selftest", "Decomposition and heat-equation convergence checks");
  st_cmd->add_flag("--quick", st_quick, "Smaller meshes");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }

  try {
    thread_count();
    if (*run_cmd) return cmd_run(run_src, run_solver, run_out, quiet);
    if (*cmp_cmd) return cmd_compare(cmp_src, cmp_solvers, cmp_sweep, cmp_out);
    if (*mesh_cmd) return cmd_mesh(domain, m, boundary_points, depth, halfangle, refine, mesh_out, mesh_check);
    if (*st_cmd) return cmd_selftest(st_quick);
  } catch (const std::exception& e) {
    std::string msg = e.what();
    for (char& c : msg) {
      if (c == '\n') c = ' ';
    }
    std::fprintf(stderr, "error: %s\n", msg.c_str());
    return 1;
  }
  return 0;
}
