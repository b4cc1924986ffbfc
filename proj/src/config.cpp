#include "glvortex/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "glvortex/error.hpp"

namespace glvortex {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

struct Entry {
  std::string section, key, value;
  int line = 0;

  [[noreturn]] void fail(const std::string& why) const {
    throw ConfigError("line " + std::to_string(line) + ": " + section + "." + key + ": " + why);
  }

  double real() const {
    double v = 0.0;
    const char* end = value.data() + value.size();
    auto [p, ec] = std::from_chars(value.data(), end, v);
    if (ec != std::errc() || p != end) fail("expected a number, got '" + value + "'");
    return v;
  }

  int integer() const {
    int v = 0;
    const char* end = value.data() + value.size();
    auto [p, ec] = std::from_chars(value.data(), end, v);
    if (ec != std::errc() || p != end) fail("expected an integer, got '" + value + "'");
    return v;
  }

  double positive() const {
    const double v = real();
    if (!(v > 0.0)) fail("must be positive, got '" + value + "'");
    return v;
  }

  bool boolean() const {
    if (value == "true" || value == "yes" || value == "1") return true;
    if (value == "false" || value == "no" || value == "0") return false;
    fail("expected true or false, got '" + value + "'");
  }

  Complex complex() const {
    std::string v;
    for (char c : value) {
      if (c != ' ') v += c;
    }
    const auto number = [&](std::string t) {
      if (t == "+" || t.empty()) return 1.0;
      if (t == "-") return -1.0;
      if (t.front() == '+') t.erase(0, 1);
      Entry part = *this;
      part.value = t;
      return part.real();
    };
    if (v.empty() || v.back() != 'i') return {number(v.empty() ? "x" : v), 0.0};
    const std::string body = v.substr(0, v.size() - 1);
    std::size_t split_at = std::string::npos;
    for (std::size_t p = body.size(); p-- > 1;) {
      if ((body[p] == '+' || body[p] == '-') && body[p - 1] != 'e' && body[p - 1] != 'E') {
        split_at = p;
        break;
      }
    }
    if (split_at == std::string::npos) return {0.0, number(body)};
    return {number(body.substr(0, split_at)), number(body.substr(split_at))};
  }

  std::vector<double> reals() const {
    std::vector<double> out;
    std::string v = value;
    for (char& c : v) {
      if (c == ',') c = ' ';
    }
    for (const auto& tok : split(v, ' ')) {
      Entry e = *this;
      e.value = tok;
      out.push_back(e.real());
    }
    return out;
  }
};

void apply(RunConfig& c, const Entry& e) {
  const std::string& k = e.key;
  if (e.section == "mesh") {
    if (k == "domain") {
      if (e.value == "unit_square") c.mesh.kind = DomainKind::unit_square;
      else if (e.value == "lshape") c.mesh.kind = DomainKind::lshape;
      else if (e.value == "disk_notch") c.mesh.kind = DomainKind::disk_notch;
      else if (e.value == "file") c.mesh.kind = DomainKind::file;
      else e.fail("unknown domain '" + e.value + "'");
    } else if (k == "m") {
      c.mesh.m = e.integer();
    } else if (k == "boundary_points") {
      c.mesh.boundary_points = e.integer();
    } else if (k == "notch_depth") {
      c.mesh.notch_depth = e.real();
    } else if (k == "notch_halfangle") {
      c.mesh.notch_halfangle = e.real();
    } else if (k == "path") {
      c.mesh.path = e.value;
    } else if (k == "refine_center") {
      const auto xy = e.reals();
      if (xy.size() != 2) e.fail("expected two numbers");
      if (!c.mesh.refine) c.mesh.refine.emplace();
      c.mesh.refine->center = {xy[0], xy[1]};
    } else if (k == "refine_radius") {
      if (!c.mesh.refine) c.mesh.refine.emplace();
      c.mesh.refine->radius = e.real();
    } else if (k == "refine_levels") {
      if (!c.mesh.refine) c.mesh.refine.emplace();
      c.mesh.refine->levels = e.integer();
    } else {
      e.fail("unknown key");
    }
  } else if (e.section == "params") {
    if (k == "solver") {
      try {
        c.params.solver = parse_solver(e.value);
      } catch (const ConfigError& err) {
        e.fail(err.what());
      }
    } else if (k == "degree") {
      c.params.degree = e.integer();
      if (c.params.degree != 1 && c.params.degree != 2) e.fail("must be 1 or 2");
    } else if (k == "eta") {
      c.params.eta = e.positive();
    } else if (k == "kappa") {
      c.params.kappa = e.positive();
    } else if (k == "H") {
      c.params.H = e.real();
    } else if (k == "psi0") {
      c.psi0 = e.complex();
    } else if (k == "A0") {
      if (e.value != "zero") e.fail("only 'zero' is supported");
    } else if (k == "track_w") {
      c.params.track_w = e.boolean();
    } else {
      e.fail("unknown key");
    }
  } else if (e.section == "time") {
    if (k == "tau") c.params.tau = e.positive();
    else if (k == "T") c.params.T = e.positive();
    else if (k == "snapshots") c.snapshot_times = e.reals();
    else e.fail("unknown key");
  } else if (e.section == "output") {
    if (k == "dir") {
      c.output_dir = e.value;
    } else if (k == "formats") {
      c.formats.clear();
      for (const auto& f : split(e.value, ',')) {
        if (f == "csv") c.formats.push_back(OutputFormat::csv);
        else if (f == "vtk") c.formats.push_back(OutputFormat::vtk);
        else e.fail("unknown format '" + f + "'");
      }
    } else if (k == "diagnostics") {
      c.diagnostics = e.boolean();
    } else {
      e.fail("unknown key");
    }
  } else {
    e.fail("unknown key");
  }
}

RunConfig base(const std::string& name, DomainKind kind) {
  RunConfig c;
  c.name = name;
  c.mesh.kind = kind;
  c.output_dir = std::filesystem::path("out") / name;
  return c;
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  RunConfig c;
  std::istringstream in(text);
  std::string raw, section;
  int line = 0;
  bool any = false;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = raw.substr(0, raw.find('#'));
    s = trim(s);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError("line " + std::to_string(line) + ": malformed section header");
      section = trim(s.substr(1, s.size() - 2));
      if (section != "mesh" && section != "params" && section != "time" && section != "output") {
        throw ConfigError("line " + std::to_string(line) + ": unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(line) + ": expected key = value");
    Entry e{section, trim(s.substr(0, eq)), trim(s.substr(eq + 1)), line};
    if (e.key.empty()) throw ConfigError("line " + std::to_string(line) + ": missing key");
    if (e.value.empty()) e.fail("missing value");
    if (e.key == "preset" && (section.empty() || section == "params")) {
      if (any) e.fail("preset must come before other keys");
      try {
        c = preset(e.value);
      } catch (const ConfigError& err) {
        e.fail(err.what());
      }
      any = true;
      continue;
    }
    if (section.empty()) e.fail("key outside of a section");
    apply(c, e);
    any = true;
  }
  validate(c);
  return c;
}

RunConfig parse_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  RunConfig c = parse_config_text(ss.str());
  if (c.name == "run") c.name = path.stem().string();
  return c;
}

std::string config_help() {
  return R"([mesh]
domain = unit_square        # unit_square | lshape | disk_notch | file
m = 16                      # nodes per unit length (unit_square, lshape)
boundary_points = 256       # disk_notch
notch_depth = 0.25          # disk_notch, fraction of the radius
notch_halfangle = 0.314159  # disk_notch, radians
path =                      # glmesh file (domain = file)
refine_center = 0 0         # optional local refinement
refine_radius = 0
refine_levels = 0

[params]
solver = hodge              # temporal | lorentz | hodge
degree = 1                  # 1 or 2
eta = 1
kappa = 10
H = 5
psi0 = 1                    # complex constant, e.g. 0.6+0.8i
A0 = zero
track_w = true

[time]
tau = 0.1
T = 40
snapshots =                 # comma separated, multiples of tau

[output]
dir = out
formats = csv               # csv, vtk
diagnostics = true
)";
}

std::vector<std::string> preset_names() {
  return {"example31", "example32_h08", "example32_h09", "example32_h202", "example33"};
}

RunConfig preset(const std::string& name, bool full) {
  if (name == "example31") {
    RunConfig c = base(name, DomainKind::lshape);
    c.mesh.m = 16;
    c.params.eta = 1.0;
    c.params.kappa = 10.0;
    c.params.H = 5.0;
    c.psi0 = {0.6, 0.8};
    c.params.tau = 0.1;
    c.params.T = 40.0;
    c.snapshot_times = {5.0, 20.0, 40.0};
    return c;
  }
  if (name == "example32_h08" || name == "example32_h09" || name == "example32_h202") {
    RunConfig c = base(name, DomainKind::disk_notch);
    c.mesh.boundary_points = 256;
    c.params.eta = 1.0;
    c.params.kappa = 4.0;
    c.psi0 = 1.0;
    c.params.tau = 0.1;
    if (name == "example32_h08") {
      c.params.H = 0.8;
      c.params.T = full ? 15000.0 : 1000.0;
      c.snapshot_times = {20.0, 100.0, c.params.T};
    } else if (name == "example32_h09") {
      c.params.H = 0.9;
      c.params.T = 5000.0;
      c.snapshot_times = {25.0, 30.0, 5000.0};
    } else {
      c.params.H = 2.02;
      c.params.degree = 2;
      c.params.T = 100.0;
      c.snapshot_times = {25.0, 50.0, 100.0};
      c.mesh.refine = RefineSpec{{1.0 - c.mesh.notch_depth, 0.0}, 0.2, 2};
    }
    return c;
  }
  if (name == "example33") {
    RunConfig c = base(name, DomainKind::unit_square);
    c.mesh.m = 32;
    c.params.eta = 1.0;
    c.params.kappa = 10.0;
    c.params.H = 5.0;
    c.psi0 = {0.6, 0.8};
    c.params.tau = 0.1;
    c.params.T = 40.0;
    c.snapshot_times = {5.0, 20.0, 40.0};
    return c;
  }
  throw ConfigError("unknown preset '" + name + "'");
}

}  // namespace glvortex
