// SPDX-License-Identifier: Apache-2.0
#include "fracpme/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

#include "fracpme/diagnostics.hpp"

namespace fracpme {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

double get_number(const json& obj, const char* key, double fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(where + "." + key + " must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(where + "." + key + " must be finite");
  return x;
}

int get_int(const json& obj, const char* key, int fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) throw ConfigError(where + "." + key + " must be an integer");
  return v.get<int>();
}

template <typename T>
std::vector<T> get_list(const json& obj, const char* key, std::vector<T> fallback,
                        const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_array() || v.empty()) throw ConfigError(where + "." + key + " must be a nonempty array");
  std::vector<T> out;
  for (const auto& item : v) {
    if constexpr (std::is_integral_v<T>) {
      if (!item.is_number_integer()) throw ConfigError(where + "." + key + " must hold integers");
    } else {
      if (!item.is_number()) throw ConfigError(where + "." + key + " must hold numbers");
    }
    out.push_back(item.get<T>());
  }
  return out;
}

const std::set<std::string> kTopKeys{"domain",  "mesh",       "s",           "dt",
                                     "T",       "delta",      "L",           "epsilon",
                                     "lambda",  "picard_tol", "picard_max",  "snapshot_every",
                                     "initial", "max_nodes",  "fracpoisson", "eig",
                                     "sweep"};

}  // namespace

const char* config_schema() {
  return R"({
  "$schema": "https://json-schema.org/draft/2020-12/schema",
  "title": "fracpme run configuration",
  "type": "object",
  "additionalProperties": false,
  "properties": {
    "domain": {"type": "object", "additionalProperties": false,
               "properties": {"xmin": {"type": "number"}, "xmax": {"type": "number"},
                              "ymin": {"type": "number"}, "ymax": {"type": "number"}}},
    "mesh": {"type": "object", "additionalProperties": false,
             "properties": {"nx": {"type": "integer", "minimum": 1},
                            "ny": {"type": "integer", "minimum": 1},
                            "pattern": {"enum": ["right-diagonal", "crisscross"]}}},
    "s": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
    "dt": {"type": "number", "exclusiveMinimum": 0},
    "T": {"type": "number", "exclusiveMinimum": 0},
    "delta": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
    "L": {"type": "number", "exclusiveMinimum": 1},
    "epsilon": {"type": "number", "exclusiveMinimum": 0},
    "lambda": {"type": "number"},
    "picard_tol": {"type": "number", "exclusiveMinimum": 0},
    "picard_max": {"type": "integer", "minimum": 1},
    "snapshot_every": {"type": "integer", "minimum": 0},
    "max_nodes": {"type": "integer", "minimum": 3},
    "initial": {"type": "object", "additionalProperties": false,
                "properties": {"type": {"enum": ["gaussian", "constant", "uniform", "cosine"]},
                               "sigma": {"type": "number", "exclusiveMinimum": 0},
                               "center": {"type": "array", "items": {"type": "number"},
                                          "minItems": 2, "maxItems": 2},
                               "value": {"type": "number", "minimum": 0},
                               "mass": {"type": "number", "exclusiveMinimum": 0},
                               "amplitude": {"type": "number", "minimum": -1, "maximum": 1}}},
    "fracpoisson": {"type": "object", "additionalProperties": false,
                    "properties": {"kx": {"type": "integer", "minimum": 0},
                                   "ky": {"type": "integer", "minimum": 0}}},
    "eig": {"type": "object", "additionalProperties": false,
            "properties": {"vectors": {"type": "boolean"}}},
    "sweep": {"type": "object", "additionalProperties": false,
              "properties": {"h_levels": {"type": "array", "items": {"type": "integer"}},
                             "dt_levels": {"type": "array", "items": {"type": "integer"}},
                             "deltas": {"type": "array", "items": {"type": "number"}},
                             "epsilons": {"type": "array", "items": {"type": "number"}}}}
  }
}
)";
}

RunConfig parse_config(const std::string& json_text, Mode mode) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  reject_unknown(root, kTopKeys, "config");

  RunConfig cfg;
  cfg.source_text = json_text;
  if (mode == Mode::SelfSimilar) {
    cfg.domain = Bounds{-2.0, 2.0, -2.0, 2.0};
    cfg.initial.type = "uniform";
    cfg.solver.T = 13.0;
  }
  cfg.solver.mode = mode;

  if (root.contains("domain")) {
    const json& d = root["domain"];
    reject_unknown(d, {"xmin", "xmax", "ymin", "ymax"}, "domain");
    cfg.domain.xmin = get_number(d, "xmin", cfg.domain.xmin, "domain");
    cfg.domain.xmax = get_number(d, "xmax", cfg.domain.xmax, "domain");
    cfg.domain.ymin = get_number(d, "ymin", cfg.domain.ymin, "domain");
    cfg.domain.ymax = get_number(d, "ymax", cfg.domain.ymax, "domain");
    if (!(cfg.domain.xmax > cfg.domain.xmin && cfg.domain.ymax > cfg.domain.ymin)) {
      throw ConfigError("domain must have xmax > xmin and ymax > ymin");
    }
  }
  if (root.contains("mesh")) {
    const json& m = root["mesh"];
    reject_unknown(m, {"nx", "ny", "pattern"}, "mesh");
    cfg.nx = get_int(m, "nx", cfg.nx, "mesh");
    cfg.ny = get_int(m, "ny", cfg.nx, "mesh");
    if (m.contains("pattern")) {
      if (!m["pattern"].is_string()) throw ConfigError("mesh.pattern must be a string");
      try {
        cfg.pattern = mesh_pattern_from_string(m["pattern"].get<std::string>());
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
    }
    if (cfg.nx < 1 || cfg.ny < 1) throw ConfigError("mesh.nx and mesh.ny must be positive");
  }

  SolverConfig& sc = cfg.solver;
  sc.s = get_number(root, "s", sc.s, "config");
  sc.dt = get_number(root, "dt", sc.dt, "config");
  sc.T = get_number(root, "T", sc.T, "config");
  sc.epsilon = get_number(root, "epsilon", sc.epsilon, "config");
  if (root.contains("lambda")) sc.lambda_drift = get_number(root, "lambda", 0.0, "config");
  sc.picard_tol = get_number(root, "picard_tol", sc.picard_tol, "config");
  sc.picard_max = get_int(root, "picard_max", sc.picard_max, "config");
  sc.snapshot_every = get_int(root, "snapshot_every", sc.snapshot_every, "config");
  try {
    sc.cutoff = CutoffParams(get_number(root, "delta", sc.cutoff.delta(), "config"),
                             get_number(root, "L", sc.cutoff.cap(), "config"));
    sc.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const int max_nodes = get_int(root, "max_nodes", static_cast<int>(cfg.max_nodes), "config");
  if (max_nodes < 3) throw ConfigError("max_nodes must be at least 3");
  cfg.max_nodes = static_cast<std::size_t>(max_nodes);

  if (root.contains("initial")) {
    const json& i = root["initial"];
    reject_unknown(i, {"type", "sigma", "center", "value", "mass", "amplitude"}, "initial");
    InitialSpec& spec = cfg.initial;
    if (i.contains("type")) {
      if (!i["type"].is_string()) throw ConfigError("initial.type must be a string");
      spec.type = i["type"].get<std::string>();
    }
    spec.sigma = get_number(i, "sigma", spec.sigma, "initial");
    spec.value = get_number(i, "value", spec.value, "initial");
    spec.mass = get_number(i, "mass", spec.mass, "initial");
    spec.amplitude = get_number(i, "amplitude", spec.amplitude, "initial");
    if (i.contains("center")) {
      const auto c = get_list<double>(i, "center", {}, "initial");
      if (c.size() != 2) throw ConfigError("initial.center must have two entries");
      spec.center = {c[0], c[1]};
    }
    if (spec.type != "gaussian" && spec.type != "constant" && spec.type != "uniform" &&
        spec.type != "cosine") {
      throw ConfigError("initial.type must be gaussian, constant, uniform or cosine");
    }
    if (!(spec.sigma > 0.0)) throw ConfigError("initial.sigma must be positive");
    if (spec.value < 0.0) throw ConfigError("initial.value must be nonnegative");
    if (i.contains("mass") && !(spec.mass > 0.0)) throw ConfigError("initial.mass must be positive");
    if (std::abs(spec.amplitude) > 1.0) throw ConfigError("initial.amplitude must lie in [-1,1]");
  }

  if (root.contains("fracpoisson")) {
    const json& f = root["fracpoisson"];
    reject_unknown(f, {"kx", "ky"}, "fracpoisson");
    cfg.fracpoisson.kx = get_int(f, "kx", cfg.fracpoisson.kx, "fracpoisson");
    cfg.fracpoisson.ky = get_int(f, "ky", cfg.fracpoisson.ky, "fracpoisson");
    if (cfg.fracpoisson.kx < 0 || cfg.fracpoisson.ky < 0 ||
        cfg.fracpoisson.kx + cfg.fracpoisson.ky == 0) {
      throw ConfigError("fracpoisson needs nonnegative kx, ky, not both zero");
    }
  }
  if (root.contains("eig")) {
    const json& e = root["eig"];
    reject_unknown(e, {"vectors"}, "eig");
    if (e.contains("vectors")) {
      if (!e["vectors"].is_boolean()) throw ConfigError("eig.vectors must be a boolean");
      cfg.eig_vectors = e["vectors"].get<bool>();
    }
  }
  if (root.contains("sweep")) {
    const json& w = root["sweep"];
    reject_unknown(w, {"h_levels", "dt_levels", "deltas", "epsilons"}, "sweep");
    SweepSpec& sw = cfg.sweep;
    sw.h_levels = get_list<int>(w, "h_levels", sw.h_levels, "sweep");
    sw.dt_levels = get_list<int>(w, "dt_levels", sw.dt_levels, "sweep");
    sw.deltas = get_list<double>(w, "deltas", sw.deltas, "sweep");
    sw.epsilons = get_list<double>(w, "epsilons", sw.epsilons, "sweep");
    for (int n : sw.h_levels) {
      if (n < 0 || n > 12) throw ConfigError("sweep.h_levels entries must lie in [0,12]");
    }
    for (int k : sw.dt_levels) {
      if (k < 0 || k > 30) throw ConfigError("sweep.dt_levels entries must lie in [0,30]");
    }
    for (double d : sw.deltas) {
      if (!(d > 0.0 && d < 1.0)) throw ConfigError("sweep.deltas entries must lie in (0,1)");
    }
    for (double e : sw.epsilons) {
      if (!(e > 0.0)) throw ConfigError("sweep.epsilons entries must be positive");
    }
  }

  const std::size_t nodes = static_cast<std::size_t>(cfg.nx + 1) * static_cast<std::size_t>(cfg.ny + 1) +
                            (cfg.pattern == MeshPattern::Crisscross
                                 ? static_cast<std::size_t>(cfg.nx) * static_cast<std::size_t>(cfg.ny)
                                 : 0);
  if (nodes > cfg.max_nodes) {
    throw ConfigError("mesh has " + std::to_string(nodes) + " nodes, above max_nodes=" +
                      std::to_string(cfg.max_nodes));
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path, Mode mode) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), mode);
}

Mesh build_mesh(const RunConfig& cfg) {
  return build_structured_rect_mesh(cfg.domain, cfg.nx, cfg.ny, cfg.pattern);
}

NodalField make_initial_datum(const RunConfig& cfg, const Mesh& mesh, const Vector& lumped_mass) {
  const InitialSpec& spec = cfg.initial;
  const Bounds& b = mesh.bounds();
  const double area = lumped_mass.sum();
  if (spec.type == "constant") return NodalField::constant(mesh, spec.value);
  if (spec.type == "uniform") {
    double mass = spec.mass;
    if (!(mass > 0.0)) {
      mass = cfg.solver.mode == Mode::SelfSimilar ? barenblatt_mass(cfg.solver.s, 2) : area;
    }
    return NodalField::constant(mesh, mass / area);
  }
  if (spec.type == "cosine") {
    const double a = spec.amplitude;
    return interpolate(
        [&](const Point& x) {
          return 1.0 + a * std::cos(std::numbers::pi * (x.x() - b.xmin) / b.width()) *
                           std::cos(std::numbers::pi * (x.y() - b.ymin) / b.height());
        },
        mesh);
  }
  // Gaussian, rescaled so that its P1 interpolant has mean 1.
  const Point center(spec.center[0], spec.center[1]);
  NodalField g = interpolate(
      [&](const Point& x) {
        return std::exp(-(x - center).squaredNorm() / (2.0 * std::numbers::pi * spec.sigma));
      },
      mesh);
  const double mean = integrate(g.values(), lumped_mass) / area;
  if (!(mean > 0.0)) throw ConfigError("gaussian initial datum vanishes on the mesh");
  return NodalField(mesh, g.values() / mean);
}

}  // namespace fracpme
