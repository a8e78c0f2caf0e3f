// SPDX-License-Identifier: Apache-2.0
#include "fracpme/cli.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "fracpme/config.hpp"
#include "fracpme/diagnostics.hpp"
#include "fracpme/output.hpp"
#include "fracpme/stepper.hpp"
#include "fracpme/sweep.hpp"

#ifndef FRACPME_VERSION
#define FRACPME_VERSION "unknown"
#endif

namespace fracpme {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

json mesh_summary(const Mesh& mesh, const RunConfig& cfg) {
  return json{{"N_h", mesh.num_vertices()},
              {"elements", mesh.num_triangles()},
              {"h", mesh.h()},
              {"nx", cfg.nx},
              {"ny", cfg.ny},
              {"pattern", to_string(cfg.pattern)}};
}

json base_manifest(const RunConfig& cfg, const char* command) {
  json m;
  m["command"] = command;
  m["code_version"] = FRACPME_VERSION;
  m["config"] = json::parse(cfg.source_text);
  return m;
}

void finish_manifest(json& manifest, const fs::path& out, Clock::time_point start) {
  manifest["wall_clock_seconds"] = seconds_since(start);
  write_file_atomic(out / "manifest.json", manifest.dump(2) + "\n");
}

EigenOptions eigen_options(const RunConfig& cfg) {
  EigenOptions opts;
  opts.max_nodes = cfg.max_nodes;
  return opts;
}

int command_run(const fs::path& config_path, const fs::path& out, Mode mode) {
  const auto start = Clock::now();
  const RunConfig cfg = load_config(config_path, mode);
  fs::create_directories(out);
  auto disc = Discretization::build(build_mesh(cfg), eigen_options(cfg));
  const NodalField rho0 = make_initial_datum(cfg, disc->mesh, disc->fem.lumped_mass);
  const SolverConfig effective = effective_config(cfg.solver, rho0.values());
  write_mesh_csv(disc->mesh, out);

  json manifest = base_manifest(cfg, mode == Mode::Standard ? "run" : "selfsim");
  manifest["mesh"] = mesh_summary(disc->mesh, cfg);
  manifest["mode"] = to_string(mode);
  manifest["effective_L"] = effective.cutoff.cap();
  manifest["drift_lambda"] = effective.drift();
  manifest["steps"] = effective.num_steps();
  manifest["diagnostics"] = "diag.csv";
  manifest["snapshots"] = json::array();

  DiagnosticsWriter diag(out / "diag.csv");
  std::ostringstream profile;
  if (mode == Mode::SelfSimilar) profile << "step,time,l1,l2\n";

  auto observer = [&](const Snapshot& snap, const DiagnosticsRecord& record) {
    diag.append(record);
    if (is_snapshot_step(effective, snap.step)) {
      manifest["snapshots"].push_back(write_snapshot(snap, disc->mesh, out).filename().string());
    }
    if (mode == Mode::SelfSimilar) {
      profile << snap.step << ',' << format_double(snap.time) << ','
              << format_double(profile_distance(snap.rho, cfg.solver.s, 2, *disc, ProfileNorm::L1))
              << ','
              << format_double(profile_distance(snap.rho, cfg.solver.s, 2, *disc, ProfileNorm::L2))
              << '\n';
    }
  };

  int code = kExitOk;
  try {
    run(cfg.solver, rho0, disc, observer);
    manifest["status"] = "ok";
  } catch (const SolverFailure& e) {
    manifest["status"] = "failed";
    manifest["error"] = e.what();
    manifest["failed_step"] = e.step();
    std::cerr << "solver failure: " << e.what() << '\n';
    code = kExitSolverFailure;
  }
  if (mode == Mode::SelfSimilar) {
    write_file_atomic(out / "profile.csv", profile.str());
    manifest["profile_distance"] = "profile.csv";
  }
  finish_manifest(manifest, out, start);
  return code;
}

int command_fracpoisson(const fs::path& config_path, const fs::path& out) {
  const auto start = Clock::now();
  const RunConfig cfg = load_config(config_path, Mode::Standard);
  fs::create_directories(out);
  auto disc = Discretization::build(build_mesh(cfg), eigen_options(cfg));
  const Bounds& b = disc->mesh.bounds();
  const double wx = cfg.fracpoisson.kx * std::numbers::pi / b.width();
  const double wy = cfg.fracpoisson.ky * std::numbers::pi / b.height();
  const double lambda = wx * wx + wy * wy;
  const double s = cfg.solver.s;
  auto source = [&](const Point& p) {
    return std::cos(wx * (p.x() - b.xmin)) * std::cos(wy * (p.y() - b.ymin));
  };
  const NodalField f = interpolate(source, disc->mesh);
  const Vector c = solve_fractional_poisson(disc->spectral, disc->fem.consistent_mass, f.values(), s);
  const double scale = -std::pow(lambda, -s);
  const double error =
      l2_distance_to_function(disc->mesh, c, [&](const Point& p) { return scale * source(p); });
  const auto norms = discrete_sobolev_norms(disc->spectral, disc->fem.consistent_mass,
                                            project_zero_mean(c, disc->fem.lumped_mass), s);

  std::ostringstream table;
  table << "node,x,y,f,c\n";
  for (std::size_t i = 0; i < disc->mesh.num_vertices(); ++i) {
    const Point& p = disc->mesh.point(i);
    const auto k = static_cast<Eigen::Index>(i);
    table << i << ',' << format_double(p.x()) << ',' << format_double(p.y()) << ','
          << format_double(f[k]) << ',' << format_double(c[k]) << '\n';
  }
  write_file_atomic(out / "fracpoisson.csv", table.str());

  json manifest = base_manifest(cfg, "fracpoisson");
  manifest["mesh"] = mesh_summary(disc->mesh, cfg);
  manifest["lambda_exact"] = lambda;
  manifest["l2_error"] = error;
  manifest["hs_norm_c"] = norms.hs;
  manifest["fields"] = "fracpoisson.csv";
  manifest["status"] = "ok";
  finish_manifest(manifest, out, start);
  std::cout << "l2_error " << format_double(error) << '\n';
  return kExitOk;
}

int command_eig(const fs::path& config_path, const fs::path& out) {
  const auto start = Clock::now();
  const RunConfig cfg = load_config(config_path, Mode::Standard);
  fs::create_directories(out);
  auto disc = Discretization::build(build_mesh(cfg), eigen_options(cfg));
  write_eigenpairs_csv(disc->spectral, out, cfg.eig_vectors);
  const double lambda1 = disc->spectral.eigenvalues[0];
  json manifest = base_manifest(cfg, "eig");
  manifest["mesh"] = mesh_summary(disc->mesh, cfg);
  manifest["lambda_1"] = lambda1;
  manifest["lambda_max"] = disc->spectral.eigenvalues[disc->spectral.size() - 1];
  manifest["eigenvalues"] = "eigenvalues.csv";
  manifest["status"] = "ok";
  finish_manifest(manifest, out, start);
  std::cout << "lambda_1 " << format_double(lambda1) << '\n';
  return kExitOk;
}

int command_sweep(const fs::path& config_path, const fs::path& out) {
  const auto start = Clock::now();
  const RunConfig cfg = load_config(config_path, Mode::Standard);
  fs::create_directories(out);
  const SweepResult result =
      run_sweep(cfg, out, [](const std::string& line) { std::cerr << line << '\n'; });
  write_error_matrix(result.cells, out / "error_matrix.csv");
  json manifest = base_manifest(cfg, "sweep");
  manifest["error_matrix"] = "error_matrix.csv";
  json cells = json::array();
  for (const auto& c : result.cells) cells.push_back(fs::relative(c.dir, out).string());
  manifest["cells"] = cells;
  manifest["reference"] = cells[result.reference_index];
  manifest["status"] = "ok";
  finish_manifest(manifest, out, start);
  return kExitOk;
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"Structure-preserving finite element solver for the fractional porous medium equation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", FRACPME_VERSION);

  std::string config;
  std::string out = "out";
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config, "JSON configuration file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "output directory");
  };
  auto* run_cmd = app.add_subcommand("run", "time-dependent run on a bounded domain");
  auto* selfsim_cmd = app.add_subcommand("selfsim", "run in self-similar variables with drift");
  auto* poisson_cmd = app.add_subcommand("fracpoisson", "one fractional Poisson solve with an exact reference");
  auto* eig_cmd = app.add_subcommand("eig", "dump the discrete Neumann eigenpairs");
  auto* sweep_cmd = app.add_subcommand("sweep", "refinement study against the finest run");
  auto* schema_cmd = app.add_subcommand("schema", "print the configuration JSON schema");
  for (auto* sub : {run_cmd, selfsim_cmd, poisson_cmd, eig_cmd, sweep_cmd}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    if (*schema_cmd) {
      std::cout << config_schema();
      return kExitOk;
    }
    if (*run_cmd) return command_run(config, out, Mode::Standard);
    if (*selfsim_cmd) return command_run(config, out, Mode::SelfSimilar);
    if (*poisson_cmd) return command_fracpoisson(config, out);
    if (*eig_cmd) return command_eig(config, out);
    if (*sweep_cmd) return command_sweep(config, out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kExitSolverFailure;
  }
  return kExitConfigError;
}

}  // namespace fracpme
