// SPDX-License-Identifier: Apache-2.0
#include "fracpme/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <tuple>

#include "fracpme/output.hpp"

namespace fracpme {

namespace {

int cells_per_direction(double length, int level) {
  const double n = length * std::ldexp(1.0, level);
  const double rounded = std::round(n);
  if (rounded < 1.0 || std::abs(n - rounded) > 1e-9 * n) {
    throw ConfigError("domain side " + format_double(length) + " is not a multiple of h = 2^-" +
                      std::to_string(level));
  }
  return static_cast<int>(rounded);
}

std::string cell_name(const SweepCell& c, std::size_t delta_idx, std::size_t eps_idx) {
  std::ostringstream name;
  name << "cell_h" << c.h_level << "_dt" << c.dt_level << "_d" << delta_idx << "_e" << eps_idx;
  return name.str();
}

Vector run_cell(const RunConfig& base, SweepCell& cell, std::shared_ptr<const Discretization> disc,
                const std::optional<std::filesystem::path>& dir) {
  RunConfig cfg = base;
  cfg.nx = cell.nx;
  cfg.ny = cell.ny;
  cfg.solver.dt = std::ldexp(1.0, -cell.dt_level);
  cfg.solver.epsilon = cell.epsilon;
  cfg.solver.cutoff = CutoffParams(cell.delta, base.solver.cutoff.cap());
  cfg.solver.validate();
  const NodalField rho0 = make_initial_datum(cfg, disc->mesh, disc->fem.lumped_mass);
  RunResult result = run(cfg.solver, rho0, disc);
  if (dir) {
    write_diagnostics(result.records, *dir / "diag.csv");
    write_snapshot(result.snapshots.back(), disc->mesh, *dir);
  }
  return std::move(result.snapshots.back().rho);
}

}  // namespace

SweepResult run_sweep(const RunConfig& cfg, const std::optional<std::filesystem::path>& out_dir,
                      const SweepLog& log) {
  const SweepSpec& spec = cfg.sweep;
  const std::vector<double> deltas =
      spec.deltas.empty() ? std::vector<double>{cfg.solver.cutoff.delta()} : spec.deltas;
  const std::vector<double> epsilons =
      spec.epsilons.empty() ? std::vector<double>{cfg.solver.epsilon} : spec.epsilons;

  SweepResult result;
  for (int n : spec.h_levels) {
    for (int k : spec.dt_levels) {
      for (std::size_t di = 0; di < deltas.size(); ++di) {
        for (std::size_t ei = 0; ei < epsilons.size(); ++ei) {
          SweepCell c;
          c.h_level = n;
          c.dt_level = k;
          c.delta = deltas[di];
          c.epsilon = epsilons[ei];
          c.nx = cells_per_direction(cfg.domain.width(), n);
          c.ny = cells_per_direction(cfg.domain.height(), n);
          if (out_dir) c.dir = *out_dir / cell_name(c, di, ei);
          result.cells.push_back(c);
        }
      }
    }
  }
  if (result.cells.empty()) throw ConfigError("sweep grid is empty");

  auto finer = [](const SweepCell& a, const SweepCell& b) {
    return std::tuple(a.h_level, a.dt_level, -a.delta, -a.epsilon) <
           std::tuple(b.h_level, b.dt_level, -b.delta, -b.epsilon);
  };
  result.reference_index = static_cast<std::size_t>(
      std::max_element(result.cells.begin(), result.cells.end(), finer) - result.cells.begin());
  const SweepCell& ref_cell = result.cells[result.reference_index];
  const std::size_t ref_nodes = static_cast<std::size_t>(ref_cell.nx + 1) * (ref_cell.ny + 1);
  if (ref_nodes > cfg.max_nodes) {
    throw ConfigError("finest sweep mesh has " + std::to_string(ref_nodes) +
                      " nodes, above max_nodes=" + std::to_string(cfg.max_nodes));
  }

  // Finest level first so that the reference exists before anything is
  // compared against it, then the remaining levels from coarse to fine.
  std::vector<int> levels(spec.h_levels.begin(), spec.h_levels.end());
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  std::rotate(levels.begin(), levels.end() - 1, levels.end());

  EigenOptions eig;
  eig.max_nodes = cfg.max_nodes;
  std::shared_ptr<const Discretization> ref_disc;
  Vector ref_rho;

  for (int level : levels) {
    const SweepCell& any = *std::find_if(result.cells.begin(), result.cells.end(),
                                         [&](const SweepCell& c) { return c.h_level == level; });
    RunConfig level_cfg = cfg;
    level_cfg.nx = any.nx;
    level_cfg.ny = any.ny;
    if (log) log("sweep: building discretization for h = 2^-" + std::to_string(level));
    auto disc = Discretization::build(build_mesh(level_cfg), eig);
    if (level == ref_cell.h_level) {
      ref_disc = disc;
      ref_rho = run_cell(cfg, result.cells[result.reference_index], disc,
                         out_dir ? std::optional(ref_cell.dir) : std::nullopt);
      result.cells[result.reference_index].l2_error = 0.0;
    }
    for (std::size_t i = 0; i < result.cells.size(); ++i) {
      SweepCell& cell = result.cells[i];
      if (cell.h_level != level || i == result.reference_index) continue;
      if (log) {
        log("sweep: h = 2^-" + std::to_string(cell.h_level) + ", dt = 2^-" +
            std::to_string(cell.dt_level) + ", delta = " + format_double(cell.delta) +
            ", epsilon = " + format_double(cell.epsilon));
      }
      const Vector rho = run_cell(cfg, cell, disc, out_dir ? std::optional(cell.dir) : std::nullopt);
      const Vector on_ref = prolongate(disc->mesh, rho, ref_disc->mesh);
      cell.l2_error = l2_norm(ref_disc->fem.consistent_mass, on_ref - ref_rho);
    }
  }
  return result;
}

void write_error_matrix(std::span<const SweepCell> cells, const std::filesystem::path& path) {
  std::ostringstream text;
  text << "h_level,dt_level,h,dt,delta,epsilon,nx,ny,l2_error\n";
  for (const auto& c : cells) {
    text << c.h_level << ',' << c.dt_level << ',' << format_double(std::ldexp(1.0, -c.h_level)) << ','
         << format_double(std::ldexp(1.0, -c.dt_level)) << ',' << format_double(c.delta) << ','
         << format_double(c.epsilon) << ',' << c.nx << ',' << c.ny << ','
         << format_double(c.l2_error) << '\n';
  }
  write_file_atomic(path, text.str());
}

}  // namespace fracpme
