// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fracpme/config.hpp"

namespace fracpme {

struct SweepCell {
  int h_level = 0;   // h = 2^-h_level
  int dt_level = 0;  // dt = 2^-dt_level
  double delta = 0.0;
  double epsilon = 0.0;
  int nx = 0;
  int ny = 0;
  double l2_error = 0.0;  // distance at final time to the reference, on the reference mesh
  std::filesystem::path dir;
};

struct SweepResult {
  std::vector<SweepCell> cells;  // grid order: h, then dt, then delta, then epsilon
  std::size_t reference_index = 0;
};

using SweepLog = std::function<void(const std::string&)>;

/// Runs every (h, dt, delta, epsilon) combination and measures each final
/// density against the finest combination, which is the reference. When
/// `out_dir` is set every cell writes diag.csv and its final snapshot into
/// its own subdirectory. Meshes must nest (same pattern, levels as powers of
/// two) for the comparison to be exact.
SweepResult run_sweep(const RunConfig& cfg, const std::optional<std::filesystem::path>& out_dir,
                      const SweepLog& log = {});

/// Header h_level,dt_level,h,dt,delta,epsilon,nx,ny,l2_error.
void write_error_matrix(std::span<const SweepCell> cells, const std::filesystem::path& path);

}  // namespace fracpme
