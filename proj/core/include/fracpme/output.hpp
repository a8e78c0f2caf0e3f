// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "fracpme/diagnostics.hpp"
#include "fracpme/mesh.hpp"
#include "fracpme/stepper.hpp"

namespace fracpme {

/// Shortest decimal text that parses back to exactly the same double.
std::string format_double(double value);

inline constexpr const char* kDiagnosticsHeader =
    "step,time,mass,linf,min_val,neg_measure,entropy_reg,entropy,energy,grad_product,hs_norm_c,"
    "picard_iters,picard_residual";

std::string diagnostics_row(const DiagnosticsRecord& r);

/// Writes the header and one row per record. Throws std::runtime_error on
/// I/O failure.
void write_diagnostics(std::span<const DiagnosticsRecord> records, const std::filesystem::path& path);

/// snap_{step:06}.csv inside `dir`, columns node,x,y,rho,c in vertex order.
std::filesystem::path write_snapshot(const Snapshot& snap, const Mesh& mesh,
                                     const std::filesystem::path& dir);

struct SnapshotTable {
  std::vector<int> node;
  std::vector<double> x, y, rho, c;
};

SnapshotTable read_snapshot(const std::filesystem::path& path);

/// Writes `content` to a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// Streams diagnostics rows as a run progresses so a crash keeps the
/// completed steps on disk.
class DiagnosticsWriter {
 public:
  explicit DiagnosticsWriter(const std::filesystem::path& path);
  void append(const DiagnosticsRecord& r);
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace fracpme
