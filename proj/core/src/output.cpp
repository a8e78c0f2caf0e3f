// SPDX-License-Identifier: Apache-2.0
#include "fracpme/output.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace fracpme {

namespace {

std::ofstream open_for_write(const std::filesystem::path& path, std::ios::openmode mode) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, mode);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return out;
}

void check_stream(const std::ostream& out, const std::filesystem::path& path) {
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

double parse_double(const std::string& text, const std::filesystem::path& path) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw std::runtime_error("bad number '" + text + "' in " + path.string());
  }
  return value;
}

}  // namespace

std::string format_double(double value) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc()) throw std::runtime_error("number formatting failed");
  return std::string(buf.data(), ptr);
}

std::string diagnostics_row(const DiagnosticsRecord& r) {
  std::string row = std::to_string(r.step);
  for (double v : {r.time, r.mass, r.linf, r.min_val, r.neg_measure, r.entropy_reg, r.entropy,
                   r.energy, r.grad_product, r.hs_norm_c}) {
    row += ',';
    row += format_double(v);
  }
  row += ',';
  row += std::to_string(r.picard_iters);
  row += ',';
  row += format_double(r.picard_residual);
  return row;
}

void write_diagnostics(std::span<const DiagnosticsRecord> records, const std::filesystem::path& path) {
  auto out = open_for_write(path, std::ios::trunc);
  out << kDiagnosticsHeader << '\n';
  for (const auto& r : records) out << diagnostics_row(r) << '\n';
  out.flush();
  check_stream(out, path);
}

DiagnosticsWriter::DiagnosticsWriter(const std::filesystem::path& path) : path_(path) {
  auto out = open_for_write(path_, std::ios::trunc);
  out << kDiagnosticsHeader << '\n';
  out.flush();
  check_stream(out, path_);
}

void DiagnosticsWriter::append(const DiagnosticsRecord& r) {
  auto out = open_for_write(path_, std::ios::app);
  out << diagnostics_row(r) << '\n';
  out.flush();
  check_stream(out, path_);
}

std::filesystem::path write_snapshot(const Snapshot& snap, const Mesh& mesh,
                                     const std::filesystem::path& dir) {
  const auto n = static_cast<Eigen::Index>(mesh.num_vertices());
  if (snap.rho.size() != n || snap.c.size() != n) {
    throw std::invalid_argument("snapshot does not match the mesh");
  }
  char name[32];
  std::snprintf(name, sizeof(name), "snap_%06d.csv", snap.step);
  const auto path = dir / name;
  std::ostringstream text;
  text << "node,x,y,rho,c\n";
  for (Eigen::Index i = 0; i < n; ++i) {
    const Point& p = mesh.point(static_cast<std::size_t>(i));
    text << i << ',' << format_double(p.x()) << ',' << format_double(p.y()) << ','
         << format_double(snap.rho[i]) << ',' << format_double(snap.c[i]) << '\n';
  }
  auto out = open_for_write(path, std::ios::trunc);
  out << text.str();
  out.flush();
  check_stream(out, path);
  return path;
}

SnapshotTable read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  if (line != "node,x,y,rho,c") throw std::runtime_error("unexpected snapshot header in " + path.string());
  SnapshotTable table;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::array<std::string, 5> cells;
    std::size_t start = 0;
    for (std::size_t k = 0; k < cells.size(); ++k) {
      const std::size_t comma = line.find(',', start);
      if ((comma == std::string::npos) != (k == cells.size() - 1)) {
        throw std::runtime_error("malformed snapshot row in " + path.string());
      }
      cells[k] = line.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
      start = comma + 1;
    }
    table.node.push_back(static_cast<int>(parse_double(cells[0], path)));
    table.x.push_back(parse_double(cells[1], path));
    table.y.push_back(parse_double(cells[2], path));
    table.rho.push_back(parse_double(cells[3], path));
    table.c.push_back(parse_double(cells[4], path));
  }
  return table;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    auto out = open_for_write(tmp, std::ios::trunc);
    out << content;
    out.flush();
    check_stream(out, tmp);
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace fracpme
