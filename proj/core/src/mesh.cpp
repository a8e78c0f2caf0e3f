// SPDX-License-Identifier: Apache-2.0
#include "fracpme/mesh.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/LU>

namespace fracpme {

namespace {

std::atomic<std::uint64_t> next_mesh_id{1};

double signed_area(const Point& a, const Point& b, const Point& c) {
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y()));
}

Bounds bounding_box(const std::vector<Vertex>& vertices) {
  Bounds b{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
           std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const auto& v : vertices) {
    b.xmin = std::min(b.xmin, v.coords.x());
    b.xmax = std::max(b.xmax, v.coords.x());
    b.ymin = std::min(b.ymin, v.coords.y());
    b.ymax = std::max(b.ymax, v.coords.y());
  }
  return b;
}

// Interior angle at vertex a of triangle (a, b, c).
double angle_at(const Point& a, const Point& b, const Point& c) {
  const Point u = b - a;
  const Point w = c - a;
  return std::atan2(std::abs(u.x() * w.y() - u.y() * w.x()), u.dot(w));
}

}  // namespace

Mesh::Mesh(std::vector<Vertex> vertices, std::vector<Triangle> triangles,
           std::optional<Bounds> bounds, std::optional<StructuredLayout> layout)
    : vertices_(std::move(vertices)),
      triangles_(std::move(triangles)),
      layout_(layout),
      id_(next_mesh_id.fetch_add(1)) {
  if (vertices_.empty() || triangles_.empty()) {
    throw std::invalid_argument("mesh needs at least one vertex and one triangle");
  }
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    if (vertices_[i].id != static_cast<int>(i)) {
      throw std::invalid_argument("vertex ids must be contiguous, offending id " +
                                  std::to_string(vertices_[i].id));
    }
    if (!vertices_[i].coords.allFinite()) {
      throw std::invalid_argument("non-finite coordinates at vertex " + std::to_string(i));
    }
  }
  const int n = static_cast<int>(vertices_.size());
  for (std::size_t e = 0; e < triangles_.size(); ++e) {
    const auto& ids = triangles_[e].vertex_ids;
    for (int id : ids) {
      if (id < 0 || id >= n) {
        throw std::invalid_argument("triangle " + std::to_string(e) + " references vertex " +
                                    std::to_string(id));
      }
    }
    if (ids[0] == ids[1] || ids[1] == ids[2] || ids[0] == ids[2]) {
      throw std::invalid_argument("triangle " + std::to_string(e) + " has repeated vertices");
    }
    if (!(signed_area(point(ids[0]), point(ids[1]), point(ids[2])) > 0.0)) {
      throw std::invalid_argument("triangle " + std::to_string(e) +
                                  " is degenerate or clockwise");
    }
  }
  bounds_ = bounds ? *bounds : bounding_box(vertices_);
  for (std::size_t e = 0; e < triangles_.size(); ++e) {
    h_ = std::max(h_, element_diameter(e));
  }
}

std::array<Point, 3> Mesh::element_points(std::size_t elem) const {
  const auto& ids = triangles_.at(elem).vertex_ids;
  return {point(ids[0]), point(ids[1]), point(ids[2])};
}

double Mesh::element_area(std::size_t elem) const {
  const auto p = element_points(elem);
  return signed_area(p[0], p[1], p[2]);
}

double Mesh::element_diameter(std::size_t elem) const {
  const auto p = element_points(elem);
  return std::max({(p[1] - p[0]).norm(), (p[2] - p[1]).norm(), (p[0] - p[2]).norm()});
}

double Mesh::element_inradius(std::size_t elem) const {
  const auto p = element_points(elem);
  const double perimeter = (p[1] - p[0]).norm() + (p[2] - p[1]).norm() + (p[0] - p[2]).norm();
  return 2.0 * element_area(elem) / perimeter;
}

double Mesh::total_area() const {
  double sum = 0.0;
  for (std::size_t e = 0; e < triangles_.size(); ++e) sum += element_area(e);
  return sum;
}

Mesh build_structured_rect_mesh(const Bounds& bounds, int nx, int ny, MeshPattern pattern) {
  if (nx < 1 || ny < 1) {
    throw std::invalid_argument("nx and ny must be at least 1");
  }
  if (!(bounds.xmax > bounds.xmin) || !(bounds.ymax > bounds.ymin) ||
      !std::isfinite(bounds.area())) {
    throw std::invalid_argument("rectangle bounds are inverted or degenerate");
  }
  const double hx = bounds.width() / nx;
  const double hy = bounds.height() / ny;
  const int npx = nx + 1;
  const int npy = ny + 1;

  std::vector<Vertex> vertices;
  vertices.reserve(static_cast<std::size_t>(npx) * npy +
                   (pattern == MeshPattern::Crisscross ? static_cast<std::size_t>(nx) * ny : 0));
  // Exact end coordinates avoid roundoff in the domain area.
  auto coord = [](double lo, double hi, int i, int n) {
    return i == n ? hi : lo + (hi - lo) * static_cast<double>(i) / n;
  };
  for (int j = 0; j < npy; ++j) {
    for (int i = 0; i < npx; ++i) {
      vertices.push_back({static_cast<int>(vertices.size()),
                          Point(coord(bounds.xmin, bounds.xmax, i, nx),
                                coord(bounds.ymin, bounds.ymax, j, ny))});
    }
  }
  auto vid = [npx](int i, int j) { return j * npx + i; };

  std::vector<Triangle> triangles;
  if (pattern == MeshPattern::RightDiagonal) {
    triangles.reserve(2 * static_cast<std::size_t>(nx) * ny);
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        const int v00 = vid(i, j), v10 = vid(i + 1, j), v01 = vid(i, j + 1),
                  v11 = vid(i + 1, j + 1);
        // Right angles sit at v10 (lower) and v01 (upper).
        triangles.push_back({{v10, v11, v00}});
        triangles.push_back({{v01, v00, v11}});
      }
    }
  } else {
    triangles.reserve(4 * static_cast<std::size_t>(nx) * ny);
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        const int c = static_cast<int>(vertices.size());
        vertices.push_back({c, Point(bounds.xmin + (i + 0.5) * hx, bounds.ymin + (j + 0.5) * hy)});
        const int v00 = vid(i, j), v10 = vid(i + 1, j), v01 = vid(i, j + 1),
                  v11 = vid(i + 1, j + 1);
        // Right angle at the center only for square cells; vertex 0 is the
        // center either way.
        triangles.push_back({{c, v00, v10}});
        triangles.push_back({{c, v10, v11}});
        triangles.push_back({{c, v11, v01}});
        triangles.push_back({{c, v01, v00}});
      }
    }
  }
  return Mesh(std::move(vertices), std::move(triangles), bounds, StructuredLayout{nx, ny, pattern});
}

AffineMap affine_map(const Mesh& mesh, std::size_t elem) {
  if (elem >= mesh.num_triangles()) {
    throw std::out_of_range("element index " + std::to_string(elem) + " out of range");
  }
  const auto p = mesh.element_points(elem);
  AffineMap map;
  map.p0 = p[0];
  map.B.col(0) = p[1] - p[0];
  map.B.col(1) = p[2] - p[0];
  return map;
}

AcuteReport check_weakly_acute(const Mesh& mesh, double tol) {
  AcuteReport report;
  const double limit = std::numbers::pi / 2.0 + tol;
  for (std::size_t e = 0; e < mesh.num_triangles(); ++e) {
    const auto p = mesh.element_points(e);
    const double worst =
        std::max({angle_at(p[0], p[1], p[2]), angle_at(p[1], p[2], p[0]), angle_at(p[2], p[0], p[1])});
    report.worst_angle = std::max(report.worst_angle, worst);
    if (worst > limit) {
      report.ok = false;
      report.offending_elems.push_back(e);
    }
  }
  return report;
}

ConformityReport check_conformity(const Mesh& mesh) {
  ConformityReport report;
  std::map<std::pair<int, int>, int> edge_count;
  for (const auto& t : mesh.triangles()) {
    for (int k = 0; k < 3; ++k) {
      int a = t.vertex_ids[k];
      int b = t.vertex_ids[(k + 1) % 3];
      if (a > b) std::swap(a, b);
      ++edge_count[{a, b}];
    }
  }
  for (const auto& [edge, count] : edge_count) {
    if (count == 1) {
      ++report.boundary_edges;
    } else if (count == 2) {
      ++report.interior_edges;
    } else {
      ++report.bad_edges;
    }
  }
  const double domain_area = mesh.bounds().area();
  report.area_defect = std::abs(mesh.total_area() - domain_area) / domain_area;
  report.ok = report.bad_edges == 0 && report.area_defect <= 1e-12;
  return report;
}

QualityReport mesh_quality(const Mesh& mesh) {
  QualityReport q;
  q.h_min = std::numeric_limits<double>::infinity();
  q.min_inradius = std::numeric_limits<double>::infinity();
  for (std::size_t e = 0; e < mesh.num_triangles(); ++e) {
    const double d = mesh.element_diameter(e);
    q.h_max = std::max(q.h_max, d);
    q.h_min = std::min(q.h_min, d);
    q.min_inradius = std::min(q.min_inradius, mesh.element_inradius(e));
  }
  q.ratio = q.h_max / q.min_inradius;
  return q;
}

Location locate(const Mesh& mesh, const Point& p) {
  if (!mesh.layout()) {
    throw std::logic_error("point location requires a structured mesh");
  }
  const auto& layout = *mesh.layout();
  const Bounds& b = mesh.bounds();
  const double hx = b.width() / layout.nx;
  const double hy = b.height() / layout.ny;
  const double x = std::clamp(p.x(), b.xmin, b.xmax);
  const double y = std::clamp(p.y(), b.ymin, b.ymax);
  const int i = std::clamp(static_cast<int>(std::floor((x - b.xmin) / hx)), 0, layout.nx - 1);
  const int j = std::clamp(static_cast<int>(std::floor((y - b.ymin) / hy)), 0, layout.ny - 1);
  const double u = (x - b.xmin) / hx - i;  // local coordinates in [0,1]^2
  const double v = (y - b.ymin) / hy - j;
  const std::size_t cell = static_cast<std::size_t>(j) * layout.nx + i;

  std::size_t elem = 0;
  if (layout.pattern == MeshPattern::RightDiagonal) {
    elem = 2 * cell + (v > u ? 1 : 0);
  } else {
    // Quadrants separated by the two cell diagonals.
    const double du = u - 0.5;
    const double dv = v - 0.5;
    std::size_t quadrant;
    if (std::abs(du) >= std::abs(dv)) {
      quadrant = du >= 0 ? 1 : 3;
    } else {
      quadrant = dv >= 0 ? 2 : 0;
    }
    elem = 4 * cell + quadrant;
  }

  const auto pts = mesh.element_points(elem);
  const AffineMap map = affine_map(mesh, elem);
  const Eigen::Vector2d ref = map.B.partialPivLu().solve(Point(x, y) - pts[0]);
  Location loc;
  loc.elem = elem;
  loc.barycentric = {1.0 - ref.x() - ref.y(), ref.x(), ref.y()};
  return loc;
}

void write_mesh_csv(const Mesh& mesh, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "vertices.csv");
    if (!out) throw std::runtime_error("cannot open " + (dir / "vertices.csv").string());
    out << "id,x,y\n" << std::setprecision(17);
    for (const auto& v : mesh.vertices()) {
      out << v.id << ',' << v.coords.x() << ',' << v.coords.y() << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + (dir / "vertices.csv").string());
  }
  std::ofstream out(dir / "triangles.csv");
  if (!out) throw std::runtime_error("cannot open " + (dir / "triangles.csv").string());
  out << "id,v0,v1,v2\n";
  for (std::size_t e = 0; e < mesh.num_triangles(); ++e) {
    const auto& ids = mesh.triangles()[e].vertex_ids;
    out << e << ',' << ids[0] << ',' << ids[1] << ',' << ids[2] << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + (dir / "triangles.csv").string());
}

const char* to_string(MeshPattern pattern) {
  return pattern == MeshPattern::RightDiagonal ? "right-diagonal" : "crisscross";
}

MeshPattern mesh_pattern_from_string(const std::string& name) {
  if (name == "right-diagonal") return MeshPattern::RightDiagonal;
  if (name == "crisscross") return MeshPattern::Crisscross;
  throw std::invalid_argument("unknown mesh pattern '" + name + "'");
}

}  // namespace fracpme
