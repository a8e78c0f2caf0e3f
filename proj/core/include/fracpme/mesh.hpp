// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include <Eigen/Core>

namespace fracpme {

using Point = Eigen::Vector2d;

struct Vertex {
  int id = 0;
  Point coords = Point::Zero();
};

/// Vertex indices of a triangle. Index 0 is the designated P_0 used by the
/// element map and the Theta construction.
struct Triangle {
  std::array<int, 3> vertex_ids{};
};

struct Bounds {
  double xmin = 0.0;
  double xmax = 1.0;
  double ymin = 0.0;
  double ymax = 1.0;

  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
  double area() const { return width() * height(); }
};

enum class MeshPattern { RightDiagonal, Crisscross };

/// Grid metadata kept by structured meshes so that point location is O(1).
struct StructuredLayout {
  int nx = 0;
  int ny = 0;
  MeshPattern pattern = MeshPattern::RightDiagonal;
};

/// x-hat in the reference triangle maps to p0 + B x-hat.
struct AffineMap {
  Eigen::Matrix2d B = Eigen::Matrix2d::Identity();
  Point p0 = Point::Zero();

  Point apply(const Point& ref) const { return p0 + B * ref; }
};

/// Immutable conforming triangulation of a 2D polygonal domain.
class Mesh {
 public:
  /// Validates ids, finiteness and counterclockwise orientation; throws
  /// std::invalid_argument on violation. Bounds default to the bounding box.
  Mesh(std::vector<Vertex> vertices, std::vector<Triangle> triangles,
       std::optional<Bounds> bounds = std::nullopt,
       std::optional<StructuredLayout> layout = std::nullopt);

  const std::vector<Vertex>& vertices() const { return vertices_; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  const Bounds& bounds() const { return bounds_; }
  const std::optional<StructuredLayout>& layout() const { return layout_; }

  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_triangles() const { return triangles_.size(); }

  /// Maximum element diameter.
  double h() const { return h_; }

  /// Identity tag shared by fields defined on this mesh.
  std::uint64_t id() const { return id_; }

  const Point& point(int vertex) const { return vertices_[static_cast<std::size_t>(vertex)].coords; }
  std::array<Point, 3> element_points(std::size_t elem) const;

  double element_area(std::size_t elem) const;
  double element_diameter(std::size_t elem) const;
  double element_inradius(std::size_t elem) const;
  double total_area() const;

 private:
  std::vector<Vertex> vertices_;
  std::vector<Triangle> triangles_;
  Bounds bounds_;
  std::optional<StructuredLayout> layout_;
  double h_ = 0.0;
  std::uint64_t id_ = 0;
};

/// Uniform triangulation of an axis-aligned rectangle. Right-diagonal cells
/// are split along the (i,j)-(i+1,j+1) diagonal; crisscross cells get a
/// center vertex and four triangles. Vertex 0 of each triangle is its
/// right-angle vertex.
Mesh build_structured_rect_mesh(const Bounds& bounds, int nx, int ny,
                                MeshPattern pattern = MeshPattern::RightDiagonal);

AffineMap affine_map(const Mesh& mesh, std::size_t elem);

struct AcuteReport {
  bool ok = true;
  double worst_angle = 0.0;  // radians
  std::vector<std::size_t> offending_elems;
};

/// Every interior angle must be at most pi/2 + tol.
AcuteReport check_weakly_acute(const Mesh& mesh, double tol = 1e-12);

struct ConformityReport {
  bool ok = true;
  std::size_t interior_edges = 0;
  std::size_t boundary_edges = 0;
  std::size_t bad_edges = 0;  // shared by more than two triangles
  double area_defect = 0.0;   // |sum of areas - |Omega|| / |Omega|
};

ConformityReport check_conformity(const Mesh& mesh);

struct QualityReport {
  double h_max = 0.0;
  double h_min = 0.0;
  double min_inradius = 0.0;
  double ratio = 0.0;  // h_max / min_inradius
};

QualityReport mesh_quality(const Mesh& mesh);

struct Location {
  std::size_t elem = 0;
  std::array<double, 3> barycentric{};
};

/// Locates a point on a structured mesh (points slightly outside are clamped
/// to the domain). Throws std::logic_error on meshes without a layout.
Location locate(const Mesh& mesh, const Point& p);

/// Writes vertices.csv (id,x,y) and triangles.csv (id,v0,v1,v2) into dir.
void write_mesh_csv(const Mesh& mesh, const std::filesystem::path& dir);

const char* to_string(MeshPattern pattern);
MeshPattern mesh_pattern_from_string(const std::string& name);

}  // namespace fracpme
