// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "fracpme/mesh.hpp"

namespace fracpme {

using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

/// Nodal coefficients of a continuous piecewise affine function.
class NodalField {
 public:
  NodalField() = default;
  NodalField(const Mesh& mesh, Vector values);

  static NodalField constant(const Mesh& mesh, double value);

  const Vector& values() const { return values_; }
  Vector& values() { return values_; }
  std::uint64_t mesh_id() const { return mesh_id_; }
  Eigen::Index size() const { return values_.size(); }

  double operator[](Eigen::Index i) const { return values_[i]; }

  /// Throws std::invalid_argument unless the field lives on `mesh`.
  void require_mesh(const Mesh& mesh) const;

 private:
  Vector values_;
  std::uint64_t mesh_id_ = 0;
};

/// Per-element data that is constant on a P1 triangle.
struct ElementGeometry {
  double area = 0.0;
  std::array<Eigen::Vector2d, 3> grad{};  // gradients of the local hat functions
  Eigen::Vector2d barycenter = Eigen::Vector2d::Zero();
};

ElementGeometry element_geometry(const Mesh& mesh, std::size_t elem);
std::vector<ElementGeometry> element_geometries(const Mesh& mesh);

SparseMatrix assemble_stiffness(const Mesh& mesh);
/// Entry i is the integral of the hat function of vertex i.
Vector assemble_lumped_mass(const Mesh& mesh);
SparseMatrix assemble_consistent_mass(const Mesh& mesh);

/// Matrices and element data of one mesh, assembled once and shared.
struct FemOperators {
  SparseMatrix stiffness;
  SparseMatrix consistent_mass;
  Vector lumped_mass;
  std::vector<ElementGeometry> elements;
  double domain_area = 0.0;

  static FemOperators assemble(const Mesh& mesh);
};

using PointFunction = std::function<double(const Point&)>;

/// Nodal interpolant pi_h f. Non-finite values are rejected with the vertex id.
NodalField interpolate(const PointFunction& f, const Mesh& mesh);

Eigen::Vector2d element_gradient(const NodalField& field, const Mesh& mesh, std::size_t elem);
Eigen::Vector2d element_gradient(const Vector& values, const Mesh& mesh,
                                 const ElementGeometry& geom, std::size_t elem);

/// Integral of pi_h(g(field)): the lumped-mass weighted sum of g at the nodes.
double integrate_pi_h(const std::function<double(double)>& g, const Vector& values,
                      const Vector& lumped_mass);

/// Integral of the P1 function (exact).
double integrate(const Vector& values, const Vector& lumped_mass);

/// Value of a P1 field at a point of a structured mesh.
double evaluate(const Mesh& mesh, const Vector& values, const Point& p);

/// Prolongs a P1 field from `coarse` to the vertices of `fine` by evaluation.
Vector prolongate(const Mesh& coarse, const Vector& coarse_values, const Mesh& fine);

/// Exact-integrand L2 distance between a P1 field and a smooth function,
/// using a degree-5 seven-point rule on each element.
double l2_distance_to_function(const Mesh& mesh, const Vector& values, const PointFunction& f);

/// L2 norm of a P1 field through the consistent mass matrix.
double l2_norm(const SparseMatrix& consistent_mass, const Vector& values);

/// Coordinate-format dump with a "row,col,value" header (debugging aid).
void write_matrix_coo(const SparseMatrix& matrix, const std::filesystem::path& path);

}  // namespace fracpme
