// SPDX-License-Identifier: Apache-2.0
#include "fracpme/fem.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace fracpme {

NodalField::NodalField(const Mesh& mesh, Vector values)
    : values_(std::move(values)), mesh_id_(mesh.id()) {
  if (values_.size() != static_cast<Eigen::Index>(mesh.num_vertices())) {
    throw std::invalid_argument("field length " + std::to_string(values_.size()) +
                                " does not match vertex count " +
                                std::to_string(mesh.num_vertices()));
  }
  if (!values_.allFinite()) {
    throw std::invalid_argument("field contains non-finite values");
  }
}

NodalField NodalField::constant(const Mesh& mesh, double value) {
  return NodalField(mesh, Vector::Constant(static_cast<Eigen::Index>(mesh.num_vertices()), value));
}

void NodalField::require_mesh(const Mesh& mesh) const {
  if (mesh_id_ != mesh.id()) {
    throw std::invalid_argument("field belongs to a different mesh");
  }
}

ElementGeometry element_geometry(const Mesh& mesh, std::size_t elem) {
  const auto p = mesh.element_points(elem);
  const AffineMap map = affine_map(mesh, elem);
  const double det = map.B.determinant();
  if (!(det > 0.0)) {
    throw std::runtime_error("degenerate element " + std::to_string(elem));
  }
  // Reference gradients (-1,-1), (1,0), (0,1) pulled back with B^{-T}.
  const Eigen::Matrix2d binv_t = map.B.inverse().transpose();
  ElementGeometry g;
  g.area = 0.5 * det;
  g.grad[1] = binv_t.col(0);
  g.grad[2] = binv_t.col(1);
  g.grad[0] = -g.grad[1] - g.grad[2];
  g.barycenter = (p[0] + p[1] + p[2]) / 3.0;
  return g;
}

std::vector<ElementGeometry> element_geometries(const Mesh& mesh) {
  std::vector<ElementGeometry> out;
  out.reserve(mesh.num_triangles());
  for (std::size_t e = 0; e < mesh.num_triangles(); ++e) out.push_back(element_geometry(mesh, e));
  return out;
}

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

template <class LocalMatrix>
SparseMatrix assemble(const Mesh& mesh, LocalMatrix&& local) {
  const auto n = static_cast<Eigen::Index>(mesh.num_vertices());
  Triplets triplets;
  triplets.reserve(9 * mesh.num_triangles());
  for (std::size_t e = 0; e < mesh.num_triangles(); ++e) {
    const Eigen::Matrix3d a = local(element_geometry(mesh, e));
    const auto& ids = mesh.triangles()[e].vertex_ids;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) triplets.emplace_back(ids[i], ids[j], a(i, j));
    }
  }
  // setFromTriplets sums duplicates in insertion order, so the result is
  // bit-reproducible for a given element ordering.
  SparseMatrix m(n, n);
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.makeCompressed();
  return m;
}

}  // namespace

SparseMatrix assemble_stiffness(const Mesh& mesh) {
  return assemble(mesh, [](const ElementGeometry& g) {
    Eigen::Matrix3d a;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) a(i, j) = g.area * g.grad[i].dot(g.grad[j]);
    }
    return a;
  });
}

SparseMatrix assemble_consistent_mass(const Mesh& mesh) {
  return assemble(mesh, [](const ElementGeometry& g) {
    Eigen::Matrix3d a = Eigen::Matrix3d::Constant(g.area / 12.0);
    a.diagonal().setConstant(g.area / 6.0);
    return a;
  });
}

Vector assemble_lumped_mass(const Mesh& mesh) {
  Vector m = Vector::Zero(static_cast<Eigen::Index>(mesh.num_vertices()));
  for (std::size_t e = 0; e < mesh.num_triangles(); ++e) {
    const double third = element_geometry(mesh, e).area / 3.0;
    for (int id : mesh.triangles()[e].vertex_ids) m[id] += third;
  }
  return m;
}

FemOperators FemOperators::assemble(const Mesh& mesh) {
  FemOperators ops;
  ops.stiffness = assemble_stiffness(mesh);
  ops.consistent_mass = assemble_consistent_mass(mesh);
  ops.lumped_mass = assemble_lumped_mass(mesh);
  ops.elements = element_geometries(mesh);
  ops.domain_area = ops.lumped_mass.sum();
  return ops;
}

NodalField interpolate(const PointFunction& f, const Mesh& mesh) {
  Vector values(static_cast<Eigen::Index>(mesh.num_vertices()));
  for (const auto& v : mesh.vertices()) {
    const double value = f(v.coords);
    if (!std::isfinite(value)) {
      throw std::invalid_argument("interpolated function is not finite at vertex " +
                                  std::to_string(v.id));
    }
    values[v.id] = value;
  }
  return NodalField(mesh, std::move(values));
}

Eigen::Vector2d element_gradient(const Vector& values, const Mesh& mesh,
                                 const ElementGeometry& geom, std::size_t elem) {
  const auto& ids = mesh.triangles()[elem].vertex_ids;
  return values[ids[0]] * geom.grad[0] + values[ids[1]] * geom.grad[1] +
         values[ids[2]] * geom.grad[2];
}

Eigen::Vector2d element_gradient(const NodalField& field, const Mesh& mesh, std::size_t elem) {
  field.require_mesh(mesh);
  return element_gradient(field.values(), mesh, element_geometry(mesh, elem), elem);
}

double integrate_pi_h(const std::function<double(double)>& g, const Vector& values,
                      const Vector& lumped_mass) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    const double gi = g(values[i]);
    if (!std::isfinite(gi)) {
      throw std::invalid_argument("integrand not finite at vertex " + std::to_string(i));
    }
    sum += lumped_mass[i] * gi;
  }
  return sum;
}

double integrate(const Vector& values, const Vector& lumped_mass) {
  return lumped_mass.dot(values);
}

double evaluate(const Mesh& mesh, const Vector& values, const Point& p) {
  const Location loc = locate(mesh, p);
  const auto& ids = mesh.triangles()[loc.elem].vertex_ids;
  return loc.barycentric[0] * values[ids[0]] + loc.barycentric[1] * values[ids[1]] +
         loc.barycentric[2] * values[ids[2]];
}

Vector prolongate(const Mesh& coarse, const Vector& coarse_values, const Mesh& fine) {
  Vector out(static_cast<Eigen::Index>(fine.num_vertices()));
  for (const auto& v : fine.vertices()) out[v.id] = evaluate(coarse, coarse_values, v.coords);
  return out;
}

double l2_distance_to_function(const Mesh& mesh, const Vector& values, const PointFunction& f) {
  // Seven-point degree-5 rule on the reference triangle (weights sum to 1).
  constexpr double a1 = 0.059715871789770, b1 = 0.470142064105115;
  constexpr double a2 = 0.797426985353087, b2 = 0.101286507323456;
  constexpr double w0 = 0.225, w1 = 0.132394152788506, w2 = 0.125939180544827;
  static const std::array<std::array<double, 4>, 7> rule{{
      {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, w0},
      {a1, b1, b1, w1}, {b1, a1, b1, w1}, {b1, b1, a1, w1},
      {a2, b2, b2, w2}, {b2, a2, b2, w2}, {b2, b2, a2, w2},
  }};
  double sum = 0.0;
  for (std::size_t e = 0; e < mesh.num_triangles(); ++e) {
    const auto p = mesh.element_points(e);
    const auto& ids = mesh.triangles()[e].vertex_ids;
    const double area = mesh.element_area(e);
    for (const auto& q : rule) {
      const Point x = q[0] * p[0] + q[1] * p[1] + q[2] * p[2];
      const double uh = q[0] * values[ids[0]] + q[1] * values[ids[1]] + q[2] * values[ids[2]];
      const double diff = uh - f(x);
      sum += q[3] * area * diff * diff;
    }
  }
  return std::sqrt(sum);
}

double l2_norm(const SparseMatrix& consistent_mass, const Vector& values) {
  return std::sqrt(std::max(0.0, values.dot(consistent_mass * values)));
}

void write_matrix_coo(const SparseMatrix& matrix, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << "row,col,value\n" << std::setprecision(17);
  for (Eigen::Index k = 0; k < matrix.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(matrix, k); it; ++it) {
      out << it.row() << ',' << it.col() << ',' << it.value() << '\n';
    }
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace fracpme
