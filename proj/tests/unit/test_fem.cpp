// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <numbers>
#include <random>

#include <doctest.h>

#include "fracpme/fem.hpp"
#include "fracpme/mesh.hpp"
#include "oracles.hpp"

using namespace fracpme;

namespace {

Mesh reference_triangle() { return Mesh({{0, {0, 0}}, {1, {1, 0}}, {2, {0, 1}}}, {Triangle{{0, 1, 2}}}); }

oracle::DenseOperators dense_oracle(const Mesh& m) {
  std::vector<oracle::P2> nodes;
  for (const auto& v : m.vertices()) nodes.push_back(v.coords);
  std::vector<std::array<int, 3>> tris;
  for (const auto& t : m.triangles()) tris.push_back(t.vertex_ids);
  return oracle::dense_operators(nodes, tris);
}

}  // namespace

TEST_CASE("reference element local matrices") {
  const Mesh m = reference_triangle();
  Eigen::Matrix3d k_expected;
  k_expected << 2, -1, -1, -1, 1, 0, -1, 0, 1;
  k_expected *= 0.5;
  Eigen::Matrix3d m_expected;
  m_expected << 2, 1, 1, 1, 2, 1, 1, 1, 2;
  m_expected /= 24.0;
  CHECK((Eigen::MatrixXd(assemble_stiffness(m)) - k_expected).norm() <= 1e-15);
  CHECK((Eigen::MatrixXd(assemble_consistent_mass(m)) - m_expected).norm() <= 1e-15);
  const Vector ml = assemble_lumped_mass(m);
  for (int i = 0; i < 3; ++i) CHECK(ml[i] == doctest::Approx(1.0 / 6).epsilon(1e-15));
}

TEST_CASE("assembly agrees with the quadrature oracle on stretched meshes") {
  for (auto pattern : {MeshPattern::RightDiagonal, MeshPattern::Crisscross}) {
    const Mesh m = build_structured_rect_mesh({-2, 1, 0, 0.5}, 5, 3, pattern);
    const auto ops = dense_oracle(m);
    CHECK((Eigen::MatrixXd(assemble_stiffness(m)) - ops.K).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((Eigen::MatrixXd(assemble_consistent_mass(m)) - ops.M).cwiseAbs().maxCoeff() <= 1e-14);
    CHECK((assemble_lumped_mass(m) - ops.ML).cwiseAbs().maxCoeff() <= 1e-14);
  }
}

TEST_CASE("operator invariants") {
  const Mesh m = build_structured_rect_mesh({0, 1, 0, 1}, 9, 7);
  const FemOperators ops = FemOperators::assemble(m);
  const Eigen::MatrixXd K(ops.stiffness), M(ops.consistent_mass);
  const Vector ones = Vector::Ones(K.rows());
  CHECK((K * ones).lpNorm<Eigen::Infinity>() <= 1e-13);
  CHECK((K - K.transpose()).norm() == 0.0);
  CHECK((M - M.transpose()).norm() == 0.0);
  CHECK((M * ones - ops.lumped_mass).lpNorm<Eigen::Infinity>() <= 1e-13);
  CHECK(ones.dot(M * ones) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(ops.lumped_mass.sum() == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(ops.lumped_mass.minCoeff() > 0.0);

  // Nullspace of K is exactly the constants on a connected mesh.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K);
  CHECK(std::abs(es.eigenvalues()[0]) <= 1e-12);
  CHECK(es.eigenvalues()[1] > 1e-3);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> em(M);
  CHECK(em.eigenvalues()[0] > 0.0);
}

TEST_CASE("energy of a linear function") {
  const Mesh m = build_structured_rect_mesh({0, 1, 0, 1}, 6, 6);
  const SparseMatrix K = assemble_stiffness(m);
  const NodalField u = interpolate([](const Point& p) { return p.x(); }, m);
  CHECK(u.values().dot(K * u.values()) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("interpolation") {
  const Mesh m = build_structured_rect_mesh({0, 1, 0, 1}, 3, 3);
  const NodalField one = interpolate([](const Point&) { return 1.0; }, m);
  CHECK(one.values().isApproxToConstant(1.0));
  const NodalField x = interpolate([](const Point& p) { return p.x(); }, m);
  for (std::size_t i = 0; i < m.num_vertices(); ++i) {
    CHECK(x[static_cast<Eigen::Index>(i)] == m.point(static_cast<int>(i)).x());
  }
  const double sigma = 0.05;
  const NodalField g = interpolate(
      [&](const Point& p) { return std::exp(-p.squaredNorm() / (2 * std::numbers::pi * sigma)); }, m);
  const Point p5 = m.point(5);
  CHECK(g[5] == std::exp(-p5.squaredNorm() / (2 * std::numbers::pi * sigma)));
  CHECK_THROWS_WITH_AS(interpolate([](const Point& p) { return p.x() > 0.9 ? NAN : 0.0; }, m),
                       doctest::Contains("vertex 3"), std::invalid_argument);
}

TEST_CASE("element gradients") {
  const Mesh m = build_structured_rect_mesh({-1, 1, 0, 3}, 4, 5, MeshPattern::Crisscross);
  const NodalField x = interpolate([](const Point& p) { return p.x(); }, m);
  const NodalField c = NodalField::constant(m, 3.5);
  const NodalField xy = interpolate([](const Point& p) { return p.x() + 2 * p.y(); }, m);
  for (std::size_t e = 0; e < m.num_triangles(); ++e) {
    CHECK((element_gradient(x, m, e) - Eigen::Vector2d(1, 0)).norm() <= 1e-13);
    CHECK(element_gradient(c, m, e).norm() <= 1e-13);
    CHECK((element_gradient(xy, m, e) - Eigen::Vector2d(1, 2)).norm() <= 1e-12);
  }
}

TEST_CASE("lumped integrals") {
  const Mesh m = build_structured_rect_mesh({-2, 2, -2, 2}, 5, 5);
  const Vector ml = assemble_lumped_mass(m);
  const Vector ones = Vector::Ones(ml.size());
  CHECK(integrate_pi_h([](double v) { return v; }, ones, ml) == doctest::Approx(16.0).epsilon(1e-13));
  const Vector pos = interpolate([](const Point& p) { return 1.0 + p.squaredNorm(); }, m).values();
  CHECK(integrate_pi_h([](double v) { double n = std::min(v, 0.0); return n * n; }, pos, ml) == 0.0);
  CHECK(integrate_pi_h([](double v) { return v * (std::log(v) - 1) + 1; }, ones, ml) == 0.0);
  CHECK_THROWS_AS(integrate_pi_h([](double) { return INFINITY; }, ones, ml), std::invalid_argument);

  // The lumped sum of nodal values is the exact integral of the P1 function.
  const NodalField lin = interpolate([](const Point& p) { return 3 + p.x() - 0.5 * p.y(); }, m);
  CHECK(integrate(lin.values(), ml) == doctest::Approx(48.0).epsilon(1e-13));
}

TEST_CASE("nodal Jensen inequality on random data") {
  auto gen = oracle::rng(11);
  std::normal_distribution<double> normal;
  const Mesh m = build_structured_rect_mesh({0, 1, 0, 1}, 8, 8, MeshPattern::Crisscross);
  const FemOperators ops = FemOperators::assemble(m);
  for (int trial = 0; trial < 50; ++trial) {
    Vector v(ops.lumped_mass.size());
    for (auto& x : v) x = normal(gen);
    const double consistent = v.dot(ops.consistent_mass * v);
    const double lumped = ops.lumped_mass.dot(v.cwiseAbs2());
    CHECK(consistent <= lumped * (1 + 1e-14));
  }
}

TEST_CASE("L2 distance to smooth functions converges at second order") {
  auto f = [](const Point& p) { return std::cos(std::numbers::pi * p.x()) * std::sin(p.y()); };
  double prev = 0.0;
  for (int n : {8, 16, 32}) {
    const Mesh m = build_structured_rect_mesh({0, 1, 0, 1}, n, n);
    const double err = l2_distance_to_function(m, interpolate(f, m).values(), f);
    if (prev > 0.0) CHECK(std::log2(prev / err) == doctest::Approx(2.0).epsilon(0.05));
    prev = err;
  }
  // A P1 function is reproduced exactly.
  const Mesh m = build_structured_rect_mesh({0, 1, 0, 1}, 4, 4);
  auto lin = [](const Point& p) { return 1 + 2 * p.x() - p.y(); };
  CHECK(l2_distance_to_function(m, interpolate(lin, m).values(), lin) <= 1e-14);
}

TEST_CASE("prolongation between nested meshes is exact for P1 fields") {
  const Mesh coarse = build_structured_rect_mesh({0, 1, 0, 1}, 4, 4);
  const Mesh fine = build_structured_rect_mesh({0, 1, 0, 1}, 16, 16);
  auto g = [](const Point& p) { return std::exp(p.x()) * p.y(); };
  const Vector cv = interpolate(g, coarse).values();
  const Vector fv = prolongate(coarse, cv, fine);
  // Evaluating the prolonged field at coarse nodes returns coarse values.
  for (std::size_t i = 0; i < coarse.num_vertices(); ++i) {
    CHECK(evaluate(fine, fv, coarse.point(static_cast<int>(i))) ==
          doctest::Approx(cv[static_cast<Eigen::Index>(i)]).epsilon(1e-13));
  }
  // The L2 norm of the coarse function is preserved.
  const FemOperators oc = FemOperators::assemble(coarse), of = FemOperators::assemble(fine);
  CHECK(l2_norm(of.consistent_mass, fv) == doctest::Approx(l2_norm(oc.consistent_mass, cv)).epsilon(1e-12));
}

TEST_CASE("nodal fields are tied to their mesh") {
  const Mesh a = build_structured_rect_mesh({0, 1, 0, 1}, 2, 2);
  const Mesh b = build_structured_rect_mesh({0, 1, 0, 1}, 2, 2);
  const NodalField f = NodalField::constant(a, 1.0);
  CHECK_NOTHROW(f.require_mesh(a));
  CHECK_THROWS_AS(f.require_mesh(b), std::invalid_argument);
  CHECK_THROWS_AS(NodalField(a, Vector::Ones(3)), std::invalid_argument);
}
