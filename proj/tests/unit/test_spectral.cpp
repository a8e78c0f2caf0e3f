// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include <doctest.h>

#include "fracpme/fem.hpp"
#include "fracpme/mesh.hpp"
#include "fracpme/spectral.hpp"
#include "mesh_adapter.hpp"
#include "oracles.hpp"

using namespace fracpme;

namespace {

struct Setup {
  Mesh mesh;
  FemOperators ops;
  SpectralDecomposition eig;
};

Setup make(int nx, int ny, Bounds b = {0, 1, 0, 1}, MeshPattern pattern = MeshPattern::RightDiagonal) {
  Mesh m = build_structured_rect_mesh(b, nx, ny, pattern);
  FemOperators ops = FemOperators::assemble(m);
  SpectralDecomposition eig = compute_eigendecomposition(ops.stiffness, ops.consistent_mass);
  return {std::move(m), std::move(ops), std::move(eig)};
}

Vector random_vector(Eigen::Index n, std::mt19937_64& gen) {
  std::normal_distribution<double> normal;
  Vector v(n);
  for (auto& x : v) x = normal(gen);
  return v;
}

}  // namespace

TEST_CASE("zero-mean projection") {
  const Mesh m = build_structured_rect_mesh({0, 1, 0, 1}, 5, 4);
  const Vector ml = assemble_lumped_mass(m);
  CHECK(project_zero_mean(Vector::Constant(ml.size(), 3.0), ml).values().lpNorm<Eigen::Infinity>() <= 1e-14);
  auto gen = oracle::rng(3);
  const Vector v = random_vector(ml.size(), gen);
  const Vector p = project_zero_mean(v, ml).values();
  CHECK(std::abs(ml.dot(p)) <= 1e-14);
  CHECK((project_zero_mean(p, ml).values() - p).lpNorm<Eigen::Infinity>() <= 1e-15);
  CHECK((p - (v.array() - ml.dot(v) / ml.sum()).matrix()).lpNorm<Eigen::Infinity>() <= 1e-14);
  CHECK_THROWS_AS(ZeroMeanField::checked(v + Vector::Ones(v.size()), ml), std::invalid_argument);
  CHECK_NOTHROW(ZeroMeanField::checked(p, ml));
}

TEST_CASE("two-element mesh against the Jacobi oracle") {
  const Setup s = make(1, 1);
  REQUIRE(s.eig.size() == 3);
  const auto pm = oracle::plain(s.mesh);
  const auto dense = oracle::dense_operators(pm.nodes, pm.tris);
  const auto ref = oracle::jacobi_generalized(dense.K, dense.M);
  CHECK(std::abs(ref.values[0]) <= 1e-12);
  for (int k = 0; k < 3; ++k) {
    CHECK(s.eig.eigenvalues[k] == doctest::Approx(ref.values[k + 1]).epsilon(1e-10));
  }
  // Eigenvectors may differ by sign and, for repeated eigenvalues, by a
  // rotation. The spectral projector onto the nonzero modes is basis free.
  const Eigen::MatrixXd M(s.ops.consistent_mass);
  const Eigen::MatrixXd P = s.eig.eigenvectors * s.eig.eigenvectors.transpose() * M;
  const Eigen::MatrixXd Pref = ref.vectors.rightCols(3) * ref.vectors.rightCols(3).transpose() * M;
  CHECK((P - Pref).cwiseAbs().maxCoeff() <= 1e-10);
  // Each fractional operator agrees too.
  auto gen = oracle::rng(5);
  const Vector rho = random_vector(4, gen);
  for (double frac : {0.3, 0.5, 0.75}) {
    const Vector c = solve_fractional_poisson(s.eig, s.ops.consistent_mass, rho, frac);
    const Vector cref = oracle::fractional_potential(ref, dense.M, dense.ML, rho, frac);
    CHECK((c - cref).lpNorm<Eigen::Infinity>() <= 1e-10);
  }
}

TEST_CASE("decomposition invariants on a stretched crisscross mesh") {
  const Setup s = make(6, 4, {-2, 2, -1, 0.5}, MeshPattern::Crisscross);
  const Eigen::MatrixXd K(s.ops.stiffness), M(s.ops.consistent_mass);
  const auto& V = s.eig.eigenvectors;
  CHECK(s.eig.size() == static_cast<Eigen::Index>(s.mesh.num_vertices()) - 1);
  CHECK((V.transpose() * M * V - Eigen::MatrixXd::Identity(V.cols(), V.cols())).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK((Vector::Ones(V.rows()).transpose() * M * V).cwiseAbs().maxCoeff() <= 1e-10);
  for (Eigen::Index k = 0; k < V.cols(); ++k) {
    const double lam = s.eig.eigenvalues[k];
    CHECK(lam > 0.0);
    if (k > 0) CHECK(lam >= s.eig.eigenvalues[k - 1]);
    CHECK((K * V.col(k) - lam * M * V.col(k)).norm() <= 1e-9 * lam * V.col(k).norm());
  }
}

TEST_CASE("lowest Neumann eigenvalue converges at second order") {
  double prev_err = 0.0;
  for (int n : {4, 8, 16}) {
    const Setup s = make(n, n);
    const double err = std::abs(s.eig.eigenvalues[0] - std::numbers::pi * std::numbers::pi);
    if (prev_err > 0.0) CHECK(std::log2(prev_err / err) == doctest::Approx(2.0).epsilon(0.1));
    prev_err = err;
  }
}

TEST_CASE("fractional powers") {
  const Setup s = make(7, 5, {0, 1, 0, 1}, MeshPattern::Crisscross);
  const auto& M = s.ops.consistent_mass;
  const Vector& ml = s.ops.lumped_mass;
  auto gen = oracle::rng(17);
  const ZeroMeanField u = project_zero_mean(random_vector(ml.size(), gen), ml);

  SUBCASE("s = 0 is the identity") {
    CHECK((apply_fractional_power(s.eig, M, u, 0.0).values() - u.values()).lpNorm<Eigen::Infinity>() <= 1e-10);
  }
  SUBCASE("eigenvectors are scaled") {
    for (Eigen::Index k : {0, 5, 20}) {
      const ZeroMeanField v = project_zero_mean(s.eig.eigenvectors.col(k), ml);
      const Vector out = apply_fractional_power(s.eig, M, v, 0.4).values();
      CHECK((out - std::pow(s.eig.eigenvalues[k], 0.4) * v.values()).lpNorm<Eigen::Infinity>() <= 1e-10);
    }
  }
  SUBCASE("group property") {
    const ZeroMeanField up = apply_fractional_power(s.eig, M, u, 1.0);
    const Vector back = apply_fractional_power(s.eig, M, up, -1.0).values();
    CHECK((back - u.values()).lpNorm<Eigen::Infinity>() <= 1e-9);
    const ZeroMeanField a = apply_fractional_power(s.eig, M, u, 0.3);
    const Vector ab = apply_fractional_power(s.eig, M, a, 0.45).values();
    CHECK((ab - apply_fractional_power(s.eig, M, u, 0.75).values()).lpNorm<Eigen::Infinity>() <= 1e-9);
  }
  SUBCASE("power one is the stiffness operator") {
    const Vector Ku = s.ops.stiffness * u.values();
    const Vector Mv = M * apply_fractional_power(s.eig, M, u, 1.0).values();
    CHECK((Ku - Mv).lpNorm<Eigen::Infinity>() <= 1e-10 * Ku.lpNorm<Eigen::Infinity>());
  }
  SUBCASE("powers outside [-1, 1] are rejected") {
    CHECK_THROWS_AS(apply_fractional_power(s.eig, M, u, 1.5), std::invalid_argument);
  }
}

TEST_CASE("fractional Poisson solve") {
  const Setup s = make(6, 6);
  const auto& M = s.ops.consistent_mass;
  const Vector& ml = s.ops.lumped_mass;

  CHECK(solve_fractional_poisson(s.eig, M, Vector::Constant(ml.size(), 2.5), 0.5).lpNorm<Eigen::Infinity>() <=
        1e-13);

  const Vector v1 = s.eig.eigenvectors.col(0);
  const Vector c1 = solve_fractional_poisson(s.eig, M, v1 + Vector::Constant(ml.size(), 4.0), 0.5);
  CHECK((c1 + std::pow(s.eig.eigenvalues[0], -0.5) * v1).lpNorm<Eigen::Infinity>() <= 1e-10);

  auto gen = oracle::rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const Vector rho = random_vector(ml.size(), gen);
    for (double frac : {0.3, 0.5, 0.75}) {
      const Vector c = solve_fractional_poisson(s.eig, M, rho, frac);
      CHECK(std::abs(ml.dot(c)) <= 1e-12 * c.lpNorm<Eigen::Infinity>());
      const ZeroMeanField rs = project_zero_mean(rho, ml);
      // -(-Delta)^s c = rho*
      const Vector lhs = apply_fractional_power(s.eig, M, ZeroMeanField::checked(c, ml), frac).values();
      CHECK((lhs + rs.values()).lpNorm<Eigen::Infinity>() <= 1e-9 * rs.values().lpNorm<Eigen::Infinity>());
      // Stability equality and repulsivity.
      const double hs_c = discrete_sobolev_norms(s.eig, M, ZeroMeanField::checked(c, ml), frac).hs;
      const double hms_rho = discrete_sobolev_norms(s.eig, M, rs, frac).h_minus_s;
      CHECK(std::abs(hs_c - hms_rho) <= 1e-10 * hms_rho);
      const double prod = rs.values().dot(s.ops.stiffness * c);
      CHECK(prod <= 1e-10 * rs.values().norm() * c.norm());
    }
  }
}

TEST_CASE("Sobolev norm identities and inequalities") {
  const Setup s = make(8, 6, {0, 1, 0, 1}, MeshPattern::Crisscross);
  const auto& M = s.ops.consistent_mass;
  const Vector& ml = s.ops.lumped_mass;
  const double lambda1 = s.eig.eigenvalues[0];

  const ZeroMeanField v1 = project_zero_mean(s.eig.eigenvectors.col(0), ml);
  CHECK(discrete_sobolev_norms(s.eig, M, v1, 0.6).hs == doctest::Approx(std::pow(lambda1, 0.3)).epsilon(1e-10));

  auto gen = oracle::rng(29);
  for (int trial = 0; trial < 100; ++trial) {
    const ZeroMeanField u = project_zero_mean(random_vector(ml.size(), gen), ml);
    const double l2 = l2_norm(M, u.values());
    const auto n0 = discrete_sobolev_norms(s.eig, M, u, 0.0);
    CHECK(n0.hs == doctest::Approx(l2).epsilon(1e-10));
    CHECK(n0.h_minus_s == doctest::Approx(l2).epsilon(1e-10));
    const double h1 = discrete_sobolev_norms(s.eig, M, u, 1.0).hs;
    for (double frac : {0.25, 0.5, 0.75}) {
      const auto n = discrete_sobolev_norms(s.eig, M, u, frac);
      // Poincare
      CHECK(l2 <= std::pow(lambda1, -frac / 2) * n.hs * (1 + 1e-12));
      CHECK(n.h_minus_s <= std::pow(lambda1, -frac / 2) * l2 * (1 + 1e-12));
      // Interpolation
      CHECK(n.hs <= std::pow(l2, 1 - frac) * std::pow(h1, frac) * (1 + 1e-12));
    }
  }
}

TEST_CASE("eigensolver guards") {
  const Mesh m = build_structured_rect_mesh({0, 1, 0, 1}, 4, 4);
  const FemOperators ops = FemOperators::assemble(m);
  EigenOptions opts;
  opts.max_nodes = 10;
  CHECK_THROWS_AS(compute_eigendecomposition(ops.stiffness, ops.consistent_mass, opts), std::runtime_error);
  // A stiffness matrix that is not semidefinite produces a negative eigenvalue.
  const SparseMatrix bad = -SparseMatrix(ops.stiffness);
  CHECK_THROWS_AS(compute_eigendecomposition(bad, ops.consistent_mass), std::runtime_error);
}

TEST_CASE("sign convention is deterministic") {
  const Setup a = make(5, 5);
  const Setup b = make(5, 5);
  CHECK((a.eig.eigenvectors - b.eig.eigenvectors).cwiseAbs().maxCoeff() == 0.0);
  for (Eigen::Index k = 0; k < a.eig.size(); ++k) {
    const auto col = a.eig.eigenvectors.col(k);
    Eigen::Index first = 0;
    while (std::abs(col[first]) <= 1e-8 * col.cwiseAbs().maxCoeff()) ++first;
    CHECK(col[first] > 0.0);
  }
}

TEST_CASE("eigenpair CSV dump") {
  const Setup s = make(2, 2);
  const auto dir = std::filesystem::temp_directory_path() / "fracpme_eig_csv";
  std::filesystem::remove_all(dir);
  write_eigenpairs_csv(s.eig, dir, true);
  std::ifstream in(dir / "eigenvalues.csv");
  std::string line;
  std::getline(in, line);
  CHECK(line == "k,lambda");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 8);
  CHECK(std::filesystem::exists(dir / "eigvec_000001.csv"));
}
