// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <doctest.h>

#include "fracpme/diagnostics.hpp"
#include "fracpme/discretization.hpp"
#include "oracles.hpp"

using namespace fracpme;

namespace {

/// k_{s,d} from its closed form with the test-side gamma function.
double k_oracle(double s, int d) {
  const double hd = 0.5 * d;
  return d * oracle::gamma_stirling(hd) /
         ((d + 2 * s) * std::pow(4.0, s) * oracle::gamma_stirling(2 - s) * oracle::gamma_stirling(hd + 1 - s));
}

/// Mass of k (1-r^2)_+^s in the plane by the midpoint rule in r.
double planar_mass_oracle(double s) {
  const int n = 200000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double r = (i + 0.5) / n;
    sum += std::pow(1 - r * r, s) * 2 * std::numbers::pi * r / n;
  }
  return k_oracle(s, 2) * sum;
}

}  // namespace

TEST_CASE("decay fit recovers an exact exponential") {
  std::vector<TimeSample> series;
  for (int i = 0; i <= 40; ++i) series.push_back({0.05 * i, 2.5 * std::exp(-3.0 * 0.05 * i)});
  const DecayFit fit = decay_rate_fit(series);
  CHECK(fit.rate == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(fit.first_index == 20u);
  CHECK(fit.points == 21u);

  // Only the tail counts: a different early rate does not leak in.
  for (int i = 0; i < 20; ++i) series[static_cast<std::size_t>(i)].value *= std::exp(-0.5 * (20 - i));
  CHECK(decay_rate_fit(series).rate == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("decay fit input checks") {
  std::vector<TimeSample> few{{0, 1}, {1, 0.5}, {2, 0.25}, {3, 0.125}};
  CHECK_THROWS_AS(decay_rate_fit(few), std::invalid_argument);
  std::vector<TimeSample> zero;
  for (int i = 0; i < 10; ++i) zero.push_back({double(i), i == 8 ? 0.0 : 1.0});
  CHECK_THROWS_AS(decay_rate_fit(zero), std::invalid_argument);
}

TEST_CASE("self-similar profile constants") {
  CHECK(barenblatt_constant(0.5, 2) == doctest::Approx(4.0 / (3.0 * std::numbers::pi)).epsilon(1e-14));
  CHECK(barenblatt_mass(0.5, 2) == doctest::Approx(8.0 / 9.0).epsilon(1e-14));
  CHECK(self_similar_exponent(0.5) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(self_similar_exponent(0.25, 3) == doctest::Approx(1.0 / 4.5).epsilon(1e-15));
  for (double s : {0.1, 0.3, 0.5, 0.75, 0.9}) {
    for (int d : {2, 3}) CHECK(barenblatt_constant(s, d) == doctest::Approx(k_oracle(s, d)).epsilon(1e-12));
    CHECK(barenblatt_mass(s, 2) == doctest::Approx(planar_mass_oracle(s)).epsilon(1e-6));
  }
  CHECK_THROWS_AS(barenblatt_constant(1.0, 2), std::invalid_argument);
  CHECK_THROWS_AS(barenblatt_constant(0.5, 1), std::invalid_argument);

  CHECK(barenblatt_profile({0, 0}, 0.5) == doctest::Approx(4.0 / (3.0 * std::numbers::pi)));
  CHECK(barenblatt_profile({0.6, 0.8}, 0.5) == 0.0);
  CHECK(barenblatt_profile({2, 0}, 0.5) == 0.0);
  CHECK(barenblatt_profile({0.6, 0}, 0.5) == doctest::Approx(4.0 / (3.0 * std::numbers::pi) * 0.8).epsilon(1e-14));
}

TEST_CASE("profile distance") {
  auto disc = Discretization::build(build_structured_rect_mesh({-2, 2, -2, 2}, 24, 24));
  const Vector phi = interpolate([](const Point& y) { return barenblatt_profile(y, 0.5); }, disc->mesh).values();
  // Invariant under scaling: both sides are normalized to unit mass.
  CHECK(profile_distance(3.0 * phi, 0.5, 2, *disc, ProfileNorm::L1) <= 1e-14);
  CHECK(profile_distance(phi, 0.5, 2, *disc, ProfileNorm::L2) <= 1e-14);
  // A uniform density on the square vs the profile: the L1 distance of two
  // unit-mass densities lies in (0, 2].
  const Vector flat = Vector::Ones(disc->num_nodes());
  const double d1 = profile_distance(flat, 0.5, 2, *disc, ProfileNorm::L1);
  CHECK(d1 > 0.5);
  CHECK(d1 <= 2.0);
  CHECK_THROWS_AS(profile_distance(Vector::Zero(disc->num_nodes()), 0.5, 2, *disc, ProfileNorm::L1),
                  std::invalid_argument);
}

TEST_CASE("diagnostics record fields") {
  auto disc = Discretization::build(build_structured_rect_mesh({0, 1, 0, 1}, 10, 10, MeshPattern::Crisscross));
  const Vector& ml = disc->fem.lumped_mass;
  const CutoffParams cut(1e-2, 10);
  const double s = 0.5;
  const Vector rho = interpolate([](const Point& p) { return std::cos(3 * p.x()) + 0.4 * p.y(); }, disc->mesh).values();
  const Vector c = solve_fractional_poisson(disc->spectral, disc->fem.consistent_mass, rho, s);
  const DiagnosticsRecord r = compute_record(7, 0.35, rho, c, *disc, cut, s, 4, 1e-11);
  CHECK(r.step == 7);
  CHECK(r.time == 0.35);
  CHECK(r.picard_iters == 4);
  CHECK(r.picard_residual == 1e-11);
  CHECK(r.mass == doctest::Approx(ml.dot(rho)).epsilon(1e-14));
  CHECK(r.linf == rho.cwiseAbs().maxCoeff());
  CHECK(r.min_val == rho.minCoeff());
  REQUIRE(r.min_val < 0.0);

  double neg = 0.0, ent = 0.0, ent_reg = 0.0;
  for (Eigen::Index i = 0; i < rho.size(); ++i) {
    const double v = rho[i];
    neg += ml[i] * (v < 0 ? v * v : 0.0);
    const double vp = std::max(v, 0.0);
    ent += ml[i] * (vp > 0 ? vp * (std::log(vp) - 1) + 1 : 1.0);
    ent_reg += ml[i] * g_reg(v, cut, 0);
  }
  CHECK(r.neg_measure == doctest::Approx(neg).epsilon(1e-13));
  CHECK(r.entropy == doctest::Approx(ent).epsilon(1e-13));
  CHECK(r.entropy_reg == doctest::Approx(ent_reg).epsilon(1e-13));
  CHECK(r.grad_product <= 0.0);
  CHECK(r.energy == doctest::Approx(r.entropy + interaction_energy(rho, c, disc->fem.consistent_mass)));
}

TEST_CASE("interaction energy in spectral form") {
  // -1/2 (c, rho) = 1/2 sum lambda_k^{-s} rho_k^2 = 1/2 sum lambda_k^{s} c_k^2,
  // since c_k = -lambda_k^{-s} rho_k for every nonconstant mode.
  auto disc = Discretization::build(build_structured_rect_mesh({0, 1, 0, 1}, 9, 9));
  const auto& M = disc->fem.consistent_mass;
  auto gen = oracle::rng(61);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    Vector rho(disc->num_nodes());
    for (auto& v : rho) v = u(gen);
    for (double s : {0.25, 0.5, 0.8}) {
      const Vector c = solve_fractional_poisson(disc->spectral, M, rho, s);
      const Vector rk = disc->spectral.coefficients(M, rho);
      const Vector ck = disc->spectral.coefficients(M, c);
      const Vector& lam = disc->spectral.eigenvalues;
      const double via_rho = 0.5 * (lam.array().pow(-s) * rk.array().square()).sum();
      const double via_c = 0.5 * (lam.array().pow(s) * ck.array().square()).sum();
      const double direct = interaction_energy(rho, c, M);
      CHECK(direct > 0.0);
      CHECK(direct == doctest::Approx(via_rho).epsilon(1e-11));
      CHECK(direct == doctest::Approx(via_c).epsilon(1e-11));
      const double hs = discrete_sobolev_norms(disc->spectral, M, project_zero_mean(c, disc->fem.lumped_mass), s).hs;
      CHECK(direct == doctest::Approx(0.5 * hs * hs).epsilon(1e-11));
    }
  }
}
