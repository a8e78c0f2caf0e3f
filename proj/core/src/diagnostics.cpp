// SPDX-License-Identifier: Apache-2.0
#include "fracpme/diagnostics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace fracpme {

double interaction_energy(const Vector& rho, const Vector& c, const SparseMatrix& consistent_mass) {
  return -0.5 * rho.dot(consistent_mass * c);
}

double energy(const Vector& rho, const Vector& c, const Vector& lumped_mass,
              const SparseMatrix& consistent_mass) {
  const double entropy =
      integrate_pi_h([](double v) { return g_entropy(std::max(v, 0.0)); }, rho, lumped_mass);
  return entropy + interaction_energy(rho, c, consistent_mass);
}

DiagnosticsRecord compute_record(int step, double time, const Vector& rho, const Vector& c,
                                 const Discretization& disc, const CutoffParams& cutoff, double s,
                                 int picard_iters, double picard_residual) {
  const Vector& ml = disc.fem.lumped_mass;
  DiagnosticsRecord r;
  r.step = step;
  r.time = time;
  r.mass = integrate(rho, ml);
  r.linf = rho.lpNorm<Eigen::Infinity>();
  r.min_val = rho.minCoeff();
  r.neg_measure = integrate_pi_h(
      [](double v) {
        const double neg = std::min(v, 0.0);
        return neg * neg;
      },
      rho, ml);
  r.entropy_reg = integrate_pi_h([&](double v) { return g_reg(v, cutoff, 0); }, rho, ml);
  r.entropy = integrate_pi_h([](double v) { return g_entropy(std::max(v, 0.0)); }, rho, ml);
  r.energy = r.entropy + interaction_energy(rho, c, disc.fem.consistent_mass);
  r.grad_product = c.dot(disc.fem.stiffness * rho);
  r.hs_norm_c = discrete_sobolev_norms(disc.spectral, disc.fem.consistent_mass,
                                       project_zero_mean(c, ml), s)
                    .hs;
  r.picard_iters = picard_iters;
  r.picard_residual = picard_residual;
  return r;
}

DecayFit decay_rate_fit(std::span<const TimeSample> series) {
  if (series.size() < 5) {
    throw std::invalid_argument("decay fit needs at least 5 samples");
  }
  for (const auto& sample : series) {
    if (!(sample.value > 0.0)) {
      throw std::invalid_argument("decay fit needs strictly positive values (t=" +
                                  std::to_string(sample.time) + ")");
    }
  }
  DecayFit fit;
  fit.first_index = series.size() / 2;
  const auto tail = series.subspan(fit.first_index);
  fit.points = tail.size();
  double tm = 0.0, ym = 0.0;
  for (const auto& sample : tail) {
    tm += sample.time;
    ym += std::log(sample.value);
  }
  tm /= static_cast<double>(tail.size());
  ym /= static_cast<double>(tail.size());
  double sxy = 0.0, sxx = 0.0;
  for (const auto& sample : tail) {
    sxy += (sample.time - tm) * (std::log(sample.value) - ym);
    sxx += (sample.time - tm) * (sample.time - tm);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("decay fit needs distinct sample times");
  fit.rate = -sxy / sxx;
  return fit;
}

double barenblatt_constant(double s, int d) {
  if (!(s > 0.0 && s < 1.0) || (d != 2 && d != 3)) {
    throw std::invalid_argument("profile needs s in (0,1) and d in {2,3}");
  }
  const double half_d = 0.5 * d;
  return d * std::tgamma(half_d) /
         ((d + 2.0 * s) * std::pow(4.0, s) * std::tgamma(2.0 - s) * std::tgamma(half_d + 1.0 - s));
}

double barenblatt_profile(const Point& y, double s, int d) {
  const double k = barenblatt_constant(s, d);
  const double r2 = y.squaredNorm();
  return r2 >= 1.0 ? 0.0 : k * std::pow(1.0 - r2, s);
}

double barenblatt_mass(double s, int d) {
  // Integral of (1 - |y|^2)^s over the unit ball.
  const double half_d = 0.5 * d;
  const double ball = std::pow(std::numbers::pi, half_d) * std::tgamma(s + 1.0) /
                      std::tgamma(s + 1.0 + half_d);
  return barenblatt_constant(s, d) * ball;
}

double self_similar_exponent(double s, int d) { return 1.0 / (d + 2.0 - 2.0 * s); }

double profile_distance(const Vector& rho, double s, int d, const Discretization& disc,
                        ProfileNorm norm) {
  const Vector& ml = disc.fem.lumped_mass;
  const double mass = integrate(rho, ml);
  if (!(std::abs(mass) > 0.0)) throw std::invalid_argument("profile distance of a massless field");
  const NodalField phi = interpolate([&](const Point& y) { return barenblatt_profile(y, s, d); },
                                     disc.mesh);
  const double phi_mass = integrate(phi.values(), ml);
  const Vector diff = rho / mass - phi.values() / phi_mass;
  if (norm == ProfileNorm::L1) return ml.dot(diff.cwiseAbs());
  return l2_norm(disc.fem.consistent_mass, diff);
}

}  // namespace fracpme
