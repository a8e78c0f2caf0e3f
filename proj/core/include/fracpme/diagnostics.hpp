// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "fracpme/discretization.hpp"
#include "fracpme/nonlinearity.hpp"

namespace fracpme {

/// Per-step conserved and dissipated quantities. Every field is a pure
/// function of (rho, c) and the discretization, plus the Picard counters.
struct DiagnosticsRecord {
  int step = 0;
  double time = 0.0;
  double mass = 0.0;
  double linf = 0.0;
  double min_val = 0.0;
  double neg_measure = 0.0;   // integral of pi_h([rho]_-^2)
  double entropy_reg = 0.0;   // integral of pi_h(G_delta^L(rho))
  double entropy = 0.0;       // integral of pi_h(G(rho_+))
  double energy = 0.0;
  double grad_product = 0.0;  // a(c, rho*)
  double hs_norm_c = 0.0;
  int picard_iters = 0;
  double picard_residual = 0.0;
};

DiagnosticsRecord compute_record(int step, double time, const Vector& rho, const Vector& c,
                                 const Discretization& disc, const CutoffParams& cutoff, double s,
                                 int picard_iters = 0, double picard_residual = 0.0);

/// Interaction part of the free energy, -1/2 (c, rho) with the consistent mass.
double interaction_energy(const Vector& rho, const Vector& c, const SparseMatrix& consistent_mass);

/// Entropy of the clipped density plus the interaction term.
double energy(const Vector& rho, const Vector& c, const Vector& lumped_mass,
              const SparseMatrix& consistent_mass);

struct TimeSample {
  double time = 0.0;
  double value = 0.0;
};

struct DecayFit {
  double rate = 0.0;  // value ~ exp(-rate * t)
  std::size_t first_index = 0;  // start of the fitted tail window
  std::size_t points = 0;
};

/// Least-squares slope of log(value) against time over the second half of
/// the series. Needs at least five strictly positive values.
DecayFit decay_rate_fit(std::span<const TimeSample> series);

/// k_{s,d} = d Gamma(d/2) / ((d + 2s) 4^s Gamma(2 - s) Gamma(d/2 + 1 - s)).
double barenblatt_constant(double s, int d);
/// k_{s,d} (1 - |y|^2)_+^s.
double barenblatt_profile(const Point& y, double s, int d = 2);
/// Integral of the profile over R^d.
double barenblatt_mass(double s, int d = 2);
/// 1 / (d + 2 - 2s).
double self_similar_exponent(double s, int d = 2);

enum class ProfileNorm { L1, L2 };

/// Distance between rho and the interpolated profile after normalizing both
/// to unit mass. Throws std::invalid_argument when rho has no mass.
double profile_distance(const Vector& rho, double s, int d, const Discretization& disc,
                        ProfileNorm norm);

}  // namespace fracpme
