// SPDX-License-Identifier: Apache-2.0
#include "fracpme/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace fracpme {

CutoffParams::CutoffParams(double delta, double cap) : delta_(delta), cap_(cap) {
  if (!(delta > 0.0 && delta < 1.0 && cap > 1.0 && std::isfinite(cap))) {
    throw std::invalid_argument("cutoffs must satisfy 0 < delta < 1 < L (got delta=" +
                                std::to_string(delta) + ", L=" + std::to_string(cap) + ")");
  }
}

double beta(double s, const CutoffParams& p) { return std::clamp(s, p.delta(), p.cap()); }

double g_reg(double s, const CutoffParams& p, int order) {
  const double d = p.delta();
  const double L = p.cap();
  switch (order) {
    case 0:
      if (s <= d) return (s * s - d * d) / (2.0 * d) + (std::log(d) - 1.0) * s + 1.0;
      if (s >= L) return (s * s - L * L) / (2.0 * L) + (std::log(L) - 1.0) * s + 1.0;
      return s * (std::log(s) - 1.0) + 1.0;
    case 1:
      if (s <= d) return s / d + std::log(d) - 1.0;
      if (s >= L) return s / L + std::log(L) - 1.0;
      return std::log(s);
    case 2:
      return 1.0 / beta(s, p);
    default:
      throw std::invalid_argument("g_reg order must be 0, 1 or 2");
  }
}

double g_entropy(double s) {
  if (s < 0.0) throw std::domain_error("entropy of a negative density");
  if (s == 0.0) return 1.0;
  return s * (std::log(s) - 1.0) + 1.0;
}

namespace {

// g_reg'(hi) - g_reg'(lo) for lo < hi, summed branch by branch so that no
// two large values of g_reg' are ever subtracted. Each piece is positive.
double derivative_increment(double lo, double hi, const CutoffParams& p) {
  const double d = p.delta();
  const double cap = p.cap();
  double inc = 0.0;
  if (lo < d) inc += (std::min(hi, d) - lo) / d;
  const double a = std::max(lo, d);
  const double b = std::min(hi, cap);
  if (a < b) inc += std::log1p((b - a) / a);
  if (hi > cap) inc += (hi - std::max(lo, cap)) / cap;
  return inc;
}

}  // namespace

Eigen::Vector2d theta_tilde(const std::array<double, 3>& vertex_values, const CutoffParams& p) {
  const double v0 = vertex_values[0];
  Eigen::Vector2d diag;
  for (int j = 1; j <= 2; ++j) {
    const double vj = vertex_values[j];
    const double scale = std::max({std::abs(vj), std::abs(v0), 1.0});
    if (std::abs(vj - v0) <= 1e-14 * scale) {
      diag[j - 1] = beta(vj, p);
    } else {
      const double lo = std::min(vj, v0);
      const double hi = std::max(vj, v0);
      diag[j - 1] = (hi - lo) / derivative_increment(lo, hi, p);
    }
  }
  return diag;
}

Eigen::Matrix2d theta_matrix(const std::array<double, 3>& vertex_values, const Eigen::Matrix2d& B,
                             const CutoffParams& p) {
  const Eigen::Vector2d diag = theta_tilde(vertex_values, p);
  const Eigen::Matrix2d bt = B.transpose();
  return bt.inverse() * diag.asDiagonal() * bt;
}

}  // namespace fracpme
