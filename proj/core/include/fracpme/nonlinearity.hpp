// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>

#include <Eigen/Core>

namespace fracpme {

/// Lower and upper cutoffs, 0 < delta < 1 < cap.
class CutoffParams {
 public:
  CutoffParams(double delta, double cap);

  double delta() const { return delta_; }
  double cap() const { return cap_; }

 private:
  double delta_;
  double cap_;
};

/// clamp(s, delta, cap).
double beta(double s, const CutoffParams& p);

/// Regularized entropy (order 0) and its first two derivatives: the entropy
/// s(log s - 1) + 1 on (delta, cap) continued by quadratics so that
/// beta(s) * g_reg''(s) = 1 everywhere.
double g_reg(double s, const CutoffParams& p, int order = 0);

/// s(log s - 1) + 1 with G(0) = 1. Throws std::domain_error for s < 0.
double g_entropy(double s);

/// Diagonal of the difference-quotient matrix: entry j-1 is
/// (phi_j - phi_0) / (g'(phi_j) - g'(phi_0)), or beta(phi_j) when the two
/// values coincide to relative precision 1e-14.
Eigen::Vector2d theta_tilde(const std::array<double, 3>& vertex_values, const CutoffParams& p);

/// (B^T)^{-1} diag(theta_tilde) B^T for the element map B. On each element
/// it satisfies theta * grad(pi_h g'(phi)) = grad(phi) exactly.
Eigen::Matrix2d theta_matrix(const std::array<double, 3>& vertex_values, const Eigen::Matrix2d& B,
                             const CutoffParams& p);

}  // namespace fracpme
