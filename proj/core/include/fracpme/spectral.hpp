// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <filesystem>

#include <Eigen/Core>

#include "fracpme/fem.hpp"

namespace fracpme {

using DenseMatrix = Eigen::MatrixXd;

/// A nodal vector whose lumped-mass mean vanishes.
class ZeroMeanField {
 public:
  /// Wraps values that are already mean-zero; throws std::invalid_argument
  /// when |mean| exceeds tol * max(1, ||values||_inf).
  static ZeroMeanField checked(Vector values, const Vector& lumped_mass, double tol = 1e-10);

  const Vector& values() const { return values_; }

 private:
  friend ZeroMeanField project_zero_mean(const Vector&, const Vector&);
  explicit ZeroMeanField(Vector values) : values_(std::move(values)) {}
  Vector values_;
};

/// rho* = rho - mean(rho), the mean taken with the lumped (= exact P1) integral.
ZeroMeanField project_zero_mean(const Vector& values, const Vector& lumped_mass);
ZeroMeanField project_zero_mean(const NodalField& field, const Vector& lumped_mass);

/// Positive generalized eigenpairs K v = lambda M v of the discrete Neumann
/// Laplacian. Eigenvectors are M-orthonormal, mean-zero, ordered by
/// increasing eigenvalue, and signed so their first significant entry is
/// positive.
struct SpectralDecomposition {
  Vector eigenvalues;      // N_h - 1 entries
  DenseMatrix eigenvectors;  // N_h x (N_h - 1)
  Vector lumped_mass;      // used for the zero-mean projections

  Eigen::Index size() const { return eigenvalues.size(); }
  Eigen::Index num_nodes() const { return eigenvectors.rows(); }

  /// Eigen-coefficients (u, v_k)_M.
  Vector coefficients(const SparseMatrix& consistent_mass, const Vector& u) const;
  /// Sum_k coeffs_k v_k followed by a zero-mean projection.
  Vector synthesize(const Vector& coeffs) const;
};

struct EigenOptions {
  std::size_t max_nodes = 20000;
  double negative_tolerance = 1e-10;
};

/// Dense generalized symmetric eigensolve (LAPACK dsygvd) with the constant
/// mode discarded. Throws std::runtime_error on solver failure, on a node
/// count above the guard, or on an eigenvalue below -negative_tolerance.
SpectralDecomposition compute_eigendecomposition(const SparseMatrix& stiffness,
                                                 const SparseMatrix& consistent_mass,
                                                 const EigenOptions& options = {});

/// sum_k lambda_k^s (u, v_k)_M v_k for s in [-1, 1].
ZeroMeanField apply_fractional_power(const SpectralDecomposition& decomp,
                                     const SparseMatrix& consistent_mass, const ZeroMeanField& u,
                                     double s);

/// The potential c with -(-Delta_h)^s c = rho*, s in (0, 1).
Vector solve_fractional_poisson(const SpectralDecomposition& decomp,
                                const SparseMatrix& consistent_mass, const Vector& rho, double s);

struct SobolevNorms {
  double hs = 0.0;        // (sum lambda_k^s u_k^2)^{1/2}
  double h_minus_s = 0.0; // (sum lambda_k^{-s} u_k^2)^{1/2}
};

SobolevNorms discrete_sobolev_norms(const SpectralDecomposition& decomp,
                                    const SparseMatrix& consistent_mass, const ZeroMeanField& u,
                                    double s);

/// eigenvalues.csv (k,lambda) and, when with_vectors is set, one
/// eigvec_{k:06}.csv (node,value) per eigenvector.
void write_eigenpairs_csv(const SpectralDecomposition& decomp, const std::filesystem::path& dir,
                          bool with_vectors = false);

}  // namespace fracpme
