// SPDX-License-Identifier: Apache-2.0
#include "fracpme/spectral.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <stdexcept>
#include <string>

#include <lapacke.h>

namespace fracpme {

ZeroMeanField ZeroMeanField::checked(Vector values, const Vector& lumped_mass, double tol) {
  const double area = lumped_mass.sum();
  const double mean = lumped_mass.dot(values) / area;
  const double scale = std::max(1.0, values.lpNorm<Eigen::Infinity>());
  if (std::abs(mean) > tol * scale) {
    throw std::invalid_argument("field is not mean-zero (mean " + std::to_string(mean) + ")");
  }
  return ZeroMeanField(std::move(values));
}

ZeroMeanField project_zero_mean(const Vector& values, const Vector& lumped_mass) {
  const double mean = lumped_mass.dot(values) / lumped_mass.sum();
  return ZeroMeanField(values.array() - mean);
}

ZeroMeanField project_zero_mean(const NodalField& field, const Vector& lumped_mass) {
  return project_zero_mean(field.values(), lumped_mass);
}

Vector SpectralDecomposition::coefficients(const SparseMatrix& consistent_mass,
                                           const Vector& u) const {
  const Vector mu = consistent_mass * u;
  return eigenvectors.transpose() * mu;
}

Vector SpectralDecomposition::synthesize(const Vector& coeffs) const {
  const Vector out = eigenvectors * coeffs;
  return project_zero_mean(out, lumped_mass).values();
}

SpectralDecomposition compute_eigendecomposition(const SparseMatrix& stiffness,
                                                 const SparseMatrix& consistent_mass,
                                                 const EigenOptions& options) {
  const Eigen::Index n = stiffness.rows();
  if (stiffness.cols() != n || consistent_mass.rows() != n || consistent_mass.cols() != n) {
    throw std::invalid_argument("stiffness and mass dimensions disagree");
  }
  if (n < 2) throw std::invalid_argument("eigendecomposition needs at least two nodes");
  if (static_cast<std::size_t>(n) > options.max_nodes) {
    throw std::runtime_error("mesh has " + std::to_string(n) + " nodes, above the dense guard of " +
                             std::to_string(options.max_nodes));
  }

  DenseMatrix a = DenseMatrix(stiffness);
  DenseMatrix b = DenseMatrix(consistent_mass);
  Vector w(n);
  const lapack_int info =
      LAPACKE_dsygvd(LAPACK_COL_MAJOR, 1, 'V', 'U', static_cast<lapack_int>(n), a.data(),
                     static_cast<lapack_int>(n), b.data(), static_cast<lapack_int>(n), w.data());
  if (info != 0) {
    throw std::runtime_error("generalized eigensolver failed (dsygvd info " +
                             std::to_string(info) + ")");
  }
  b.resize(0, 0);

  // dsygvd returns ascending eigenvalues; the constant mode is the first.
  Eigen::Index zero = 0;
  for (Eigen::Index k = 1; k < n; ++k) {
    if (std::abs(w[k]) < std::abs(w[zero])) zero = k;
  }

  SpectralDecomposition d;
  d.lumped_mass = Vector(consistent_mass * Vector::Ones(n));
  d.eigenvalues.resize(n - 1);
  d.eigenvectors.resize(n, n - 1);
  const double area = d.lumped_mass.sum();
  for (Eigen::Index k = 0, col = 0; k < n; ++k) {
    if (k == zero) continue;
    if (w[k] < -options.negative_tolerance) {
      throw std::runtime_error("negative generalized eigenvalue " + std::to_string(w[k]));
    }
    if (!(w[k] > 0.0)) {
      throw std::runtime_error("second zero eigenvalue: mesh is not connected");
    }
    auto v = d.eigenvectors.col(col);
    v = a.col(k);
    // Deflate any roundoff component along the constant mode.
    v.array() -= d.lumped_mass.dot(v) / area;
    const double vmax = v.lpNorm<Eigen::Infinity>();
    for (Eigen::Index i = 0; i < n; ++i) {
      if (std::abs(v[i]) > 1e-8 * vmax) {
        if (v[i] < 0.0) v = -v;
        break;
      }
    }
    d.eigenvalues[col] = w[k];
    ++col;
  }
  return d;
}

ZeroMeanField apply_fractional_power(const SpectralDecomposition& decomp,
                                     const SparseMatrix& consistent_mass, const ZeroMeanField& u,
                                     double s) {
  if (!(s >= -1.0 && s <= 1.0)) {
    throw std::invalid_argument("fractional power must lie in [-1, 1]");
  }
  Vector coeffs = decomp.coefficients(consistent_mass, u.values());
  coeffs.array() *= decomp.eigenvalues.array().pow(s);
  return ZeroMeanField::checked(decomp.synthesize(coeffs), decomp.lumped_mass, 1e-12);
}

Vector solve_fractional_poisson(const SpectralDecomposition& decomp,
                                const SparseMatrix& consistent_mass, const Vector& rho, double s) {
  if (!(s > 0.0 && s < 1.0)) {
    throw std::invalid_argument("fractional order must lie in (0, 1)");
  }
  const ZeroMeanField rho_star = project_zero_mean(rho, decomp.lumped_mass);
  return -apply_fractional_power(decomp, consistent_mass, rho_star, -s).values();
}

SobolevNorms discrete_sobolev_norms(const SpectralDecomposition& decomp,
                                    const SparseMatrix& consistent_mass, const ZeroMeanField& u,
                                    double s) {
  const Vector coeffs = decomp.coefficients(consistent_mass, u.values());
  const Eigen::ArrayXd sq = coeffs.array().square();
  SobolevNorms norms;
  norms.hs = std::sqrt((decomp.eigenvalues.array().pow(s) * sq).sum());
  norms.h_minus_s = std::sqrt((decomp.eigenvalues.array().pow(-s) * sq).sum());
  return norms;
}

void write_eigenpairs_csv(const SpectralDecomposition& decomp, const std::filesystem::path& dir,
                          bool with_vectors) {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / "eigenvalues.csv");
  if (!out) throw std::runtime_error("cannot open " + (dir / "eigenvalues.csv").string());
  out << "k,lambda\n" << std::setprecision(17);
  for (Eigen::Index k = 0; k < decomp.size(); ++k) {
    out << k + 1 << ',' << decomp.eigenvalues[k] << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + (dir / "eigenvalues.csv").string());
  if (!with_vectors) return;
  for (Eigen::Index k = 0; k < decomp.size(); ++k) {
    char name[32];
    std::snprintf(name, sizeof(name), "eigvec_%06ld.csv", static_cast<long>(k + 1));
    std::ofstream vout(dir / name);
    if (!vout) throw std::runtime_error("cannot open " + (dir / name).string());
    vout << "node,value\n" << std::setprecision(17);
    for (Eigen::Index i = 0; i < decomp.num_nodes(); ++i) {
      vout << i << ',' << decomp.eigenvectors(i, k) << '\n';
    }
  }
}

}  // namespace fracpme
