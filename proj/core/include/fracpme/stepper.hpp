// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/SparseCholesky>

#include "fracpme/diagnostics.hpp"
#include "fracpme/discretization.hpp"
#include "fracpme/nonlinearity.hpp"

namespace fracpme {

enum class Mode { Standard, SelfSimilar };

const char* to_string(Mode mode);

struct SolverConfig {
  double s = 0.5;
  double dt = 1e-2;
  double T = 1.0;
  CutoffParams cutoff{1e-3, 10.0};
  double epsilon = 1.0;
  Mode mode = Mode::Standard;
  std::optional<double> lambda_drift;  // self-similar only; defaults to 1/(d+2-2s)
  double picard_tol = 1e-10;
  int picard_max = 100;
  int snapshot_every = 0;  // 0 keeps only the first and last states

  /// Throws std::invalid_argument on an inconsistent configuration.
  void validate() const;
  /// Number of implicit Euler steps, ceil(T/dt) up to round-off.
  int num_steps() const;
  /// Drift coefficient actually used (0 in standard mode).
  double drift() const;
};

/// Raised when a time step cannot be completed. Carries where and how badly.
class SolverFailure : public std::runtime_error {
 public:
  SolverFailure(const std::string& what, int step, double residual)
      : std::runtime_error(what), step_(step), residual_(residual) {}
  int step() const { return step_; }
  double residual() const { return residual_; }

 private:
  int step_;
  double residual_;
};

/// Solves (M_L + dt K) rho_h = M_L rho0. rho0 must be nodally nonnegative;
/// a result below -1e-12 * max(1, ||rho0||_inf) is reported as an error.
Vector smooth_initial_datum(const Vector& rho0, double dt, const SparseMatrix& stiffness,
                            const Vector& lumped_mass);

/// b_i = sum_K |K| (Theta_K grad c) . grad phi_i.
Vector assemble_transport_rhs(const Vector& rho_iter, const Vector& c, const CutoffParams& cutoff,
                              const Mesh& mesh, const std::vector<ElementGeometry>& elements);

/// d_i = -lambda sum_K |K| (y_bar rho_bar) . grad phi_i (one-point barycenter rule).
Vector assemble_drift_rhs(const Vector& rho, double lambda, const std::vector<ElementGeometry>& elements,
                          const Mesh& mesh);

struct StepResult {
  Vector rho;
  Vector c;
  int iters = 0;
  double residual = 0.0;
};

/// One implicit Euler stage solved by Picard iteration with Theta and c
/// lagged by one sweep. The stage matrix M_L/dt + eps K is factorized once.
class Stepper {
 public:
  Stepper(std::shared_ptr<const Discretization> disc, const SolverConfig& cfg);

  /// Throws SolverFailure (step index 0) when picard_max sweeps do not
  /// reach the tolerance.
  StepResult step(const Vector& rho_prev) const;

  /// c(rho) = -(-Delta_h)^{-s} rho*.
  Vector potential(const Vector& rho) const;

  /// Right-hand side of one sweep for the iterate rho_iter with potential c.
  Vector sweep_rhs(const Vector& rho_prev, const Vector& rho_iter, const Vector& c) const;

  const SparseMatrix& stage_matrix() const { return stage_; }
  const SolverConfig& config() const { return cfg_; }

 private:
  Vector solve(const Vector& rhs) const;

  std::shared_ptr<const Discretization> disc_;
  SolverConfig cfg_;
  double drift_;
  SparseMatrix stage_;
  std::unique_ptr<Eigen::SimplicialLDLT<SparseMatrix>> factor_;
};

struct Snapshot {
  int step = 0;
  double time = 0.0;
  Vector rho;
  Vector c;
};

struct RunResult {
  std::vector<DiagnosticsRecord> records;  // one per step, step 0 included
  std::vector<Snapshot> snapshots;
  CutoffParams cutoff{1e-3, 10.0};  // effective cutoffs after the L adjustment
  Vector rho_initial;               // smoothed initial datum
};

/// Called once per accepted step with the new state and its record.
using StepObserver = std::function<void(const Snapshot&, const DiagnosticsRecord&)>;

/// True for the steps whose state is kept: the first, the last, and every
/// snapshot_every-th in between.
bool is_snapshot_step(const SolverConfig& cfg, int step);

/// L is raised to max(L, 2 ||rho0||_inf) before anything else happens.
SolverConfig effective_config(const SolverConfig& cfg, const Vector& rho0);

/// Smooths rho0, then performs num_steps() steps. Any failure is rethrown as
/// SolverFailure carrying the step index.
RunResult run(const SolverConfig& cfg, const NodalField& rho0,
              std::shared_ptr<const Discretization> disc, const StepObserver& observer = {});

}  // namespace fracpme
