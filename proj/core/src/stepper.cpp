// SPDX-License-Identifier: Apache-2.0
#include "fracpme/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fracpme {

namespace {

constexpr int kDimension = 2;

Eigen::SimplicialLDLT<SparseMatrix>& factorize(Eigen::SimplicialLDLT<SparseMatrix>& solver,
                                               const SparseMatrix& matrix, const char* what) {
  solver.compute(matrix);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error(std::string("sparse factorization failed for the ") + what);
  }
  return solver;
}

// Direct solve followed by up to two rounds of iterative refinement so the
// relative residual lands near 1e-13.
Vector refined_solve(const Eigen::SimplicialLDLT<SparseMatrix>& solver, const SparseMatrix& matrix,
                     const Vector& rhs) {
  Vector x = solver.solve(rhs);
  const double scale = std::max(rhs.lpNorm<Eigen::Infinity>(), 1e-300);
  for (int round = 0; round < 2; ++round) {
    const Vector r = rhs - matrix * x;
    if (r.lpNorm<Eigen::Infinity>() <= 1e-13 * scale) break;
    x += solver.solve(r);
  }
  if (!x.allFinite()) throw std::runtime_error("linear solve produced non-finite values");
  return x;
}

}  // namespace

const char* to_string(Mode mode) {
  return mode == Mode::Standard ? "standard" : "selfsimilar";
}

void SolverConfig::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument(msg); };
  if (!(s > 0.0 && s < 1.0)) fail("s must lie in (0,1)");
  if (!(dt > 0.0) || !std::isfinite(dt)) fail("dt must be positive");
  if (!(T >= dt) || !std::isfinite(T)) fail("T must be finite and at least dt");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) fail("epsilon must be positive");
  if (mode == Mode::Standard && lambda_drift && *lambda_drift != 0.0) {
    fail("lambda is only meaningful in self-similar mode");
  }
  if (lambda_drift && !std::isfinite(*lambda_drift)) fail("lambda must be finite");
  if (!(picard_tol > 0.0)) fail("picard_tol must be positive");
  if (picard_max < 1) fail("picard_max must be at least 1");
  if (snapshot_every < 0) fail("snapshot_every must be nonnegative");
}

int SolverConfig::num_steps() const {
  return static_cast<int>(std::ceil(T / dt - 1e-9));
}

double SolverConfig::drift() const {
  if (mode == Mode::Standard) return 0.0;
  return lambda_drift.value_or(self_similar_exponent(s, kDimension));
}

Vector smooth_initial_datum(const Vector& rho0, double dt, const SparseMatrix& stiffness,
                            const Vector& lumped_mass) {
  if (rho0.size() != lumped_mass.size() || stiffness.rows() != rho0.size()) {
    throw std::invalid_argument("initial datum does not match the operators");
  }
  if (!rho0.allFinite() || rho0.minCoeff() < 0.0) {
    throw std::invalid_argument("initial datum must be finite and nodally nonnegative");
  }
  if (!(dt > 0.0)) throw std::invalid_argument("smoothing needs dt > 0");
  SparseMatrix system = stiffness * dt;
  for (Eigen::Index i = 0; i < system.rows(); ++i) system.coeffRef(i, i) += lumped_mass[i];
  Eigen::SimplicialLDLT<SparseMatrix> solver;
  factorize(solver, system, "smoothing system");
  Vector out = refined_solve(solver, system, lumped_mass.cwiseProduct(rho0));
  const double sup = rho0.lpNorm<Eigen::Infinity>();
  if (out.minCoeff() < -1e-12 * std::max(1.0, sup)) {
    std::ostringstream msg;
    msg << "smoothed initial datum is negative (min " << out.minCoeff()
        << "); the mesh is probably not weakly acute";
    throw std::runtime_error(msg.str());
  }
  return out;
}

Vector assemble_transport_rhs(const Vector& rho_iter, const Vector& c, const CutoffParams& cutoff,
                              const Mesh& mesh, const std::vector<ElementGeometry>& elements) {
  Vector b = Vector::Zero(rho_iter.size());
  const auto& tris = mesh.triangles();
  for (std::size_t e = 0; e < tris.size(); ++e) {
    const auto& ids = tris[e].vertex_ids;
    const ElementGeometry& g = elements[e];
    Eigen::Vector2d grad_c = Eigen::Vector2d::Zero();
    for (int j = 0; j < 3; ++j) grad_c += c[ids[j]] * g.grad[j];
    const std::array<double, 3> vals{rho_iter[ids[0]], rho_iter[ids[1]], rho_iter[ids[2]]};
    const Eigen::Matrix2d theta = theta_matrix(vals, affine_map(mesh, e).B, cutoff);
    const Eigen::Vector2d flux = g.area * (theta * grad_c);
    for (int i = 0; i < 3; ++i) b[ids[i]] += flux.dot(g.grad[i]);
  }
  return b;
}

Vector assemble_drift_rhs(const Vector& rho, double lambda,
                          const std::vector<ElementGeometry>& elements, const Mesh& mesh) {
  Vector d = Vector::Zero(rho.size());
  const auto& tris = mesh.triangles();
  for (std::size_t e = 0; e < tris.size(); ++e) {
    const auto& ids = tris[e].vertex_ids;
    const ElementGeometry& g = elements[e];
    const double rho_bar = (rho[ids[0]] + rho[ids[1]] + rho[ids[2]]) / 3.0;
    const Eigen::Vector2d flux = (-lambda * g.area * rho_bar) * g.barycenter;
    for (int i = 0; i < 3; ++i) d[ids[i]] += flux.dot(g.grad[i]);
  }
  return d;
}

Stepper::Stepper(std::shared_ptr<const Discretization> disc, const SolverConfig& cfg)
    : disc_(std::move(disc)), cfg_(cfg), drift_(cfg.drift()) {
  if (!disc_) throw std::invalid_argument("stepper needs a discretization");
  cfg_.validate();
  stage_ = disc_->fem.stiffness * cfg_.epsilon;
  for (Eigen::Index i = 0; i < stage_.rows(); ++i) {
    stage_.coeffRef(i, i) += disc_->fem.lumped_mass[i] / cfg_.dt;
  }
  factor_ = std::make_unique<Eigen::SimplicialLDLT<SparseMatrix>>();
  factorize(*factor_, stage_, "stage matrix");
}

Vector Stepper::solve(const Vector& rhs) const { return refined_solve(*factor_, stage_, rhs); }

Vector Stepper::potential(const Vector& rho) const {
  return solve_fractional_poisson(disc_->spectral, disc_->fem.consistent_mass, rho, cfg_.s);
}

Vector Stepper::sweep_rhs(const Vector& rho_prev, const Vector& rho_iter, const Vector& c) const {
  Vector rhs = disc_->fem.lumped_mass.cwiseProduct(rho_prev) / cfg_.dt;
  rhs += assemble_transport_rhs(rho_iter, c, cfg_.cutoff, disc_->mesh, disc_->fem.elements);
  if (drift_ != 0.0) rhs += assemble_drift_rhs(rho_iter, drift_, disc_->fem.elements, disc_->mesh);
  return rhs;
}

StepResult Stepper::step(const Vector& rho_prev) const {
  if (rho_prev.size() != disc_->num_nodes()) {
    throw std::invalid_argument("state does not match the discretization");
  }
  Vector rho = rho_prev;
  double residual = 0.0;
  for (int k = 1; k <= cfg_.picard_max; ++k) {
    const Vector c = potential(rho);
    Vector next = solve(sweep_rhs(rho_prev, rho, c));
    residual = (next - rho).lpNorm<Eigen::Infinity>();
    const double threshold = cfg_.picard_tol * (1.0 + rho.lpNorm<Eigen::Infinity>());
    rho = std::move(next);
    if (residual <= threshold) {
      StepResult out;
      out.c = potential(rho);
      out.rho = std::move(rho);
      out.iters = k;
      out.residual = residual;
      return out;
    }
  }
  std::ostringstream msg;
  msg << "Picard iteration did not converge in " << cfg_.picard_max
      << " sweeps (last update " << residual << ")";
  throw SolverFailure(msg.str(), 0, residual);
}

bool is_snapshot_step(const SolverConfig& cfg, int step) {
  return step == 0 || step == cfg.num_steps() ||
         (cfg.snapshot_every > 0 && step % cfg.snapshot_every == 0);
}

SolverConfig effective_config(const SolverConfig& cfg, const Vector& rho0) {
  SolverConfig out = cfg;
  const double cap = std::max(cfg.cutoff.cap(), 2.0 * rho0.lpNorm<Eigen::Infinity>());
  out.cutoff = CutoffParams(cfg.cutoff.delta(), cap);
  return out;
}

RunResult run(const SolverConfig& cfg_in, const NodalField& rho0,
              std::shared_ptr<const Discretization> disc, const StepObserver& observer) {
  if (!disc) throw std::invalid_argument("run needs a discretization");
  cfg_in.validate();
  rho0.require_mesh(disc->mesh);
  const SolverConfig cfg = effective_config(cfg_in, rho0.values());

  RunResult result;
  result.cutoff = cfg.cutoff;
  result.rho_initial = smooth_initial_datum(rho0.values(), cfg.dt, disc->fem.stiffness,
                                            disc->fem.lumped_mass);
  const Stepper stepper(disc, cfg);
  const int steps = cfg.num_steps();

  Snapshot state{0, 0.0, result.rho_initial, stepper.potential(result.rho_initial)};
  auto record_state = [&](int iters, double residual) {
    result.records.push_back(
        compute_record(state.step, state.time, state.rho, state.c, *disc, cfg.cutoff, cfg.s, iters,
                       residual));
    if (is_snapshot_step(cfg, state.step)) result.snapshots.push_back(state);
    if (observer) observer(state, result.records.back());
  };
  record_state(0, 0.0);

  for (int n = 1; n <= steps; ++n) {
    StepResult next;
    try {
      next = stepper.step(state.rho);
    } catch (const SolverFailure& e) {
      throw SolverFailure("step " + std::to_string(n) + ": " + e.what(), n, e.residual());
    } catch (const std::exception& e) {
      throw SolverFailure("step " + std::to_string(n) + ": " + e.what(), n, 0.0);
    }
    state.step = n;
    state.time = n * cfg.dt;
    state.rho = std::move(next.rho);
    state.c = std::move(next.c);
    record_state(next.iters, next.residual);
  }
  return result;
}

}  // namespace fracpme
