#include "qmpc/rti.hpp"

#include <chrono>

namespace qmpc {
namespace {

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - t0)
      .count();
}

// Zero the forces of all non-stance legs so the guess is consistent with the
// contact schedule of the current references.
void mask_swing_forces(Trajectory& traj, const ReferenceTrajectory& refs) {
  for (int k = 0; k < static_cast<int>(traj.u.size()); ++k) {
    for (int i = 0; i < kNumLegs; ++i) {
      if (!refs.params[k].delta[i]) traj.u[k].forces[i].setZero();
    }
  }
}

// True when the new references are bitwise identical to the previous ones.
// The guess shift aligns the previous solution with references that advanced
// one sample in time; re-preparing an unchanged problem must not shift, so
// that repeated prepare/feedback cycles reduce to plain SQP iterations.
bool refs_unchanged(const ReferenceTrajectory& a,
                    const ReferenceTrajectory& b) {
  if (a.x_ref.size() != b.x_ref.size() || a.u_ref.size() != b.u_ref.size() ||
      a.params.size() != b.params.size())
    return false;
  for (size_t k = 0; k < a.x_ref.size(); ++k)
    if (a.x_ref[k].vec() != b.x_ref[k].vec()) return false;
  for (size_t k = 0; k < a.u_ref.size(); ++k)
    if (a.u_ref[k].vec() != b.u_ref[k].vec()) return false;
  for (size_t k = 0; k < a.params.size(); ++k) {
    if (a.params[k].delta != b.params[k].delta) return false;
    for (int i = 0; i < kNumLegs; ++i) {
      if (a.params[k].foot_pos[i] != b.params[k].foot_pos[i]) return false;
      if (a.params[k].normals[i] != b.params[k].normals[i]) return false;
    }
  }
  for (int i = 0; i < kNumLegs; ++i)
    if (a.p_hf_ref[i] != b.p_hf_ref[i]) return false;
  return true;
}

}  // namespace

void RtiController::prepare(const ReferenceTrajectory& refs) {
  const auto t0 = std::chrono::steady_clock::now();
  const int N = cfg_.N;
  if (static_cast<int>(refs.x_ref.size()) != N + 1 ||
      static_cast<int>(refs.u_ref.size()) != N ||
      static_cast<int>(refs.params.size()) != N) {
    throw InvalidSpec("reference trajectory length does not match horizon");
  }
  if (guess_.x.empty()) {
    guess_.x = refs.x_ref;
    guess_.u = refs.u_ref;
  } else if (phase_ != RtiPhase::Prepared && !refs_unchanged(refs_, refs)) {
    // Shift one sample forward, duplicating the terminal stage.
    for (int k = 0; k < N; ++k) guess_.x[k] = guess_.x[k + 1];
    for (int k = 0; k + 1 < N; ++k) guess_.u[k] = guess_.u[k + 1];
  }
  mask_swing_forces(guess_, refs);
  refs_ = refs;
  qp_ = build_qp(guess_, refs_, guess_.x[0], cfg_, model_, icfg_);
  phase_ = RtiPhase::Prepared;
  preparation_ms_ = elapsed_ms(t0);
}

Trajectory RtiController::feedback(const State& x0_hat) {
  const auto t0 = std::chrono::steady_clock::now();
  if (phase_ != RtiPhase::Prepared) {
    throw PhaseViolation("feedback called without a prepared subproblem");
  }
  qp_.dx0 = x0_hat.vec() - guess_.x[0].vec();
  last_solution_ = solver_.solve(qp_);
  phase_ = RtiPhase::Consumed;
  if (!last_solution_.converged) {
    feedback_ms_ = elapsed_ms(t0);
    throw MaxIterations("qp solver hit the iteration limit in feedback");
  }
  guess_ = apply_step(guess_, refs_, last_solution_);
  feedback_ms_ = elapsed_ms(t0);
  return guess_;
}

Trajectory RtiController::solve_to_convergence(const ReferenceTrajectory& refs,
                                               const State& x0_hat,
                                               int max_sqp_iter,
                                               double step_tol) const {
  Trajectory traj;
  traj.x = refs.x_ref;
  traj.u = refs.u_ref;
  mask_swing_forces(traj, refs);
  traj.x[0] = x0_hat;
  QpSolver solver(solver_.settings());
  for (int it = 0; it < max_sqp_iter; ++it) {
    QpSubproblem qp = build_qp(traj, refs, x0_hat, cfg_, model_, icfg_);
    QpSolution sol = solver.solve(qp);
    if (!sol.converged) {
      throw MaxIterations("qp solver hit the iteration limit in sqp");
    }
    traj = apply_step(traj, refs, sol);
    if (sol.max_step_norm() < step_tol) return traj;
  }
  throw NoConvergence("sqp did not reach the requested step tolerance");
}

}  // namespace qmpc
