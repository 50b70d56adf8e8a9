#pragma once

#include "qmpc/ocp.hpp"

namespace qmpc {

enum class RtiPhase { Idle, Prepared, Consumed };

// Real-time iteration controller: a preparation phase that shifts the guess
// and pre-assembles the Gauss-Newton QP along it, and a feedback phase that
// injects the measured state, solves the single QP and advances the guess.
class RtiController {
 public:
  RtiController(OcpConfig cfg, RobotModel model, IntegratorConfig icfg,
                QpSolverSettings qp_settings = {})
      : cfg_(std::move(cfg)), model_(std::move(model)), icfg_(icfg),
        solver_(qp_settings) {}

  // Shift the guess by one stage (duplicating the last stage), evaluate the
  // sensitivities along it and assemble everything except the initial
  // residual. On the first call the guess is taken from the references.
  // Re-preparing without an intervening feedback re-assembles but does not
  // shift again.
  void prepare(const ReferenceTrajectory& refs);

  // Inject x0_hat, solve the QP, advance the guess. The guess is left
  // unchanged when the solver fails.
  Trajectory feedback(const State& x0_hat);

  RtiPhase phase() const { return phase_; }
  const Trajectory& guess() const { return guess_; }
  const QpSolution& last_solution() const { return last_solution_; }
  double preparation_ms() const { return preparation_ms_; }
  double feedback_ms() const { return feedback_ms_; }
  double last_step_norm() const { return last_solution_.max_step_norm(); }
  void reset() {
    phase_ = RtiPhase::Idle;
    guess_ = Trajectory{};
  }

  // Offline SQP oracle: build + solve until the step norm drops below
  // step_tol. Throws NoConvergence when max_sqp_iter is exhausted.
  Trajectory solve_to_convergence(const ReferenceTrajectory& refs,
                                  const State& x0_hat, int max_sqp_iter = 50,
                                  double step_tol = 1e-8) const;

  const OcpConfig& config() const { return cfg_; }
  OcpConfig& config() { return cfg_; }
  const QpSubproblem& prepared_qp() const { return qp_; }

 private:
  OcpConfig cfg_;
  RobotModel model_;
  IntegratorConfig icfg_;
  QpSolver solver_;
  Trajectory guess_;
  ReferenceTrajectory refs_;
  QpSubproblem qp_;
  QpSolution last_solution_;
  RtiPhase phase_ = RtiPhase::Idle;
  double preparation_ms_ = 0, feedback_ms_ = 0;
};

}  // namespace qmpc
