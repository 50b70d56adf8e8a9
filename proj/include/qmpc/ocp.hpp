#pragma once

#include <vector>

#include "qmpc/integrator.hpp"
#include "qmpc/qp.hpp"
#include "qmpc/types.hpp"

namespace qmpc {

struct OcpConfig {
  int N = 50;
  double Ts = 0.04;
  // Diagonal weights over the state (p, v, Phi, omega) and the stacked
  // forces / per-leg residuals.
  Vec12 Q = (Vec12() << 0, 0, 0, 100, 100, 100, 0, 0, 100, 100, 100, 1000)
                .finished();
  Vec12 R = (Vec12() << 1e-3, 1e-3, 8e-4, 1e-3, 1e-3, 8e-4, 1e-3, 1e-3, 8e-4,
             1e-3, 1e-3, 8e-4)
                .finished();
  Vec12 M = (Vec12() << 1e-4, 2e-3, 1000, 1e-4, 2e-3, 1000, 1e-4, 2e-3, 1000,
             1e-4, 2e-3, 1000)
                .finished();
  Vec12 P = (Vec12() << 100, 100, 1, 100, 100, 1, 100, 100, 1, 100, 100, 1)
                .finished();
  double rho = 3e-5;
  Vec12 QN = (Vec12() << 0, 0, 0, 100, 100, 100, 0, 0, 100, 100, 100, 1000)
                 .finished();
  double mu = 0.7;
  double fz_min = 0.0;
  double fz_max = 500.0;
  // Ablation switch: when false, friction_pyramid_rows emits only the
  // normal-force bounds and drops the four tangential pyramid faces.
  bool cone_faces = true;
};

struct ReferenceTrajectory {
  std::vector<State> x_ref;           // N+1
  std::vector<Control> u_ref;         // N
  std::vector<StageParams> params;    // N
  std::array<Vec3, kNumLegs> p_hf_ref{
      Vec3(0.0, 0.1, -0.55), Vec3(0.0, -0.1, -0.55), Vec3(0.0, 0.1, -0.55),
      Vec3(0.0, -0.1, -0.55)};
};

struct Trajectory {
  std::vector<State> x;    // N+1
  std::vector<Control> u;  // N
};

// Hip-to-foot positions expressed in the CoM frame.
std::array<Vec3, kNumLegs> hip_to_foot_com_frame(
    const State& x, const std::array<Vec3, kNumLegs>& foot_pos,
    const RobotModel& model);

// Orthonormal frame with Z along the contact normal; X is the normalized
// tangent-plane projection of world X (world Y when the normal is within
// 1e-8 of +-world X). Throws DegenerateNormal for a zero normal.
Mat3 contact_frame(const Vec3& normal);

// Tracking + mobility + force-robustness stage cost (the quadratic terms
// summed without a 1/2 factor). Mobility and force-robustness terms are
// stance-masked per delta.
double stage_cost(const State& x, const Control& u, const StageParams& a,
                  const State& x_ref, const Control& u_ref,
                  const std::array<Vec3, kNumLegs>& p_hf_ref,
                  const OcpConfig& cfg, const RobotModel& model);

// Linear friction-pyramid rows over the full stacked control: feasibility of
// u is equivalent to L u + h0 >= 0 elementwise. Rows exist for stance legs
// only (6 per stance leg: 4 pyramid faces + normal-force bounds).
void friction_pyramid_rows(const StageParams& a, const OcpConfig& cfg,
                           MatX& L, VecX& h0);

// Half of the full nonlinear objective along a trajectory (the 1/2-scaled
// convention the Gauss-Newton QP minimizes; same minimizer as the sum of
// stage costs).
double nlp_objective(const Trajectory& traj, const ReferenceTrajectory& refs,
                     const OcpConfig& cfg, const RobotModel& model);

// Per-stage index map between QP control variables and stance-leg force
// slots; swing forces are excluded from the QP entirely.
std::vector<int> stance_slots(const StageParams& a);

// Assembles the Gauss-Newton QP around the guess: tracking Hessian
// diag(Q, R) plus the mobility and rotated force-robustness contributions,
// dynamics sensitivities from the integrator, friction-pyramid rows for
// stance legs, and the initial residual dx0 = x0_hat - guess.x[0].
QpSubproblem build_qp(const Trajectory& guess, const ReferenceTrajectory& refs,
                      const State& x0_hat, const OcpConfig& cfg,
                      const RobotModel& model, const IntegratorConfig& icfg);

// Expands a QP solution's stance-only control steps back to full Controls
// and applies the step to a trajectory.
Trajectory apply_step(const Trajectory& guess, const ReferenceTrajectory& refs,
                      const QpSolution& sol);

}  // namespace qmpc
