#pragma once

#include "qmpc/leg.hpp"
#include "qmpc/ocp.hpp"
#include "qmpc/qp.hpp"

namespace qmpc {

struct WbcGains {
  Vec6 K = (Vec6() << 1500, 1500, 1500, 100, 100, 100).finished();
  Vec6 D = (Vec6() << 1000, 1000, 1000, 50, 50, 50).finished();
  Vec6 S = (Vec6() << 5, 5, 10, 10, 10, 10).finished();
  Vec12 T = Vec12::Constant(1000.0);
};

struct SwingSpec {
  Vec3 liftoff = Vec3::Zero();
  Vec3 touchdown = Vec3::Zero();
  double apex_height = 0.10;
  double duration = 1.0;
};

// Zero-order hold of the planned forces across the control sub-steps.
inline Control resample_control(const Control& u_plan) { return u_plan; }

// Linear interpolation of two consecutive plan states at sub-step i of f_r.
State interpolate_state(const State& x_k, const State& x_k1, int i, int f_r);

// Semi-elliptic swing trajectory: position and velocity at swing time t_sw.
// The horizontal progression follows (1 - cos(pi t/T))/2 along the
// liftoff-touchdown chord and the vertical bump H sin(pi t/T) is added along
// world z, so the apex sits apex_height above the chord at mid-swing.
std::pair<Vec3, Vec3> swing_position(const SwingSpec& spec, double t_sw);

// Feed-forward wrench of the planned stance forces about the CoM.
Vec6 feedforward_wrench(const Control& u_d,
                        const std::array<Vec3, kNumLegs>& p_cf,
                        const std::array<bool, kNumLegs>& delta);

// Cartesian impedance wrench on the pose/twist error. The orientation error
// is the rotation-vector of R_b^T R_d, mapped to the world frame.
Vec6 feedback_wrench(const State& x_d, const State& x, const WbcGains& gains);

// Rotation-vector (axis * angle) of R; throws LogSingularity near pi.
Vec3 rotation_log(const Mat3& R);

// Least-squares distribution of the total wrench over the stance feet,
// regularized toward the planned forces and constrained by the friction
// pyramid. Swing slots of the result are zero. Throws InfeasibleQp.
Control project_wrench_to_grf(const Vec6& w_total,
                              const std::array<Vec3, kNumLegs>& p_cf,
                              const StageParams& a, const Control& u_d,
                              const OcpConfig& cfg, const WbcGains& gains);

// tau = -J(q)^T f per leg, with forces rotated into the base frame and zero
// gravity/Coriolis terms (massless legs).
Vec12 map_grf_to_torques(const Control& f_d,
                         const std::array<JointConfig, kNumLegs>& q,
                         const LegGeometry& geom, const Mat3& r_base);

// Zero-moment point of the commanded stance forces on flat ground.
Vec2 zmp_from_forces(const Control& u, const std::array<Vec3, kNumLegs>& feet,
                     const std::array<bool, kNumLegs>& delta);

// Signed distance of the ZMP from the support polygon boundary (negative
// outside). Throws DegeneratePolygon for fewer than 3 non-collinear feet.
double zmp_margin(const std::vector<Vec3>& stance_feet, const Vec2& zmp_xy);

}  // namespace qmpc
