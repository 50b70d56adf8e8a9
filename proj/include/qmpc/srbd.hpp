#pragma once

#include "qmpc/types.hpp"

namespace qmpc {

inline constexpr double kOrientationSingularityTol = 1e-6;

// Rotation matrix for Z-Y-X Euler angles: R = Rz(yaw) * Ry(pitch) * Rx(roll).
// Maps body-frame vectors to world frame.
Mat3 rotation_matrix(const Vec3& Phi);

// Partial derivatives of rotation_matrix w.r.t. roll/pitch/yaw.
std::array<Mat3, 3> rotation_matrix_derivatives(const Vec3& Phi);

// Euler angle rates matrix E(Phi): omega_world = E * Phi_dot.
// Depends only on pitch and yaw.
Mat3 euler_rates_matrix(const Vec3& Phi);

// Conjugate Euler angle rates matrix E'(Phi): omega_body = E' * Phi_dot.
// Depends only on roll and pitch.
Mat3 conjugate_euler_rates_matrix(const Vec3& Phi);

// Phi_dot = E'(Phi)^-1 * omega_body. Throws SingularOrientation when
// |cos(pitch)| <= kOrientationSingularityTol.
Vec3 euler_rates_from_body_rate(const Vec3& Phi, const Vec3& omega_body);

Mat3 skew(const Vec3& v);

// Continuous-time single-rigid-body dynamics:
//   p_dot     = v
//   v_dot     = g + sum_i delta_i f_i / m
//   Phi_dot   = E'(Phi)^-1 omega_body
//   omega_dot = I^-1 (-omega x I omega + sum_i delta_i (R^T d_i) x (R^T f_i))
// with d_i = p_foot_i - p_c (lever arm rotated into the CoM frame).
Vec12 srbd_derivative(const State& x, const Control& u, const StageParams& a,
                      const RobotModel& model);

// Analytic Jacobians of srbd_derivative w.r.t. the state vector (12x12) and
// the stacked forces (12x12).
void srbd_jacobians(const State& x, const Control& u, const StageParams& a,
                    const RobotModel& model, Mat12& Gx, Mat12& Gu);

}  // namespace qmpc
