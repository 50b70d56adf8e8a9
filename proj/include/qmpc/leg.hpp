#pragma once

#include "qmpc/types.hpp"

namespace qmpc {

// 3-DoF leg: hip abduction/adduction (HAA) about the hip x axis, then hip
// flexion/extension (HFE) and knee flexion/extension (KFE) about the leg
// plane's y axis. The lateral haa_offset link sits between the HAA axis and
// the leg plane.
struct LegGeometry {
  double l_upper = 0.35;
  double l_lower = 0.346;
  double haa_offset = 0.08;
  // (min, max) per joint: HAA, HFE, KFE. The KFE range keeps the knee bent
  // backward and away from both the fold and full-extension singularities.
  std::array<std::array<double, 2>, 3> joint_limits{
      std::array<double, 2>{-1.2, 1.2}, std::array<double, 2>{-1.6, 1.6},
      std::array<double, 2>{-2.0, -0.35}};
};

struct JointConfig {
  Vec3 q = Vec3::Zero();  // (HAA, HFE, KFE)
};

struct MobilityWeights {
  double beta = 1.0;
  double gamma = 4.0;
  double v_range = 1.0;  // normalization V-bar
  double e_range = 1.0;  // normalization E-bar
};

// Axis-aligned grid of hip-to-foot offsets searched by the mobility
// calibration. The default box is the operational workspace consistent with
// locomotion clearance (it deliberately excludes near-fold and
// near-extension regions where the ellipsoid degenerates).
struct WorkspaceGrid {
  Vec3 lo = Vec3(-0.08, -0.08, -0.65);
  Vec3 hi = Vec3(0.08, 0.08, -0.55);
  double resolution = 0.02;
};

struct MobilityCalibration {
  Vec3 argmax = Vec3::Zero();
  double peak = 0.0;
  MobilityWeights weights;  // with v_range/e_range filled from grid ranges
  int evaluated_nodes = 0;
};

// Hip-to-foot position in the hip frame.
Vec3 forward_kinematics(const JointConfig& q, const LegGeometry& geom);

// Closed-form inverse kinematics, knee-bent-backward branch. Throws
// Unreachable outside the reachable set or the joint limits.
JointConfig inverse_kinematics(const Vec3& p_hf, const LegGeometry& geom);

// dFK/dq, 3x3.
Mat3 jacobian(const JointConfig& q, const LegGeometry& geom);

// V = prod eig((J J^T)^-1), E = eig_max/eig_min of the same matrix.
// Throws SingularJacobian when an eigenvalue of J J^T falls below 1e-12.
std::pair<double, double> ellipsoid_volume_and_eccentricity(const Mat3& J);

// l_m = beta * V / V_bar - gamma * E / E_bar.
double mobility_factor(const JointConfig& q, const LegGeometry& geom,
                       const MobilityWeights& w);

// Grid argmax of the mobility factor; V_bar and E_bar are the observed
// (max - min) ranges over the grid, returned inside the calibration.
MobilityCalibration find_max_mobility_offset(const LegGeometry& geom,
                                             double beta, double gamma,
                                             const WorkspaceGrid& grid);

// Emits the mobility field as CSV rows "x,y,z,l_m" (used by the CLI).
std::string mobility_field_csv(const LegGeometry& geom, double beta,
                               double gamma, const WorkspaceGrid& grid);

}  // namespace qmpc
