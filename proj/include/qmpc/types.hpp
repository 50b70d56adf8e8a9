#pragma once

#include <Eigen/Dense>
#include <array>
#include <stdexcept>
#include <string>

namespace qmpc {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Vec12 = Eigen::Matrix<double, 12, 1>;
using Mat3 = Eigen::Matrix3d;
using Mat12 = Eigen::Matrix<double, 12, 12>;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

inline constexpr int kNumLegs = 4;
// Leg order used everywhere: LF, RF, LH, RH.
enum LegIndex { LF = 0, RF = 1, LH = 2, RH = 3 };

struct SingularOrientation : std::runtime_error {
  explicit SingularOrientation(const std::string& msg)
      : std::runtime_error("singular orientation: " + msg) {}
};

struct NewtonDivergence : std::runtime_error {
  explicit NewtonDivergence(const std::string& msg)
      : std::runtime_error("implicit step did not converge: " + msg) {}
};

struct SingularJacobian : std::runtime_error {
  explicit SingularJacobian(const std::string& msg)
      : std::runtime_error("singular jacobian: " + msg) {}
};

struct Unreachable : std::runtime_error {
  explicit Unreachable(const std::string& msg)
      : std::runtime_error("unreachable foot target: " + msg) {}
};

struct OutOfMap : std::runtime_error {
  explicit OutOfMap(const std::string& msg)
      : std::runtime_error("query outside heightmap: " + msg) {}
};

struct NoSafeCell : std::runtime_error {
  explicit NoSafeCell(const std::string& msg)
      : std::runtime_error("no safe foothold cell: " + msg) {}
};

struct DegenerateNormal : std::runtime_error {
  explicit DegenerateNormal(const std::string& msg)
      : std::runtime_error("degenerate contact normal: " + msg) {}
};

struct DegeneratePolygon : std::runtime_error {
  explicit DegeneratePolygon(const std::string& msg)
      : std::runtime_error("degenerate support polygon: " + msg) {}
};

struct MaxIterations : std::runtime_error {
  explicit MaxIterations(const std::string& msg)
      : std::runtime_error("iteration limit: " + msg) {}
};

struct InfeasibleQp : std::runtime_error {
  explicit InfeasibleQp(const std::string& msg)
      : std::runtime_error("infeasible QP: " + msg) {}
};

struct PhaseViolation : std::logic_error {
  explicit PhaseViolation(const std::string& msg)
      : std::logic_error("RTI phase violation: " + msg) {}
};

struct NoConvergence : std::runtime_error {
  explicit NoConvergence(const std::string& msg)
      : std::runtime_error("SQP did not converge: " + msg) {}
};

struct ScenarioError : std::runtime_error {
  explicit ScenarioError(const std::string& msg)
      : std::runtime_error("scenario error: " + msg) {}
};

struct InvalidSpec : std::runtime_error {
  explicit InvalidSpec(const std::string& msg)
      : std::runtime_error("invalid scenario spec: " + msg) {}
};

struct LogSingularity : std::runtime_error {
  explicit LogSingularity(const std::string& msg)
      : std::runtime_error("rotation log near pi: " + msg) {}
};

// 12-dim rigid body state: CoM position/velocity in world, Z-Y-X Euler
// angles (roll, pitch, yaw) and angular velocity in the CoM frame.
struct State {
  Vec3 p_c = Vec3::Zero();
  Vec3 v_c = Vec3::Zero();
  Vec3 Phi = Vec3::Zero();        // (roll, pitch, yaw)
  Vec3 omega_body = Vec3::Zero();

  Vec12 vec() const {
    Vec12 v;
    v << p_c, v_c, Phi, omega_body;
    return v;
  }
  static State from_vec(const Vec12& v) {
    State x;
    x.p_c = v.segment<3>(0);
    x.v_c = v.segment<3>(3);
    x.Phi = v.segment<3>(6);
    x.omega_body = v.segment<3>(9);
    return x;
  }
};

// Stacked per-foot ground reaction forces, world frame.
struct Control {
  std::array<Vec3, kNumLegs> forces{Vec3::Zero(), Vec3::Zero(), Vec3::Zero(),
                                    Vec3::Zero()};

  Vec12 vec() const {
    Vec12 v;
    for (int i = 0; i < kNumLegs; ++i) v.segment<3>(3 * i) = forces[i];
    return v;
  }
  static Control from_vec(const Vec12& v) {
    Control u;
    for (int i = 0; i < kNumLegs; ++i) u.forces[i] = v.segment<3>(3 * i);
    return u;
  }
};

// Per-stage model parameters: world foot positions, contact flags and
// contact normals (the vector of parameters the OCP is linearized around).
struct StageParams {
  std::array<Vec3, kNumLegs> foot_pos{Vec3::Zero(), Vec3::Zero(), Vec3::Zero(),
                                      Vec3::Zero()};
  std::array<bool, kNumLegs> delta{true, true, true, true};
  std::array<Vec3, kNumLegs> normals{Vec3::UnitZ(), Vec3::UnitZ(),
                                     Vec3::UnitZ(), Vec3::UnitZ()};

  int num_stance() const {
    int n = 0;
    for (bool d : delta) n += d ? 1 : 0;
    return n;
  }
};

struct RobotModel {
  double mass = 87.4;  // kg
  Mat3 inertia_com = (Mat3() << 4.0745, 0.1458, -0.2245,   //
                      0.1458, 11.3576, -0.0133,            //
                      -0.2245, -0.0133, 12.5675)
                         .finished();  // kg m^2, CoM frame
  std::array<Vec3, kNumLegs> hip_offsets{
      Vec3(0.37, 0.21, 0.0), Vec3(0.37, -0.21, 0.0), Vec3(-0.37, 0.21, 0.0),
      Vec3(-0.37, -0.21, 0.0)};
  Vec3 gravity = Vec3(0.0, 0.0, -9.81);
  Vec3 com_to_base = Vec3::Zero();  // base center relative to CoM, body frame
};

// Loads a RobotModel from a key-value text file. Recognized keys:
//   mass, gravity_z, inertia_xx .. inertia_zz, hip_offset_x, hip_offset_y,
//   com_to_base_{x,y,z}. Unknown keys raise InvalidSpec.
RobotModel load_robot_model(const std::string& path);

}  // namespace qmpc
