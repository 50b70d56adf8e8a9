#include "qmpc/srbd.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace qmpc {

Mat3 skew(const Vec3& v) {
  Mat3 m;
  m << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
  return m;
}

Mat3 rotation_matrix(const Vec3& Phi) {
  const double cr = std::cos(Phi.x()), sr = std::sin(Phi.x());
  const double cp = std::cos(Phi.y()), sp = std::sin(Phi.y());
  const double cy = std::cos(Phi.z()), sy = std::sin(Phi.z());
  Mat3 Rx, Ry, Rz;
  Rx << 1, 0, 0, 0, cr, -sr, 0, sr, cr;
  Ry << cp, 0, sp, 0, 1, 0, -sp, 0, cp;
  Rz << cy, -sy, 0, sy, cy, 0, 0, 0, 1;
  return Rz * Ry * Rx;
}

std::array<Mat3, 3> rotation_matrix_derivatives(const Vec3& Phi) {
  const double cr = std::cos(Phi.x()), sr = std::sin(Phi.x());
  const double cp = std::cos(Phi.y()), sp = std::sin(Phi.y());
  const double cy = std::cos(Phi.z()), sy = std::sin(Phi.z());
  Mat3 Rx, Ry, Rz, dRx, dRy, dRz;
  Rx << 1, 0, 0, 0, cr, -sr, 0, sr, cr;
  Ry << cp, 0, sp, 0, 1, 0, -sp, 0, cp;
  Rz << cy, -sy, 0, sy, cy, 0, 0, 0, 1;
  dRx << 0, 0, 0, 0, -sr, -cr, 0, cr, -sr;
  dRy << -sp, 0, cp, 0, 0, 0, -cp, 0, -sp;
  dRz << -sy, -cy, 0, cy, -sy, 0, 0, 0, 0;
  return {Rz * Ry * dRx, Rz * dRy * Rx, dRz * Ry * Rx};
}

Mat3 euler_rates_matrix(const Vec3& Phi) {
  const double cp = std::cos(Phi.y()), sp = std::sin(Phi.y());
  const double cy = std::cos(Phi.z()), sy = std::sin(Phi.z());
  Mat3 E;
  E << cp * cy, -sy, 0,  //
      cp * sy, cy, 0,    //
      -sp, 0, 1;
  return E;
}

Mat3 conjugate_euler_rates_matrix(const Vec3& Phi) {
  const double cr = std::cos(Phi.x()), sr = std::sin(Phi.x());
  const double cp = std::cos(Phi.y()), sp = std::sin(Phi.y());
  Mat3 E;
  E << 1, 0, -sp,      //
      0, cr, cp * sr,  //
      0, -sr, cp * cr;
  return E;
}

namespace {

// d(E')/d(roll) and d(E')/d(pitch); E' does not depend on yaw.
std::array<Mat3, 2> conjugate_euler_rates_derivatives(const Vec3& Phi) {
  const double cr = std::cos(Phi.x()), sr = std::sin(Phi.x());
  const double cp = std::cos(Phi.y()), sp = std::sin(Phi.y());
  Mat3 dR, dP;
  dR << 0, 0, 0,        //
      0, -sr, cp * cr,  //
      0, -cr, -cp * sr;
  dP << 0, 0, -cp,      //
      0, 0, -sp * sr,   //
      0, 0, -sp * cr;
  return {dR, dP};
}

void check_orientation(const Vec3& Phi) {
  if (std::abs(std::cos(Phi.y())) <= kOrientationSingularityTol)
    throw SingularOrientation("pitch too close to +-pi/2");
}

}  // namespace

Vec3 euler_rates_from_body_rate(const Vec3& Phi, const Vec3& omega_body) {
  check_orientation(Phi);
  return conjugate_euler_rates_matrix(Phi)
      .partialPivLu()
      .solve(omega_body);
}

Vec12 srbd_derivative(const State& x, const Control& u, const StageParams& a,
                      const RobotModel& model) {
  check_orientation(x.Phi);
  const Mat3 R = rotation_matrix(x.Phi);
  const Mat3 Rt = R.transpose();
  Vec3 force_sum = Vec3::Zero();
  Vec3 torque = Vec3::Zero();
  for (int i = 0; i < kNumLegs; ++i) {
    if (!a.delta[i]) continue;
    force_sum += u.forces[i];
    const Vec3 d_body = Rt * (a.foot_pos[i] - x.p_c);
    const Vec3 f_body = Rt * u.forces[i];
    torque += d_body.cross(f_body);
  }
  const Vec3 Iw = model.inertia_com * x.omega_body;
  Vec12 dx;
  dx.segment<3>(0) = x.v_c;
  dx.segment<3>(3) = model.gravity + force_sum / model.mass;
  dx.segment<3>(6) = euler_rates_from_body_rate(x.Phi, x.omega_body);
  dx.segment<3>(9) =
      model.inertia_com.ldlt().solve(-x.omega_body.cross(Iw) + torque);
  return dx;
}

void srbd_jacobians(const State& x, const Control& u, const StageParams& a,
                    const RobotModel& model, Mat12& Gx, Mat12& Gu) {
  check_orientation(x.Phi);
  Gx.setZero();
  Gu.setZero();
  const Mat3 R = rotation_matrix(x.Phi);
  const Mat3 Rt = R.transpose();
  const auto dR = rotation_matrix_derivatives(x.Phi);
  const Mat3 Iinv =
      model.inertia_com.ldlt().solve(Mat3::Identity());

  // p_dot = v
  Gx.block<3, 3>(0, 3) = Mat3::Identity();

  // v_dot rows: only force dependence.
  for (int i = 0; i < kNumLegs; ++i)
    if (a.delta[i])
      Gu.block<3, 3>(3, 3 * i) = Mat3::Identity() / model.mass;

  // Phi_dot = E'(Phi)^-1 omega
  const Mat3 Ep = conjugate_euler_rates_matrix(x.Phi);
  const Mat3 EpInv = Ep.partialPivLu().solve(Mat3::Identity());
  const auto dEp = conjugate_euler_rates_derivatives(x.Phi);
  Gx.block<3, 3>(6, 9) = EpInv;
  for (int j = 0; j < 2; ++j)  // roll, pitch columns; yaw column stays zero
    Gx.block<3, 1>(6, 6 + j) = -EpInv * dEp[j] * (EpInv * x.omega_body);

  // omega_dot rows.
  const Vec3 Iw = model.inertia_com * x.omega_body;
  Gx.block<3, 3>(9, 9) =
      Iinv * (skew(Iw) - skew(x.omega_body) * model.inertia_com);
  Mat3 dTau_dp = Mat3::Zero();
  std::array<Vec3, 3> dTau_dPhi{Vec3::Zero(), Vec3::Zero(), Vec3::Zero()};
  for (int i = 0; i < kNumLegs; ++i) {
    if (!a.delta[i]) continue;
    const Vec3 d = a.foot_pos[i] - x.p_c;
    const Vec3 d_body = Rt * d;
    const Vec3 f_body = Rt * u.forces[i];
    dTau_dp += skew(f_body) * Rt;
    for (int j = 0; j < 3; ++j) {
      const Mat3 dRt = dR[j].transpose();
      dTau_dPhi[j] += (dRt * d).cross(f_body) + d_body.cross(dRt * u.forces[i]);
    }
    Gu.block<3, 3>(9, 3 * i) = Iinv * skew(d_body) * Rt;
  }
  Gx.block<3, 3>(9, 0) = Iinv * dTau_dp;
  for (int j = 0; j < 3; ++j)
    Gx.block<3, 1>(9, 6 + j) = Iinv * dTau_dPhi[j];
}

RobotModel load_robot_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidSpec("cannot open robot model file: " + path);
  RobotModel m;
  double hip_x = 0.37, hip_y = 0.21;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string key;
    double value;
    if (!(ls >> key >> value)) continue;
    if (key == "mass")
      m.mass = value;
    else if (key == "gravity_z")
      m.gravity.z() = value;
    else if (key == "inertia_xx")
      m.inertia_com(0, 0) = value;
    else if (key == "inertia_yy")
      m.inertia_com(1, 1) = value;
    else if (key == "inertia_zz")
      m.inertia_com(2, 2) = value;
    else if (key == "inertia_xy")
      m.inertia_com(0, 1) = m.inertia_com(1, 0) = value;
    else if (key == "inertia_xz")
      m.inertia_com(0, 2) = m.inertia_com(2, 0) = value;
    else if (key == "inertia_yz")
      m.inertia_com(1, 2) = m.inertia_com(2, 1) = value;
    else if (key == "hip_offset_x")
      hip_x = value;
    else if (key == "hip_offset_y")
      hip_y = value;
    else if (key == "com_to_base_x")
      m.com_to_base.x() = value;
    else if (key == "com_to_base_y")
      m.com_to_base.y() = value;
    else if (key == "com_to_base_z")
      m.com_to_base.z() = value;
    else
      throw InvalidSpec("unknown robot model key: " + key);
  }
  m.hip_offsets = {Vec3(hip_x, hip_y, 0), Vec3(hip_x, -hip_y, 0),
                   Vec3(-hip_x, hip_y, 0), Vec3(-hip_x, -hip_y, 0)};
  return m;
}

}  // namespace qmpc
