#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "qmpc/srbd.hpp"

using namespace qmpc;

namespace {

StageParams all_swing() {
  StageParams a;
  a.delta = {false, false, false, false};
  return a;
}

StageParams square_stance(double depth = 0.55) {
  StageParams a;
  RobotModel m;
  for (int i = 0; i < kNumLegs; ++i)
    a.foot_pos[i] = m.hip_offsets[i] + Vec3(0, 0, -depth);
  return a;
}

}  // namespace

TEST_CASE("euler rates matrix at identity and under roll") {
  CHECK(euler_rates_matrix(Vec3(0, 0, 0)).isApprox(Mat3::Identity(), 1e-12));
  // E depends only on pitch and yaw.
  CHECK(euler_rates_matrix(Vec3(0.3, 0, 0)).isApprox(Mat3::Identity(), 1e-12));
  CHECK(euler_rates_matrix(Vec3(0.3, 0.2, 0.7))
            .isApprox(euler_rates_matrix(Vec3(-0.9, 0.2, 0.7)), 1e-12));
}

TEST_CASE("euler rates matrix singular at pitch pi/2") {
  const Mat3 E = euler_rates_matrix(Vec3(0, M_PI / 2, 0));
  CHECK(std::abs(E.determinant()) < 1e-12);
}

TEST_CASE("conjugate euler rates matrix examples") {
  CHECK(conjugate_euler_rates_matrix(Vec3(0, 0, 0))
            .isApprox(Mat3::Identity(), 1e-12));
  // E' depends only on roll and pitch.
  CHECK(conjugate_euler_rates_matrix(Vec3(0, 0, 1.2))
            .isApprox(Mat3::Identity(), 1e-12));
  CHECK(conjugate_euler_rates_matrix(Vec3(0.4, -0.3, 0.1))
            .isApprox(conjugate_euler_rates_matrix(Vec3(0.4, -0.3, -2.0)),
                      1e-12));
  const Mat3 Ep = conjugate_euler_rates_matrix(Vec3(0, M_PI / 2, 0));
  CHECK(std::abs(Ep.determinant()) < 1e-12);
}

TEST_CASE("euler rates from body rate") {
  const Vec3 w(0.1, 0.2, 0.3);
  CHECK(euler_rates_from_body_rate(Vec3::Zero(), w).isApprox(w, 1e-12));
  CHECK(euler_rates_from_body_rate(Vec3(0, 0, 2.1), Vec3(0, 0, 0.5))
            .isApprox(Vec3(0, 0, 0.5), 1e-12));

  // Round trip E'(Phi) * result = omega.
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const Vec3 Phi(u(rng), 0.8 * u(rng), 2.0 * u(rng));
    const Vec3 w2(u(rng), u(rng), u(rng));
    const Vec3 rates = euler_rates_from_body_rate(Phi, w2);
    CHECK((conjugate_euler_rates_matrix(Phi) * rates - w2).norm() < 1e-10);
  }

  CHECK_THROWS_AS(
      euler_rates_from_body_rate(Vec3(0, M_PI / 2, 0), Vec3::Ones()),
      SingularOrientation);
}

TEST_CASE("free fall derivative") {
  RobotModel model;
  State x;
  x.v_c = Vec3(1.0, -0.5, 0.2);
  const Vec12 dx = srbd_derivative(x, Control{}, all_swing(), model);
  CHECK(dx.segment<3>(0).isApprox(x.v_c, 1e-12));
  CHECK(dx.segment<3>(3).isApprox(model.gravity, 1e-12));
  CHECK(dx.segment<3>(9).norm() == doctest::Approx(0.0));
}

TEST_CASE("hover forces cancel gravity") {
  RobotModel model;
  State x;
  x.p_c = Vec3(0, 0, 0.55);
  StageParams a = square_stance();
  Control u;
  const double fz = model.mass * 9.81 / 4.0;  // 214.4 N
  CHECK(fz == doctest::Approx(214.4).epsilon(1e-3));
  for (int i = 0; i < kNumLegs; ++i) {
    a.foot_pos[i] = x.p_c + model.hip_offsets[i] + Vec3(0, 0, -0.55);
    u.forces[i] = Vec3(0, 0, fz);
  }
  const Vec12 dx = srbd_derivative(x, u, a, model);
  CHECK(dx.segment<3>(3).norm() < 1e-10);
}

TEST_CASE("torque term from a single stance foot") {
  RobotModel model;
  State x;
  StageParams a;
  a.delta = {true, false, false, false};
  Control u;
  u.forces[0] = Vec3(0, 0, 100);

  // Force line through the CoM: no torque.
  a.foot_pos[0] = Vec3(0, 0, -0.55);
  Vec12 dx = srbd_derivative(x, u, a, model);
  CHECK(dx.segment<3>(9).norm() < 1e-12);

  // Offset lever arm: tau = (0.3,0.2,-0.55) x (0,0,100) = (20,-30,0).
  a.foot_pos[0] = Vec3(0.3, 0.2, -0.55);
  dx = srbd_derivative(x, u, a, model);
  const Vec3 tau = model.inertia_com * dx.segment<3>(9);
  CHECK(tau.isApprox(Vec3(20, -30, 0), 1e-9));
}

TEST_CASE("delta masking equals force zeroing") {
  RobotModel model;
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    State x;
    x.p_c = Vec3(d(rng), d(rng), 0.55 + 0.1 * d(rng));
    x.v_c = Vec3(d(rng), d(rng), d(rng));
    x.Phi = Vec3(0.3 * d(rng), 0.3 * d(rng), d(rng));
    x.omega_body = Vec3(d(rng), d(rng), d(rng));
    StageParams a = square_stance();
    Control u;
    for (int i = 0; i < kNumLegs; ++i)
      u.forces[i] = Vec3(30 * d(rng), 30 * d(rng), 200 + 50 * d(rng));

    StageParams a_masked = a;
    a_masked.delta[2] = false;
    Control u_zeroed = u;
    u_zeroed.forces[2].setZero();

    const Vec12 lhs = srbd_derivative(x, u_zeroed, a, model);
    const Vec12 rhs = srbd_derivative(x, u, a_masked, model);
    CHECK((lhs - rhs).lpNorm<Eigen::Infinity>() < 1e-12);
  }
}

TEST_CASE("torque-free gyroscopics conserve rotational energy rate") {
  RobotModel model;
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> d(-2.0, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    State x;
    x.Phi = Vec3(0.2 * d(rng), 0.2 * d(rng), d(rng));
    x.omega_body = Vec3(d(rng), d(rng), d(rng));
    const Vec12 dx = srbd_derivative(x, Control{}, all_swing(), model);
    const Vec3 wdot = dx.segment<3>(9);
    CHECK(std::abs(x.omega_body.dot(model.inertia_com * wdot)) < 1e-10);
  }
}

TEST_CASE("frame consistency of the body torque term") {
  // Rotating the world (feet, forces) together with the base yaw leaves the
  // body-frame angular acceleration invariant.
  RobotModel model;
  State x;
  x.Phi = Vec3(0, 0, 0.3);
  x.omega_body = Vec3(0.1, -0.2, 0.05);
  StageParams a = square_stance();
  Control u;
  for (int i = 0; i < kNumLegs; ++i) {
    a.foot_pos[i] = rotation_matrix(x.Phi) * a.foot_pos[i];
    u.forces[i] = Vec3(10 * i, -5, 200 + i);
  }
  const Vec12 base = srbd_derivative(x, u, a, model);

  const double extra = 0.9;
  const Mat3 Rz = rotation_matrix(Vec3(0, 0, extra));
  State x2 = x;
  x2.Phi.z() += extra;
  StageParams a2 = a;
  Control u2 = u;
  for (int i = 0; i < kNumLegs; ++i) {
    a2.foot_pos[i] = Rz * a.foot_pos[i];
    u2.forces[i] = Rz * u.forces[i];
  }
  const Vec12 rot = srbd_derivative(x2, u2, a2, model);
  CHECK((base.segment<3>(9) - rot.segment<3>(9)).norm() < 1e-9);
}

TEST_CASE("analytic jacobians match finite differences") {
  RobotModel model;
  State x;
  x.p_c = Vec3(0.1, -0.2, 0.57);
  x.v_c = Vec3(0.1, 0.05, -0.02);
  x.Phi = Vec3(0.1, -0.15, 0.4);
  x.omega_body = Vec3(0.2, -0.1, 0.3);
  StageParams a = square_stance();
  a.delta[1] = false;
  Control u;
  for (int i = 0; i < kNumLegs; ++i) u.forces[i] = Vec3(12, -8, 230);

  Mat12 Gx, Gu;
  srbd_jacobians(x, u, a, model, Gx, Gu);

  const double h = 1e-6;
  for (int j = 0; j < 12; ++j) {
    Vec12 xp = x.vec(), xm = x.vec();
    xp(j) += h;
    xm(j) -= h;
    const Vec12 col = (srbd_derivative(State::from_vec(xp), u, a, model) -
                       srbd_derivative(State::from_vec(xm), u, a, model)) /
                      (2 * h);
    CHECK((Gx.col(j) - col).lpNorm<Eigen::Infinity>() < 1e-5);

    Vec12 up = u.vec(), um = u.vec();
    up(j) += h;
    um(j) -= h;
    const Vec12 colu = (srbd_derivative(x, Control::from_vec(up), a, model) -
                        srbd_derivative(x, Control::from_vec(um), a, model)) /
                       (2 * h);
    CHECK((Gu.col(j) - colu).lpNorm<Eigen::Infinity>() < 1e-5);
  }
}

TEST_CASE("robot model defaults") {
  RobotModel m;
  CHECK(m.mass == doctest::Approx(87.4));
  CHECK(m.inertia_com.isApprox(m.inertia_com.transpose(), 1e-12));
  Eigen::SelfAdjointEigenSolver<Mat3> es(m.inertia_com);
  CHECK(es.eigenvalues().minCoeff() > 0);
  // Left/right and front/hind sign symmetry.
  CHECK(m.hip_offsets[LF].x() == doctest::Approx(-m.hip_offsets[LH].x()));
  CHECK(m.hip_offsets[LF].y() == doctest::Approx(-m.hip_offsets[RF].y()));
}
