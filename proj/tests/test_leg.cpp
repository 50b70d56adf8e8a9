#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "qmpc/leg.hpp"

using namespace qmpc;

namespace {

JointConfig random_in_limit(std::mt19937& rng, const LegGeometry& geom) {
  std::uniform_real_distribution<double> u(0.1, 0.9);
  JointConfig q;
  for (int j = 0; j < 3; ++j) {
    const auto& lim = geom.joint_limits[j];
    q.q(j) = lim[0] + u(rng) * (lim[1] - lim[0]);
  }
  return q;
}

}  // namespace

TEST_CASE("forward kinematics at the zero configuration") {
  LegGeometry geom;
  const Vec3 p = forward_kinematics(JointConfig{}, geom);
  CHECK(p.isApprox(Vec3(0, geom.haa_offset, -(geom.l_upper + geom.l_lower)),
                   1e-12));
}

TEST_CASE("pure HAA rotation swaps z into y") {
  LegGeometry geom;
  JointConfig q;
  q.q = Vec3(M_PI / 2, 0, 0);
  const Vec3 p = forward_kinematics(q, geom);
  const double ext = geom.l_upper + geom.l_lower;
  CHECK(p.isApprox(Vec3(0, ext, geom.haa_offset), 1e-12));
}

TEST_CASE("forward kinematics matches a homogeneous-transform oracle") {
  LegGeometry geom;
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-1.2, 1.2);
  auto rot_x = [](double a) {
    Mat3 R;
    R << 1, 0, 0, 0, std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a);
    return R;
  };
  auto rot_y = [](double a) {
    Mat3 R;
    R << std::cos(a), 0, std::sin(a), 0, 1, 0, -std::sin(a), 0, std::cos(a);
    return R;
  };
  for (int trial = 0; trial < 50; ++trial) {
    JointConfig q;
    q.q = Vec3(u(rng), u(rng), u(rng));
    // Independent chain composition: HAA about x, lateral offset along y,
    // HFE and KFE about the (rotated) -y axis with links along -z, so a
    // positive flexion swings the foot toward +x.
    const Vec3 oracle =
        rot_x(q.q(0)) *
        (Vec3(0, geom.haa_offset, 0) +
         rot_y(-q.q(1)) * (Vec3(0, 0, -geom.l_upper) +
                           rot_y(-q.q(2)) * Vec3(0, 0, -geom.l_lower)));
    CHECK((forward_kinematics(q, geom) - oracle).norm() < 1e-12);
  }
}

TEST_CASE("inverse kinematics round trip on the knee-back branch") {
  LegGeometry geom;
  std::mt19937 rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    const JointConfig q = random_in_limit(rng, geom);
    const Vec3 p = forward_kinematics(q, geom);
    JointConfig qr;
    try {
      qr = inverse_kinematics(p, geom);
    } catch (const Unreachable&) {
      continue;  // limit-clipped corner of the sampled box
    }
    CHECK((forward_kinematics(qr, geom) - p).norm() < 1e-9);
  }
}

TEST_CASE("inverse kinematics rejects unreachable targets") {
  LegGeometry geom;
  const double ext = geom.l_upper + geom.l_lower;
  CHECK_THROWS_AS(
      inverse_kinematics(Vec3(0, geom.haa_offset, -1.2 * ext), geom),
      Unreachable);
}

TEST_CASE("jacobian matches finite differences") {
  LegGeometry geom;
  std::mt19937 rng(13);
  const double h = 1e-7;
  for (int trial = 0; trial < 100; ++trial) {
    const JointConfig q = random_in_limit(rng, geom);
    const Mat3 J = jacobian(q, geom);
    for (int j = 0; j < 3; ++j) {
      JointConfig qp = q, qm = q;
      qp.q(j) += h;
      qm.q(j) -= h;
      const Vec3 col = (forward_kinematics(qp, geom) -
                        forward_kinematics(qm, geom)) /
                       (2 * h);
      CHECK((J.col(j) - col).norm() < 1e-6);
    }
    // Rigid-link bound on column norms.
    for (int j = 0; j < 3; ++j)
      CHECK(J.col(j).norm() <=
            geom.l_upper + geom.l_lower + geom.haa_offset + 1e-9);
  }
}

TEST_CASE("fully extended leg is singular") {
  LegGeometry geom;
  JointConfig q;  // straight down
  const Mat3 J = jacobian(q, geom);
  Eigen::JacobiSVD<Mat3> svd(J);
  CHECK(svd.singularValues()(2) < 1e-9);
  CHECK(svd.singularValues()(1) > 1e-3);
  CHECK_THROWS_AS(ellipsoid_volume_and_eccentricity(J), SingularJacobian);
}

TEST_CASE("ellipsoid volume and eccentricity examples") {
  auto [v1, e1] = ellipsoid_volume_and_eccentricity(Mat3::Identity());
  CHECK(v1 == doctest::Approx(1.0));
  CHECK(e1 == doctest::Approx(1.0));

  Mat3 J = Vec3(1, 1, 2).asDiagonal();
  auto [v2, e2] = ellipsoid_volume_and_eccentricity(J);
  CHECK(v2 == doctest::Approx(0.25));
  CHECK(e2 == doctest::Approx(4.0));

  auto [v3, e3] = ellipsoid_volume_and_eccentricity(2 * Mat3::Identity());
  CHECK(v3 == doctest::Approx(1.0 / 64.0));
  CHECK(e3 == doctest::Approx(1.0));
}

TEST_CASE("V and E depend only on the singular values of J") {
  std::mt19937 rng(21);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 20; ++trial) {
    Mat3 J;
    J << u(rng) + 1.5, u(rng), u(rng), u(rng), u(rng) + 1.5, u(rng), u(rng),
        u(rng), u(rng) + 1.5;
    const Mat3 Q = Eigen::Quaterniond::UnitRandom().toRotationMatrix();
    auto [v1, e1] = ellipsoid_volume_and_eccentricity(J);
    auto [v2, e2] = ellipsoid_volume_and_eccentricity(Q * J);
    CHECK(v2 == doctest::Approx(v1).epsilon(1e-9));
    CHECK(e2 == doctest::Approx(e1).epsilon(1e-9));
    CHECK(e1 >= 1.0);
    CHECK(v1 > 0.0);
  }
}

TEST_CASE("mobility factor normalization point") {
  LegGeometry geom;
  JointConfig q;
  q.q = Vec3(-0.1, 0.7, -1.3);
  const Mat3 J = jacobian(q, geom);
  auto [V, E] = ellipsoid_volume_and_eccentricity(J);
  MobilityWeights w;
  w.beta = 1;
  w.gamma = 4;
  w.v_range = V;
  w.e_range = E;
  CHECK(mobility_factor(q, geom, w) == doctest::Approx(-3.0));
  w.gamma = 0;
  CHECK(mobility_factor(q, geom, w) == doctest::Approx(1.0));
}

TEST_CASE("mobility calibration frozen values") {
  LegGeometry geom;
  WorkspaceGrid grid;
  const MobilityCalibration cal = find_max_mobility_offset(geom, 1.0, 4.0,
                                                           grid);
  CHECK(cal.argmax.isApprox(Vec3(0, 0, -0.55), 1e-9));
  CHECK(cal.peak == doctest::Approx(0.42276).epsilon(1e-3));
  CHECK(cal.weights.v_range == doctest::Approx(160.085).epsilon(1e-3));
  CHECK(cal.weights.e_range == doctest::Approx(38.7986).epsilon(1e-3));
  CHECK(cal.evaluated_nodes == 486);
}

TEST_CASE("grid refinement keeps the argmax cell") {
  LegGeometry geom;
  WorkspaceGrid coarse;
  coarse.resolution = 0.04;
  WorkspaceGrid fine;
  fine.resolution = 0.01;
  const auto c = find_max_mobility_offset(geom, 1.0, 4.0, coarse);
  const auto f = find_max_mobility_offset(geom, 1.0, 4.0, fine);
  CHECK((c.argmax - f.argmax).lpNorm<Eigen::Infinity>() <=
        coarse.resolution + 1e-12);
}

TEST_CASE("argmax x component vanishes by mirror symmetry") {
  LegGeometry geom;
  WorkspaceGrid grid;
  const auto cal = find_max_mobility_offset(geom, 1.0, 4.0, grid);
  CHECK(cal.argmax.x() == doctest::Approx(0.0));
}
