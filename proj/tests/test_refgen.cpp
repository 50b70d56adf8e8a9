#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qmpc/refgen.hpp"
#include "qmpc/srbd.hpp"

using namespace qmpc;

namespace {

State standing_state() {
  State x;
  x.p_c = Vec3(0, 0, 0.55);
  return x;
}

std::array<Vec3, kNumLegs> standing_feet(const RobotModel& model) {
  std::array<Vec3, kNumLegs> feet;
  for (int i = 0; i < kNumLegs; ++i)
    feet[i] = Vec3(model.hip_offsets[i].x(), model.hip_offsets[i].y(), 0.0);
  return feet;
}

}  // namespace

TEST_CASE("contact flag follows the crawling schedule") {
  CHECK(contact_flag(0.00, 0.05, 0.85) == true);
  CHECK(contact_flag(0.10, 0.05, 0.85) == false);  // swing window (0.05,0.20)
  CHECK(contact_flag(0.25, 0.05, 0.85) == true);
  CHECK(contact_flag(0.199, 0.05, 0.85) == false);
  CHECK(contact_flag(0.201, 0.05, 0.85) == true);
}

TEST_CASE("stance fraction over a cycle equals the duty factor") {
  GaitSpec spec;
  spec.cycle_time = 8.0;
  const int n = spec.ticks();
  for (int leg = 0; leg < kNumLegs; ++leg) {
    int stance = 0;
    for (int c = 0; c < n; ++c) {
      const double s = static_cast<double>(c) / n;
      stance += contact_flag(s, spec.offsets[leg], spec.duty[leg]) ? 1 : 0;
    }
    CHECK(std::abs(static_cast<double>(stance) / n - spec.duty[leg]) <
          2.0 / n);
  }
}

TEST_CASE("resync is a no-op on consistent contact flags") {
  GaitSpec spec;
  GaitState gait;
  gait.counter = 17;
  const double s = gait.phase(spec);
  std::array<bool, kNumLegs> planned{}, measured{};
  for (int i = 0; i < kNumLegs; ++i)
    planned[i] = measured[i] =
        contact_flag(s, spec.offsets[i], spec.duty[i]);
  const GaitState out = resync_gait(gait, spec, planned, measured);
  CHECK(out.counter == gait.counter);
}

TEST_CASE("premature touchdown fast-forwards to the stance tick") {
  GaitSpec spec;
  spec.cycle_time = 8.0;  // 200 ticks
  const int n = spec.ticks();
  GaitState gait;
  gait.counter = 36;  // s = 0.18, leg 0 late in its swing window (0.05..0.20)
  std::array<bool, kNumLegs> planned{}, measured{};
  const double s = gait.phase(spec);
  for (int i = 0; i < kNumLegs; ++i)
    planned[i] = contact_flag(s, spec.offsets[i], spec.duty[i]);
  REQUIRE(planned[0] == false);
  measured = planned;
  measured[0] = true;  // early contact near the planned touchdown
  const GaitState out = resync_gait(gait, spec, planned, measured);
  // Stance resumes at the first tick past the swing window (s = 0.205).
  CHECK(out.phase(spec) == doctest::Approx(0.205).epsilon(1e-9));
  CHECK(out.counter - gait.counter == 5);

  // Early in the swing window the same mismatch is a lift-off still in
  // progress and must not advance the schedule.
  gait.counter = n / 10;  // s = 0.10
  const GaitState keep = resync_gait(gait, spec, planned, measured);
  CHECK(keep.counter == gait.counter);
}

TEST_CASE("delayed touchdown freezes the stride phase") {
  GaitSpec spec;
  spec.cycle_time = 8.0;
  const int n = spec.ticks();
  GaitState gait;
  gait.counter = n / 5 + 1;  // s = 0.205: leg 0 stance just (re)started
  std::array<bool, kNumLegs> planned{}, measured{};
  const double s = gait.phase(spec);
  for (int i = 0; i < kNumLegs; ++i)
    planned[i] = contact_flag(s, spec.offsets[i], spec.duty[i]);
  REQUIRE(planned[0] == true);
  measured = planned;
  measured[0] = false;  // foot still in the air
  const GaitState once = resync_gait(gait, spec, planned, measured);
  CHECK(once.phase(spec) < gait.phase(spec));
  const GaitState twice = resync_gait(once, spec, planned, measured);
  CHECK(twice.counter == once.counter);
}

TEST_CASE("touchdown point arithmetic") {
  const HeightMap2_5D map = build_flat(6.0, 4.0, 0.04);
  UserCommand cmd;
  cmd.v_xy = Vec2(0.1, 0);
  const Vec3 p_bh(0.37, 0.21, 0);
  const Vec3 td =
      touchdown_point(Vec2(0.37, 0.21), cmd, 1.2, 0.5, p_bh, map);
  CHECK(td.x() == doctest::Approx(0.37 + 0.06));
  CHECK(td.y() == doctest::Approx(0.21));
  CHECK(td.z() == doctest::Approx(0.0));

  // Zero command lands under the hip.
  const Vec3 td0 = touchdown_point(Vec2(0.3, -0.2), UserCommand{}, 1.2, 0.5,
                                   p_bh, map);
  CHECK(td0.head<2>().isApprox(Vec2(0.3, -0.2), 1e-12));

  // Yaw rate adds the omega x p_bh contribution.
  UserCommand turn;
  turn.yaw_rate = 0.3;
  const Vec3 tdy =
      touchdown_point(Vec2(0.37, 0.21), turn, 1.2, 0.5, p_bh, map);
  const Vec2 expect = Vec2(0.37, 0.21) +
                      0.5 * 1.2 * Vec2(-0.3 * 0.21, 0.3 * 0.37);
  CHECK(tdy.head<2>().isApprox(expect, 1e-9));
}

TEST_CASE("touchdown point on a pallet picks up the plateau height") {
  PalletSpec spec;
  spec.start_x = 1.0;
  spec.lengths = {1.0};
  spec.heights = {0.13};
  const HeightMap2_5D map = build_pallets(spec, 8.0, 2.0, 0.04);
  const Vec3 td = touchdown_point(Vec2(1.5, 0.0), UserCommand{}, 1.0, 0.5,
                                  Vec3(0.37, 0.21, 0), map);
  CHECK(td.z() == doctest::Approx(0.13));
}

TEST_CASE("touchdown outside the map raises OutOfMap") {
  const HeightMap2_5D map = build_flat(2.0, 2.0, 0.04);
  CHECK_THROWS_AS(touchdown_point(Vec2(50.0, 0.0), UserCommand{}, 1.0, 0.5,
                                  Vec3::Zero(), map),
                  OutOfMap);
}

TEST_CASE("foothold adjustment keeps clear of pallet edges") {
  FootholdRule rule;
  // Flat patch: identity.
  const HeightMap2_5D flat = build_flat(1.0, 1.0, 0.04);
  const Vec3 p(0.1, 0.05, 0.0);
  CHECK(adjust_foothold(p, flat, rule).isApprox(p, 1e-12));

  // Step edge at x = 0: a point just before the edge moves away from it.
  HeightMap2_5D step(Vec2(-0.3, -0.3), 0.04, 16, 16);
  for (int i = 0; i < 16; ++i)
    for (int j = 0; j < 16; ++j)
      step.at(i, j) = (-0.3 + 0.04 * i) >= 0.0 ? 0.13 : 0.0;
  const Vec3 risky(-0.02, 0.0, 0.0);
  const Vec3 moved = adjust_foothold(risky, step, rule);
  CHECK(std::abs(moved.x()) >= rule.safety_margin - 1e-9);

  // Fully fractured patch: no safe cell anywhere.
  HeightMap2_5D frac(Vec2(-0.3, -0.3), 0.04, 16, 16);
  for (int i = 0; i < 16; ++i)
    for (int j = 0; j < 16; ++j) frac.at(i, j) = ((i + j) % 2) * 0.2;
  CHECK_THROWS_AS(adjust_foothold(risky, frac, rule), NoSafeCell);
}

TEST_CASE("generated hover references split gravity evenly") {
  RobotModel model;
  OcpConfig ocp;
  RefGenConfig rcfg;
  const HeightMap2_5D map = build_flat(8.0, 4.0, 0.04);
  const ReferenceTrajectory refs =
      generate(standing_state(), standing_feet(model), UserCommand{},
               GaitState{}, map, rcfg, ocp, model);
  REQUIRE((int)refs.x_ref.size() == ocp.N + 1);
  REQUIRE((int)refs.u_ref.size() == ocp.N);

  const double mg = model.mass * 9.81;
  for (int k = 0; k < ocp.N; ++k) {
    const auto& a = refs.params[k];
    double sum = 0;
    for (int i = 0; i < kNumLegs; ++i) {
      if (a.delta[i]) {
        sum += refs.u_ref[k].forces[i].z();
        CHECK(refs.u_ref[k].forces[i].z() ==
              doctest::Approx(mg / a.num_stance()));
      } else {
        CHECK(refs.u_ref[k].forces[i].norm() == doctest::Approx(0.0));
      }
      CHECK(a.normals[i].norm() == doctest::Approx(1.0));
    }
    CHECK(sum == doctest::Approx(mg));  // exact gravity split
    int stance_leg = 0;
    while (!a.delta[stance_leg]) ++stance_leg;
    if (a.num_stance() == 4)
      CHECK(refs.u_ref[k].forces[stance_leg].z() ==
            doctest::Approx(214.4).epsilon(1e-3));
    if (a.num_stance() == 3)
      CHECK(refs.u_ref[k].forces[stance_leg].z() ==
            doctest::Approx(285.8).epsilon(1e-3));
  }
  // XY/yaw hold with zero command; z/roll/pitch references are zero.
  for (const State& xr : refs.x_ref) {
    CHECK(xr.p_c.head<2>().norm() == doctest::Approx(0.0));
    CHECK(xr.p_c.z() == doctest::Approx(0.0));
    CHECK(xr.Phi.head<2>().norm() == doctest::Approx(0.0));
  }
}

TEST_CASE("velocity command integrates the xy reference") {
  RobotModel model;
  OcpConfig ocp;
  RefGenConfig rcfg;
  const HeightMap2_5D map = build_flat(8.0, 4.0, 0.04);
  UserCommand cmd;
  cmd.v_xy = Vec2(0.1, 0);
  const ReferenceTrajectory refs =
      generate(standing_state(), standing_feet(model), cmd, GaitState{}, map,
               rcfg, ocp, model);
  for (int k = 0; k + 1 <= ocp.N; ++k) {
    CHECK(refs.x_ref[k + 1].p_c.x() - refs.x_ref[k].p_c.x() ==
          doctest::Approx(0.004).epsilon(1e-9));
    CHECK(refs.x_ref[k].v_c.x() == doctest::Approx(0.1));
  }
}

TEST_CASE("yaw reference integrates the commanded rate exactly") {
  RobotModel model;
  OcpConfig ocp;
  RefGenConfig rcfg;
  const HeightMap2_5D map = build_flat(8.0, 4.0, 0.04);
  UserCommand cmd;
  cmd.yaw_rate = 0.3;
  const ReferenceTrajectory refs =
      generate(standing_state(), standing_feet(model), cmd, GaitState{}, map,
               rcfg, ocp, model);
  for (int k = 0; k <= ocp.N; ++k) {
    CHECK(refs.x_ref[k].Phi.z() ==
          doctest::Approx(k * ocp.Ts * 0.3).epsilon(1e-9));
    if (k < ocp.N)
      CHECK(refs.params[k].delta == refs.params[k].delta);  // well-formed
  }
  for (int k = 0; k < ocp.N; ++k)
    CHECK(refs.x_ref[k].omega_body.z() == doctest::Approx(0.3).epsilon(1e-6));
}

TEST_CASE("foot references are piecewise constant with lift-off updates") {
  RobotModel model;
  OcpConfig ocp;
  RefGenConfig rcfg;
  rcfg.gait.cycle_time = 8.0;
  const HeightMap2_5D map = build_flat(8.0, 4.0, 0.04);
  UserCommand cmd;
  cmd.v_xy = Vec2(0.1, 0);
  const ReferenceTrajectory refs =
      generate(standing_state(), standing_feet(model), cmd, GaitState{}, map,
               rcfg, ocp, model);
  for (int i = 0; i < kNumLegs; ++i) {
    for (int k = 0; k + 1 < ocp.N; ++k) {
      const bool liftoff =
          refs.params[k].delta[i] && !refs.params[k + 1].delta[i];
      const double jump =
          (refs.params[k + 1].foot_pos[i] - refs.params[k].foot_pos[i])
              .norm();
      if (!liftoff) CHECK(jump == doctest::Approx(0.0));
    }
  }
  // The schedule in the first 2 s horizon must contain a lift-off for the
  // first-swinging leg, whose foothold then moves forward.
  bool saw_update = false;
  for (int k = 0; k + 1 < ocp.N; ++k)
    if ((refs.params[k + 1].foot_pos[0] - refs.params[k].foot_pos[0])
            .norm() > 1e-9) {
      saw_update = true;
      CHECK(refs.params[k + 1].foot_pos[0].x() >
            refs.params[k].foot_pos[0].x());
    }
  CHECK(saw_update);
}
