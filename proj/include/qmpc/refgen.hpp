#pragma once

#include "qmpc/ocp.hpp"
#include "qmpc/terrain.hpp"

namespace qmpc {

struct UserCommand {
  Vec2 v_xy = Vec2::Zero();  // horizontal-frame longitudinal/lateral velocity
  double yaw_rate = 0;
};

struct GaitSpec {
  double cycle_time = 8.0;  // crawl default; walking scenarios use shorter
  double tick_dt = 0.04;    // schedule quantization (planner sample time)
  std::array<double, kNumLegs> duty = {0.85, 0.85, 0.85, 0.85};
  std::array<double, kNumLegs> offsets = {0.05, 0.30, 0.55, 0.80};
  int ticks() const {
    return static_cast<int>(std::lround(cycle_time / tick_dt));
  }
};

// Sawtooth stride phase, stored as a tick counter into the schedule so that
// resynchronization is exact index arithmetic.
struct GaitState {
  long counter = 0;
  double phase(const GaitSpec& spec) const {
    const int n = spec.ticks();
    long c = counter % n;
    if (c < 0) c += n;
    return static_cast<double>(c) / n;
  }
};

struct FootholdRule {
  int patch_cells = 15;
  double patch_resolution = 0.04;
  double discontinuity_jump = 0.05;  // cell-to-cell height step that is unsafe
  double safety_margin = 0.08;       // keep-out distance from discontinuities
};

struct RefGenConfig {
  GaitSpec gait;
  double alpha = 0.5;  // feedback gain of the stepping heuristic
  bool adjust_footholds = true;
  FootholdRule foothold;
  double v_xy_max = 0.5;
  double yaw_rate_max = 0.6;
};

// delta_i = 1 iff s < o_i or s > o_i + (1 - D_i).
bool contact_flag(double s, double offset, double duty);

// Reconciles planned and measured contact: premature touchdown of a swing leg
// fast-forwards the counter to the next stance tick of that leg; a missing
// touchdown at stance begin holds the counter just before it.
GaitState resync_gait(const GaitState& gait, const GaitSpec& spec,
                      const std::array<bool, kNumLegs>& planned_delta,
                      const std::array<bool, kNumLegs>& measured_contact);

// Robocentric touchdown point: hip position plus half the distance covered by
// the commanded twist during the swing, with z looked up from the terrain.
// p_bh is the hip offset expressed in the horizontal frame.
Vec3 touchdown_point(const Vec2& hip_xy, const UserCommand& cmd, double t_swing,
                     double alpha, const Vec3& p_bh, const HeightMap2_5D& map);

// Rule-based foothold correction: moves a touchdown point that lies within
// the safety margin of a height discontinuity to the nearest safe cell.
Vec3 adjust_foothold(const Vec3& p_td, const HeightMap2_5D& patch,
                     const FootholdRule& rule);

// Extracts the square sampling patch around xy from the full map.
HeightMap2_5D extract_patch(const HeightMap2_5D& map, const Vec2& xy,
                            const FootholdRule& rule);

// Builds the full N-stage reference: integrated XY/yaw state references,
// gravity-splitting force references, contact schedule, held foot positions
// with touchdown insertion at lift-off triggers, and terrain normals.
ReferenceTrajectory generate(const State& state,
                             const std::array<Vec3, kNumLegs>& current_feet,
                             const UserCommand& cmd, const GaitState& gait,
                             const HeightMap2_5D& map, const RefGenConfig& rcfg,
                             const OcpConfig& cfg, const RobotModel& model);

}  // namespace qmpc
