#include "qmpc/refgen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qmpc {
namespace {

double wrap_unit(double s) {
  double r = std::fmod(s, 1.0);
  return r < 0 ? r + 1.0 : r;
}

// First tick index in [0, ticks) at which the leg is in stance, searching
// forward from `from` (inclusive, modulo the cycle).
long next_stance_tick(const GaitSpec& spec, int leg, long from) {
  const int n = spec.ticks();
  for (int j = 0; j < n; ++j) {
    const long c = from + j;
    const double s = wrap_unit(static_cast<double>(c % n) / n);
    if (contact_flag(s, spec.offsets[leg], spec.duty[leg])) return c;
  }
  return from;
}

}  // namespace

bool contact_flag(double s, double offset, double duty) {
  return s < offset || s > offset + (1.0 - duty);
}

GaitState resync_gait(const GaitState& gait, const GaitSpec& spec,
                      const std::array<bool, kNumLegs>& planned_delta,
                      const std::array<bool, kNumLegs>& measured_contact) {
  const int n = spec.ticks();
  long hold_counter = std::numeric_limits<long>::max();
  long ff_counter = gait.counter;
  const double s = gait.phase(spec);
  for (int i = 0; i < kNumLegs; ++i) {
    if (planned_delta[i] == measured_contact[i]) continue;
    const double swing_len = 1.0 - spec.duty[i];
    if (swing_len <= 0) continue;
    if (!planned_delta[i] && measured_contact[i]) {
      // Contact while the schedule says swing. Early in the window this is a
      // lift-off still in progress; late in the window it is a premature
      // touchdown and the schedule fast-forwards to the leg's stance.
      const double progress = wrap_unit(s - spec.offsets[i]);
      if (progress > 0.5 * swing_len) {
        ff_counter =
            std::max(ff_counter, next_stance_tick(spec, i, gait.counter));
      }
    } else {
      // No contact while the schedule says stance. Just past the planned
      // touchdown this is a delayed landing: freeze the phase at the last
      // swing tick until contact is made.
      const double past = wrap_unit(s - (spec.offsets[i] + swing_len));
      if (past < 0.5 * swing_len) {
        long c = gait.counter;
        for (int j = 0; j < n; ++j, --c) {
          const double sc =
              wrap_unit(static_cast<double>(((c % n) + n) % n) / n);
          if (!contact_flag(sc, spec.offsets[i], spec.duty[i])) break;
        }
        hold_counter = std::min(hold_counter, c);
      }
    }
  }
  GaitState out = gait;
  if (hold_counter != std::numeric_limits<long>::max()) {
    out.counter = hold_counter;  // hold wins over fast-forward
  } else {
    out.counter = ff_counter;
  }
  return out;
}

Vec3 touchdown_point(const Vec2& hip_xy, const UserCommand& cmd, double t_swing,
                     double alpha, const Vec3& p_bh,
                     const HeightMap2_5D& map) {
  if (t_swing <= 0) throw InvalidSpec("touchdown_point requires t_swing > 0");
  const Vec3 omega(0, 0, cmd.yaw_rate);
  const Vec3 twist = Vec3(cmd.v_xy.x(), cmd.v_xy.y(), 0) + omega.cross(p_bh);
  const Vec2 xy = hip_xy + t_swing * alpha * twist.head<2>();
  return Vec3(xy.x(), xy.y(), map.height_at(xy));
}

HeightMap2_5D extract_patch(const HeightMap2_5D& map, const Vec2& xy,
                            const FootholdRule& rule) {
  const int n = rule.patch_cells;
  const double res = rule.patch_resolution;
  const Vec2 origin = xy - Vec2::Constant(0.5 * (n - 1) * res);
  HeightMap2_5D patch(origin, res, n, n);
  for (int ix = 0; ix < n; ++ix) {
    for (int iy = 0; iy < n; ++iy) {
      patch.at(ix, iy) = map.height_at(origin + res * Vec2(ix, iy));
    }
  }
  return patch;
}

Vec3 adjust_foothold(const Vec3& p_td, const HeightMap2_5D& patch,
                     const FootholdRule& rule) {
  const int nx = patch.nx(), ny = patch.ny();
  const double res = patch.resolution();
  auto center = [&](int ix, int iy) {
    return Vec2(patch.origin() + res * Vec2(ix, iy));
  };
  // Midpoints of cell pairs whose height jump exceeds the threshold.
  std::vector<Vec2> edges;
  for (int ix = 0; ix < nx; ++ix) {
    for (int iy = 0; iy < ny; ++iy) {
      const double h = patch.at(ix, iy);
      if (ix + 1 < nx &&
          std::abs(patch.at(ix + 1, iy) - h) > rule.discontinuity_jump) {
        edges.push_back(center(ix, iy) + Vec2(0.5 * res, 0));
      }
      if (iy + 1 < ny &&
          std::abs(patch.at(ix, iy + 1) - h) > rule.discontinuity_jump) {
        edges.push_back(center(ix, iy) + Vec2(0, 0.5 * res));
      }
    }
  }
  if (edges.empty()) return p_td;

  auto edge_distance = [&](const Vec2& xy) {
    double d = std::numeric_limits<double>::infinity();
    for (const Vec2& e : edges) d = std::min(d, (xy - e).norm());
    return d;
  };
  if (edge_distance(p_td.head<2>()) >= rule.safety_margin) return p_td;

  double best = std::numeric_limits<double>::infinity();
  Vec2 best_xy = Vec2::Zero();
  bool found = false;
  for (int ix = 0; ix < nx; ++ix) {
    for (int iy = 0; iy < ny; ++iy) {
      const Vec2 c = center(ix, iy);
      if (edge_distance(c) < rule.safety_margin) continue;
      const double d = (c - p_td.head<2>()).norm();
      if (d < best) {
        best = d;
        best_xy = c;
        found = true;
      }
    }
  }
  if (!found) throw NoSafeCell("no cell clears the discontinuity margin");
  return Vec3(best_xy.x(), best_xy.y(), patch.height_at(best_xy));
}

ReferenceTrajectory generate(const State& state,
                             const std::array<Vec3, kNumLegs>& current_feet,
                             const UserCommand& cmd, const GaitState& gait,
                             const HeightMap2_5D& map, const RefGenConfig& rcfg,
                             const OcpConfig& cfg, const RobotModel& model) {
  const int N = cfg.N;
  const double Ts = cfg.Ts;
  const GaitSpec& gs = rcfg.gait;

  UserCommand c = cmd;
  if (c.v_xy.norm() > rcfg.v_xy_max) c.v_xy *= rcfg.v_xy_max / c.v_xy.norm();
  c.yaw_rate = std::clamp(c.yaw_rate, -rcfg.yaw_rate_max, rcfg.yaw_rate_max);

  ReferenceTrajectory refs;
  refs.x_ref.resize(N + 1);
  refs.u_ref.resize(N);
  refs.params.resize(N);

  // Contact schedule over the horizon (one extra stage for lift-off triggers).
  const double s0 = gait.phase(gs);
  std::vector<std::array<bool, kNumLegs>> delta(N + 1);
  for (int k = 0; k <= N; ++k) {
    const double s = wrap_unit(s0 + k * Ts / gs.cycle_time);
    for (int i = 0; i < kNumLegs; ++i) {
      delta[k][i] = contact_flag(s, gs.offsets[i], gs.duty[i]);
    }
  }

  // XY/yaw state references by explicit Euler; z, roll and pitch are not
  // tracked and referenced at zero.
  double yaw = state.Phi.z();
  Vec2 xy = state.p_c.head<2>();
  for (int k = 0; k <= N; ++k) {
    State& xr = refs.x_ref[k];
    xr.p_c = Vec3(xy.x(), xy.y(), 0);
    xr.Phi = Vec3(0, 0, yaw);
    const double cy = std::cos(yaw), sy = std::sin(yaw);
    xr.v_c = Vec3(cy * c.v_xy.x() - sy * c.v_xy.y(),
                  sy * c.v_xy.x() + cy * c.v_xy.y(), 0);
    xr.omega_body = Vec3(0, 0, c.yaw_rate);
    xy += Ts * xr.v_c.head<2>();
    yaw += Ts * c.yaw_rate;
  }

  // Foot positions held between lift-offs; a lift-off trigger inserts the
  // robocentric touchdown point for all later stages of this horizon.
  std::array<Vec3, kNumLegs> feet = current_feet;
  const double g = -model.gravity.z();
  for (int k = 0; k < N; ++k) {
    StageParams& a = refs.params[k];
    a.delta = delta[k];
    a.foot_pos = feet;
    for (int i = 0; i < kNumLegs; ++i) {
      a.normals[i] = map.contains(feet[i].head<2>())
                         ? map.normal_at(feet[i].head<2>())
                         : Vec3(0, 0, 1);
    }
    const int n_stance = a.num_stance();
    Control& ur = refs.u_ref[k];
    for (int i = 0; i < kNumLegs; ++i) {
      ur.forces[i] = a.delta[i] && n_stance > 0
                         ? Vec3(0, 0, model.mass * g / n_stance)
                         : Vec3::Zero();
    }
    for (int i = 0; i < kNumLegs; ++i) {
      if (!(delta[k][i] && !delta[k + 1][i])) continue;  // lift-off trigger
      // Find the landing stage to place the touchdown under the future hip.
      int k_td = k + 1;
      while (k_td <= N && !delta[std::min(k_td, N)][i]) ++k_td;
      const State& xr = refs.x_ref[std::min(k_td, N)];
      const double cy = std::cos(xr.Phi.z()), sy = std::sin(xr.Phi.z());
      // Step target under the hip shifted by the nominal hip-to-foot lateral
      // offset, so held feet agree with the mobility reference stance width.
      const Vec3 hb = model.com_to_base + model.hip_offsets[i] +
                      Vec3(0, refs.p_hf_ref[i].y(), 0);
      const Vec3 p_bh(cy * hb.x() - sy * hb.y(), sy * hb.x() + cy * hb.y(),
                      hb.z());
      const Vec2 hip_xy = xr.p_c.head<2>() + p_bh.head<2>();
      const double t_swing = (1.0 - gs.duty[i]) * gs.cycle_time;
      if (t_swing <= 0) continue;  // degenerate schedule: leg never swings
      Vec3 td = touchdown_point(hip_xy, c, t_swing, rcfg.alpha, p_bh, map);
      if (rcfg.adjust_footholds) {
        try {
          td = adjust_foothold(td, extract_patch(map, td.head<2>(), rcfg.foothold),
                               rcfg.foothold);
        } catch (const NoSafeCell&) {
          // keep the nominal touchdown
        } catch (const OutOfMap&) {
          // patch extends past the map; keep the nominal touchdown
        }
      }
      feet[i] = td;
    }
  }
  return refs;
}

}  // namespace qmpc
