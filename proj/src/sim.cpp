#include "qmpc/sim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <sstream>

#include <json.hpp>

#include "qmpc/srbd.hpp"

namespace qmpc {
namespace {

using OrderedJson = nlohmann::ordered_json;

Vec3 hip_world(const State& x, const RobotModel& model, int leg) {
  return x.p_c + rotation_matrix(x.Phi) *
                     (model.com_to_base + model.hip_offsets[leg]);
}

double nose_up_angle(const State& x) {
  const Mat3 R = rotation_matrix(x.Phi);
  return std::asin(std::clamp(R(2, 0), -1.0, 1.0));
}

UserCommand command_at(const SimConfig& cfg, double t) {
  UserCommand cmd;
  for (const CommandSegment& seg : cfg.commands) {
    if (t >= seg.start) cmd = seg.cmd;
  }
  return cmd;
}

Vec3 disturbance_at(const SimConfig& cfg, double t) {
  Vec3 f = Vec3::Zero();
  for (const Disturbance& d : cfg.disturbances) {
    if (t >= d.start && t < d.start + d.duration) f += d.force;
  }
  return f;
}

// Tangential-over-normal utilization and worst pyramid-row residual of the
// applied forces against the true surface cones.
void cone_metrics(const Control& u, const StageParams& a, double mu,
                  double fz_max, double& utilization, double& residual) {
  utilization = 0;
  residual = std::numeric_limits<double>::infinity();
  bool any = false;
  for (int i = 0; i < kNumLegs; ++i) {
    if (!a.delta[i]) continue;
    any = true;
    const Mat3 T = contact_frame(a.normals[i]).transpose();
    const Vec3 f = u.forces[i];
    const double fn = T.row(2).dot(f);
    const double ftx = T.row(0).dot(f), fty = T.row(1).dot(f);
    // The direction of a near-zero contact force is meaningless; utilization
    // is only scored for forces above ~0.5% of body weight.
    if (fn > 5.0) {
      utilization =
          std::max(utilization, std::max(std::abs(ftx), std::abs(fty)) / fn);
    }
    residual = std::min({residual, mu * fn - std::abs(ftx),
                         mu * fn - std::abs(fty), fn, fz_max - fn});
  }
  if (!any) residual = 0;
}

struct LegSim {
  bool stance = true;
  Vec3 foot = Vec3::Zero();
  SwingSpec swing;
  double swing_start = 0;
};

}  // namespace

HeightMap2_5D build_scenario_map(const SimConfig& cfg) {
  switch (cfg.scenario) {
    case Scenario::Flat:
      return build_flat(cfg.map_x_span, cfg.map_y_span, cfg.map_resolution);
    case Scenario::Pallets:
      return build_pallets(cfg.pallets, cfg.map_x_span, cfg.map_y_span,
                           cfg.map_resolution);
    case Scenario::Chimney:
      return build_chimney(cfg.chimney, cfg.map_x_span, cfg.map_y_span,
                           cfg.map_resolution);
    case Scenario::Rough:
      return build_rough(cfg.rough, cfg.map_x_span, cfg.map_y_span,
                         cfg.map_resolution);
  }
  throw ScenarioError("unknown scenario");
}

RunLog run(const SimConfig& cfg) {
  if (cfg.duration <= 0 || cfg.wbc_hz <= 0 || cfg.planner_hz <= 0) {
    throw ScenarioError("duration and rates must be positive");
  }
  const HeightMap2_5D map = build_scenario_map(cfg);

  OcpConfig ocp = cfg.ocp;
  for (int i = 0; i < kNumLegs; ++i) ocp.R(3 * i + 2) *= cfg.rz_weight_scale;

  RobotModel plant = cfg.model;
  plant.mass *= cfg.plant_mass_scale;
  plant.inertia_com *= cfg.plant_inertia_scale;

  const double dt = 1.0 / cfg.wbc_hz;
  const int total_ticks = static_cast<int>(std::lround(cfg.duration / dt));
  const int plan_every =
      std::max(1, static_cast<int>(std::lround(cfg.wbc_hz / cfg.planner_hz)));
  const GaitSpec& gs = cfg.refgen.gait;
  const double reach = cfg.leg.l_upper + cfg.leg.l_lower;

  IntegratorConfig plant_icfg;
  plant_icfg.scheme = Scheme::Rk4;
  plant_icfg.step = dt;

  // Initial state and feet: standing at the local terrain height.
  State x;
  x.p_c = Vec3(0, 0, map.height_at(Vec2(0, 0)) + cfg.initial_height);
  const ReferenceTrajectory nominal;  // for the hip-to-foot stance offsets
  std::array<LegSim, kNumLegs> legs;
  for (int i = 0; i < kNumLegs; ++i) {
    const Vec3 h = hip_world(x, cfg.model, i) +
                   Vec3(0, nominal.p_hf_ref[i].y(), 0);
    legs[i].foot = Vec3(h.x(), h.y(), map.height_at(h.head<2>()));
  }

  RtiController rti(ocp, cfg.model, cfg.integrator, cfg.qp);
  GaitState gait;
  Trajectory plan;
  ReferenceTrajectory plan_refs;
  double plan_time = 0;
  bool have_plan = false;
  Control u_applied;
  for (auto& f : u_applied.forces) f.setZero();

  std::future<void> prep_job;  // threaded mode: preparation in flight
  ReferenceTrajectory pending_refs;

  RunLog log;
  log.summary.min_zmp_margin = std::numeric_limits<double>::infinity();
  log.summary.min_cone_residual = std::numeric_limits<double>::infinity();
  double vel_err_sq = 0;
  int vel_samples = 0;
  bool slipping = false;

  auto fail = [&](double t, const std::string& why) {
    log.summary.completed = false;
    log.summary.failure_reason = why;
    log.summary.failure_time = t;
    log.summary.sim_duration = t;
  };

  int tick = 0;
  bool failed = false;
  for (; tick < total_ticks && !failed; ++tick) {
    const double t = tick * dt;
    const UserCommand cmd = command_at(cfg, t);

    // ---- swing/stance state machine ------------------------------------
    // Runs before the planner so lift-offs scheduled for this instant are
    // already reflected in the measured contact flags.
    const double s_now = std::fmod(t / gs.cycle_time, 1.0);
    for (int i = 0; i < kNumLegs; ++i) {
      const bool want_stance = contact_flag(s_now, gs.offsets[i], gs.duty[i]);
      LegSim& leg = legs[i];
      if (leg.stance && !want_stance &&
          (1.0 - gs.duty[i]) * gs.cycle_time > 0) {
        // Lift-off: fly toward the planner's foothold for this leg (the last
        // horizon stage holds the next touchdown point).
        leg.stance = false;
        leg.swing_start = t;
        leg.swing.liftoff = leg.foot;
        leg.swing.duration = (1.0 - gs.duty[i]) * gs.cycle_time;
        leg.swing.touchdown = plan_refs.params.empty()
                                  ? leg.foot
                                  : plan_refs.params.back().foot_pos[i];
        if ((leg.swing.touchdown - leg.foot).head<2>().norm() < 1e-9) {
          // Reference did not move the foothold (e.g. stale plan): use the
          // robocentric rule directly.
          try {
            const Vec3 off(0, nominal.p_hf_ref[i].y(), 0);
            const Vec3 h = hip_world(x, cfg.model, i) + off;
            leg.swing.touchdown = touchdown_point(
                h.head<2>(), cmd, leg.swing.duration, cfg.refgen.alpha,
                rotation_matrix(x.Phi) *
                    (cfg.model.com_to_base + cfg.model.hip_offsets[i] + off),
                map);
          } catch (const OutOfMap&) {
            leg.swing.touchdown = leg.foot;
          }
        }
      }
      if (!leg.stance) {
        const double t_sw = t - leg.swing_start;
        const auto [pos, vel] = swing_position(leg.swing, t_sw);
        leg.foot = pos;
        double ground = -std::numeric_limits<double>::infinity();
        if (map.contains(pos.head<2>())) ground = map.height_at(pos.head<2>());
        const bool premature = t_sw > 0.5 * leg.swing.duration &&
                               pos.z() <= ground + 1e-4;
        if (want_stance || t_sw >= leg.swing.duration || premature) {
          leg.stance = true;
          leg.foot.z() = std::max(ground, leg.swing.touchdown.z());
        }
      }
    }

    // ---- planner cycle -------------------------------------------------
    if (tick % plan_every == 0) {
      // Keep the stride phase on real time regardless of the planning rate.
      gait.counter = std::lround(t / gs.tick_dt);
      const double s = gait.phase(gs);
      std::array<bool, kNumLegs> planned{}, measured{};
      for (int i = 0; i < kNumLegs; ++i) {
        planned[i] = contact_flag(s, gs.offsets[i], gs.duty[i]);
        measured[i] = legs[i].stance;
      }
      gait = resync_gait(gait, gs, planned, measured);

      PlannerTick pt;
      pt.t = t;
      try {
        std::array<Vec3, kNumLegs> feet;
        for (int i = 0; i < kNumLegs; ++i) feet[i] = legs[i].foot;
        if (cfg.threaded && prep_job.valid()) {
          prep_job.get();  // preparation ran during the previous cycle
          plan_refs = pending_refs;
        } else {
          plan_refs =
              generate(x, feet, cmd, gait, map, cfg.refgen, ocp, cfg.model);
          rti.prepare(plan_refs);
        }
        plan = rti.feedback(x);
        plan_time = t;
        have_plan = true;
        pt.solved = true;
        pt.step_norm = rti.last_step_norm();
        if (cfg.threaded) {
          // Prepare the next cycle from the one-step prediction while the
          // control sub-steps of this cycle run.
          GaitState next_gait;
          next_gait.counter = std::lround((t + plan_every * dt) / gs.tick_dt);
          const State x_pred = plan.x[1];
          prep_job = std::async(
              std::launch::async,
              [&rti, &pending_refs, x_pred, feet, cmd, next_gait, &map, &cfg,
               ocp]() {
                pending_refs = generate(x_pred, feet, cmd, next_gait, map,
                                        cfg.refgen, ocp, cfg.model);
                rti.prepare(pending_refs);
              });
        }
      } catch (const OutOfMap&) {
        fail(t, "reference generation left the map");
        failed = true;
      } catch (const MaxIterations&) {
        ++log.summary.qp_failures;  // hold the previous plan
      } catch (const InfeasibleQp&) {
        ++log.summary.qp_failures;
      }
      pt.prep_ms = rti.preparation_ms();
      pt.feedback_ms = rti.feedback_ms();
      if (have_plan) pt.plan_pitch = nose_up_angle(plan.x[1]);
      log.planner_ticks.push_back(pt);
      if (failed) break;
      if (!have_plan) {
        fail(t, "no plan available");
        break;
      }
    }

    // ---- whole-body control sub-step ------------------------------------
    StageParams a;
    for (int i = 0; i < kNumLegs; ++i) {
      a.delta[i] = legs[i].stance;
      a.foot_pos[i] = legs[i].foot;
      a.normals[i] = map.contains(legs[i].foot.head<2>())
                         ? map.normal_at(legs[i].foot.head<2>())
                         : Vec3(0, 0, 1);
    }

    const double elapsed = t - plan_time;
    const int N = ocp.N;
    const int k0 = std::min(static_cast<int>(elapsed / ocp.Ts), N - 1);
    const double frac =
        std::clamp(elapsed / ocp.Ts - k0, 0.0, 1.0);
    const State x_d = State::from_vec(
        plan.x[k0].vec() + frac * (plan.x[k0 + 1].vec() - plan.x[k0].vec()));
    Control u_d = resample_control(plan.u[k0]);
    for (int i = 0; i < kNumLegs; ++i) {
      if (!a.delta[i]) u_d.forces[i].setZero();
    }

    std::array<Vec3, kNumLegs> p_cf;
    for (int i = 0; i < kNumLegs; ++i) p_cf[i] = legs[i].foot - x.p_c;

    if (a.num_stance() > 0) {
      const Vec6 w = feedforward_wrench(u_d, p_cf, a.delta) +
                     feedback_wrench(x_d, x, cfg.gains);
      try {
        u_applied = project_wrench_to_grf(w, p_cf, a, u_d, ocp, cfg.gains);
      } catch (const InfeasibleQp&) {
        ++log.summary.qp_failures;  // hold the previous forces
      }
    } else {
      for (auto& f : u_applied.forces) f.setZero();
    }
    // A stance leg stretched past its kinematic reach cannot transmit force.
    for (int i = 0; i < kNumLegs; ++i) {
      if (a.delta[i] &&
          (legs[i].foot - hip_world(x, cfg.model, i)).norm() > 1.02 * reach) {
        u_applied.forces[i].setZero();
      }
    }

    // ---- metrics ---------------------------------------------------------
    WbcTick wt;
    wt.t = t;
    wt.x = x;
    wt.u = u_applied;
    for (int i = 0; i < kNumLegs; ++i) {
      wt.contact[i] = a.delta[i];
      wt.foot_z[i] = legs[i].foot.z();
    }
    wt.nose_up_angle = nose_up_angle(x);
    double util = 0, resid = 0;
    cone_metrics(u_applied, a, ocp.mu, ocp.fz_max, util, resid);
    wt.cone_utilization = util;
    wt.cone_residual = resid;
    const bool slip_now = util > ocp.mu + 1e-6;
    if (slip_now && !slipping) ++log.summary.slip_events;
    slipping = slip_now;
    try {
      std::vector<Vec3> stance_feet;
      for (int i = 0; i < kNumLegs; ++i) {
        if (a.delta[i]) stance_feet.push_back(legs[i].foot);
      }
      // Stability margin is evaluated on the commanded (planned) GRFs: the
      // projection layer can transiently unload a leg to realize the feedback
      // wrench, but the margin property of interest is the planner's.
      wt.zmp_margin =
          zmp_margin(stance_feet, zmp_from_forces(u_d, a.foot_pos, a.delta));
      log.summary.min_zmp_margin =
          std::min(log.summary.min_zmp_margin, wt.zmp_margin);
    } catch (const DegeneratePolygon&) {
      wt.zmp_margin = std::numeric_limits<double>::quiet_NaN();
    }
    log.summary.max_cone_utilization =
        std::max(log.summary.max_cone_utilization, util);
    log.summary.min_cone_residual =
        std::min(log.summary.min_cone_residual, resid);
    log.summary.max_nose_up =
        std::max(log.summary.max_nose_up, wt.nose_up_angle);
    log.summary.min_nose_up =
        std::min(log.summary.min_nose_up, wt.nose_up_angle);
    if (t > 1.0) {
      const double cy = std::cos(x.Phi.z()), sy = std::sin(x.Phi.z());
      const Vec2 v_cmd_world(cy * cmd.v_xy.x() - sy * cmd.v_xy.y(),
                             sy * cmd.v_xy.x() + cy * cmd.v_xy.y());
      vel_err_sq += (x.v_c.head<2>() - v_cmd_world).squaredNorm();
      ++vel_samples;
    }
    log.wbc_ticks.push_back(wt);

    // ---- plant -----------------------------------------------------------
    Dynamics dyn = srbd_dynamics(a, plant);
    const Vec3 dist = disturbance_at(cfg, t);
    Dynamics disturbed = dyn;
    if (dist.norm() > 0) {
      const double m = plant.mass;
      disturbed.f = [f = dyn.f, dist, m](const Vec12& xv, const Vec12& uv) {
        Vec12 dx = f(xv, uv);
        dx.segment<3>(3) += dist / m;
        return dx;
      };
    }
    try {
      x = State::from_vec(integrate(disturbed, x.vec(), u_applied.vec(),
                                    plant_icfg));
    } catch (const SingularOrientation&) {
      fail(t, "orientation singularity");
      break;
    }

    // ---- failure detection -------------------------------------------------
    const double ground = map.contains(x.p_c.head<2>())
                              ? map.height_at(x.p_c.head<2>())
                              : 0.0;
    if (!x.vec().allFinite()) {
      fail(t, "state diverged");
      break;
    }
    if (std::abs(x.Phi.x()) > 1.2 || std::abs(x.Phi.y()) > 1.2) {
      fail(t, "attitude limit exceeded");
      break;
    }
    if (x.p_c.z() - ground < 0.25) {
      fail(t, "body height collapsed");
      break;
    }
    if (x.p_c.z() - ground > 1.2) {
      fail(t, "body left the ground envelope");
      break;
    }
  }
  if (prep_job.valid()) {
    try {
      prep_job.get();
    } catch (...) {
    }
  }

  RunSummary& s = log.summary;
  if (s.failure_time < 0) {
    s.completed = true;
    s.sim_duration = total_ticks * dt;
  }
  s.velocity_rms = vel_samples > 0 ? std::sqrt(vel_err_sq / vel_samples) : 0;
  if (!std::isfinite(s.min_zmp_margin)) s.min_zmp_margin = 0;
  if (!std::isfinite(s.min_cone_residual)) s.min_cone_residual = 0;
  s.final_x = x.p_c.x();
  s.final_y = x.p_c.y();
  double prep_sum = 0, fb_sum = 0;
  for (const PlannerTick& pt : log.planner_ticks) {
    prep_sum += pt.prep_ms;
    fb_sum += pt.feedback_ms;
    s.max_prep_ms = std::max(s.max_prep_ms, pt.prep_ms);
    s.max_feedback_ms = std::max(s.max_feedback_ms, pt.feedback_ms);
  }
  if (!log.planner_ticks.empty()) {
    s.mean_prep_ms = prep_sum / log.planner_ticks.size();
    s.mean_feedback_ms = fb_sum / log.planner_ticks.size();
  }
  return log;
}

SimConfig apply_ablation(const SimConfig& cfg, AblationToggle toggle) {
  SimConfig out = cfg;
  switch (toggle) {
    case AblationToggle::MobilityCost:
      out.ocp.M.setZero();
      break;
    case AblationToggle::ForceRobustness:
      out.ocp.rho = 0;
      break;
    case AblationToggle::ConeConstraints:
      out.ocp.cone_faces = false;
      break;
    case AblationToggle::ReplanRate:
      out.planner_hz = cfg.ablated_planner_hz;
      break;
  }
  return out;
}

std::pair<RunLog, RunLog> ablate(const SimConfig& cfg, AblationToggle toggle) {
  return {run(cfg), run(apply_ablation(cfg, toggle))};
}

namespace {

OrderedJson metrics_json(const RunSummary& s) {
  OrderedJson j;
  j["completed"] = s.completed;
  j["failure_reason"] = s.failure_reason;
  j["failure_time"] = s.failure_time;
  j["sim_duration"] = s.sim_duration;
  j["velocity_rms"] = s.velocity_rms;
  j["min_zmp_margin"] = s.min_zmp_margin;
  j["max_cone_utilization"] = s.max_cone_utilization;
  j["min_cone_residual"] = s.min_cone_residual;
  j["max_nose_up"] = s.max_nose_up;
  j["min_nose_up"] = s.min_nose_up;
  j["final_x"] = s.final_x;
  j["final_y"] = s.final_y;
  j["slip_events"] = s.slip_events;
  j["qp_failures"] = s.qp_failures;
  return j;
}

}  // namespace

std::string RunLog::summary_metrics_json() const {
  return metrics_json(summary).dump(2) + "\n";
}

std::string RunLog::summary_json() const {
  OrderedJson j = metrics_json(summary);
  OrderedJson timing;
  timing["mean_prep_ms"] = summary.mean_prep_ms;
  timing["max_prep_ms"] = summary.max_prep_ms;
  timing["mean_feedback_ms"] = summary.mean_feedback_ms;
  timing["max_feedback_ms"] = summary.max_feedback_ms;
  j["timing"] = timing;
  return j.dump(2) + "\n";
}

std::string RunLog::wbc_trace_csv() const {
  std::ostringstream out;
  out << "t,px,py,pz,vx,vy,vz,roll,pitch,yaw,wx,wy,wz";
  for (int i = 0; i < kNumLegs; ++i) {
    out << ",fx" << i << ",fy" << i << ",fz" << i << ",contact" << i
        << ",foot_z" << i;
  }
  out << ",zmp_margin,cone_utilization,cone_residual,nose_up\n";
  for (const WbcTick& w : wbc_ticks) {
    out << w.t;
    const Vec12 xv = w.x.vec();
    for (int j = 0; j < 12; ++j) out << ',' << xv(j);
    for (int i = 0; i < kNumLegs; ++i) {
      out << ',' << w.u.forces[i].x() << ',' << w.u.forces[i].y() << ','
          << w.u.forces[i].z() << ',' << (w.contact[i] ? 1 : 0) << ','
          << w.foot_z[i];
    }
    out << ',' << w.zmp_margin << ',' << w.cone_utilization << ','
        << w.cone_residual << ',' << w.nose_up_angle << '\n';
  }
  return out.str();
}

std::string RunLog::planner_trace_csv() const {
  std::ostringstream out;
  out << "t,solved,step_norm,prep_ms,feedback_ms,plan_pitch\n";
  for (const PlannerTick& p : planner_ticks) {
    out << p.t << ',' << (p.solved ? 1 : 0) << ',' << p.step_norm << ','
        << p.prep_ms << ',' << p.feedback_ms << ',' << p.plan_pitch << '\n';
  }
  return out.str();
}

SimConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ScenarioError(std::string("malformed scenario json: ") + e.what());
  }
  SimConfig cfg;
  const std::string name = j.value("scenario", "flat");
  if (name == "flat") {
    cfg.scenario = Scenario::Flat;
  } else if (name == "pallets") {
    cfg.scenario = Scenario::Pallets;
  } else if (name == "chimney") {
    cfg.scenario = Scenario::Chimney;
  } else if (name == "rough") {
    cfg.scenario = Scenario::Rough;
  } else {
    throw ScenarioError("unknown scenario: " + name);
  }
  cfg.duration = j.value("duration", cfg.duration);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.planner_hz = j.value("planner_hz", cfg.planner_hz);
  cfg.wbc_hz = j.value("wbc_hz", cfg.wbc_hz);
  cfg.threaded = j.value("threaded", cfg.threaded);
  cfg.rz_weight_scale = j.value("rz_weight_scale", cfg.rz_weight_scale);
  cfg.plant_mass_scale = j.value("plant_mass_scale", cfg.plant_mass_scale);
  cfg.plant_inertia_scale =
      j.value("plant_inertia_scale", cfg.plant_inertia_scale);
  cfg.refgen.gait.cycle_time =
      j.value("cycle_time", cfg.refgen.gait.cycle_time);
  if (j.contains("duty")) {
    cfg.refgen.gait.duty.fill(j["duty"].get<double>());
  }
  if (j.contains("offsets")) {
    const auto o = j["offsets"].get<std::vector<double>>();
    if (o.size() != kNumLegs) throw ScenarioError("offsets needs 4 entries");
    for (int i = 0; i < kNumLegs; ++i) cfg.refgen.gait.offsets[i] = o[i];
  }
  if (j.contains("pallets")) {
    const auto& p = j["pallets"];
    cfg.pallets.start_x = p.value("start_x", cfg.pallets.start_x);
    if (p.contains("lengths"))
      cfg.pallets.lengths = p["lengths"].get<std::vector<double>>();
    if (p.contains("heights"))
      cfg.pallets.heights = p["heights"].get<std::vector<double>>();
    if (p.contains("gaps"))
      cfg.pallets.gaps = p["gaps"].get<std::vector<double>>();
  }
  if (j.contains("chimney")) {
    const auto& c = j["chimney"];
    cfg.chimney.floor_half_width =
        c.value("floor_half_width", cfg.chimney.floor_half_width);
    cfg.chimney.wall_angle_deg =
        c.value("wall_angle_deg", cfg.chimney.wall_angle_deg);
  }
  if (j.contains("rough")) {
    const auto& r = j["rough"];
    cfg.rough.seed = r.value("seed", cfg.rough.seed);
    cfg.rough.amplitude = r.value("amplitude", cfg.rough.amplitude);
    cfg.rough.smoothing_passes =
        r.value("smoothing_passes", cfg.rough.smoothing_passes);
  }
  for (const auto& c : j.value("commands", nlohmann::json::array())) {
    CommandSegment seg;
    seg.start = c.value("start", 0.0);
    seg.cmd.v_xy.x() = c.value("vx", 0.0);
    seg.cmd.v_xy.y() = c.value("vy", 0.0);
    seg.cmd.yaw_rate = c.value("yaw_rate", 0.0);
    cfg.commands.push_back(seg);
  }
  for (const auto& d : j.value("disturbances", nlohmann::json::array())) {
    Disturbance dist;
    dist.start = d.value("start", 0.0);
    dist.duration = d.value("duration", 0.0);
    dist.force = Vec3(d.value("fx", 0.0), d.value("fy", 0.0),
                      d.value("fz", 0.0));
    cfg.disturbances.push_back(dist);
  }
  return cfg;
}

}  // namespace qmpc
