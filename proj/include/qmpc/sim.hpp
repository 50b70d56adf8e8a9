#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qmpc/refgen.hpp"
#include "qmpc/rti.hpp"
#include "qmpc/terrain.hpp"
#include "qmpc/wbc.hpp"

namespace qmpc {

enum class Scenario { Flat, Pallets, Chimney, Rough };

struct Disturbance {
  double start = 0;     // s
  double duration = 0;  // s
  Vec3 force = Vec3::Zero();  // N, applied at the CoM in the world frame
};

struct CommandSegment {
  double start = 0;  // s, active until the next segment
  UserCommand cmd;
};

enum class AblationToggle { MobilityCost, ForceRobustness, ConeConstraints, ReplanRate };

struct SimConfig {
  Scenario scenario = Scenario::Flat;
  PalletSpec pallets;
  ChimneySpec chimney;
  RoughSpec rough;
  double map_x_span = 12.0;
  double map_y_span = 4.0;
  double map_resolution = 0.02;

  std::vector<CommandSegment> commands;  // empty = hover in place
  std::vector<Disturbance> disturbances;
  double duration = 10.0;  // s
  double planner_hz = 25.0;
  double wbc_hz = 250.0;
  double ablated_planner_hz = 0.8;
  uint64_t seed = 1;
  bool threaded = false;

  // Plant-vs-controller model mismatch knobs.
  double plant_mass_scale = 1.0;
  double plant_inertia_scale = 1.0;

  double initial_height = 0.55;  // m above local terrain
  double rz_weight_scale = 1.0;  // scales the vertical-force entries of R

  RobotModel model;
  OcpConfig ocp;
  RefGenConfig refgen;
  WbcGains gains;
  LegGeometry leg;
  IntegratorConfig integrator;  // controller-side sensitivities
  QpSolverSettings qp;
};

struct PlannerTick {
  double t = 0;
  bool solved = false;
  double step_norm = 0;
  double prep_ms = 0;
  double feedback_ms = 0;
  double plan_pitch = 0;  // nose-up angle of the first predicted state
};

struct WbcTick {
  double t = 0;
  State x;
  Control u;  // applied forces
  std::array<bool, kNumLegs> contact{};
  std::array<double, kNumLegs> foot_z{};
  double zmp_margin = 0;
  double cone_utilization = 0;  // max tangential/normal ratio over stance legs
  double cone_residual = 0;     // min pyramid-row value over stance legs
  double nose_up_angle = 0;
};

struct RunSummary {
  bool completed = false;
  std::string failure_reason;
  double failure_time = -1;
  double sim_duration = 0;
  double velocity_rms = 0;
  double min_zmp_margin = 0;
  double max_cone_utilization = 0;
  double min_cone_residual = 0;
  double max_nose_up = 0;
  double min_nose_up = 0;
  double final_x = 0;
  double final_y = 0;
  int slip_events = 0;
  int qp_failures = 0;
  // Timings are reported separately so the deterministic metrics block can be
  // compared byte-for-byte across runs.
  double mean_prep_ms = 0;
  double max_prep_ms = 0;
  double mean_feedback_ms = 0;
  double max_feedback_ms = 0;
};

struct RunLog {
  std::vector<PlannerTick> planner_ticks;
  std::vector<WbcTick> wbc_ticks;
  RunSummary summary;

  // Deterministic metrics block (no wall-clock fields), serialized with fixed
  // key order; identical config + seed must reproduce it byte for byte.
  std::string summary_metrics_json() const;
  std::string summary_json() const;      // metrics + timing block
  std::string wbc_trace_csv() const;     // documented column schema
  std::string planner_trace_csv() const;
};

HeightMap2_5D build_scenario_map(const SimConfig& cfg);

// Closed-loop rollout: SRBD plant at wbc_hz driven by projected WBC forces,
// RTI planner at planner_hz, swing feet flown kinematically, contacts pinned.
RunLog run(const SimConfig& cfg);

// Matched pair of runs differing only in the toggle; first = feature on
// (baseline), second = ablated.
std::pair<RunLog, RunLog> ablate(const SimConfig& cfg, AblationToggle toggle);

SimConfig apply_ablation(const SimConfig& cfg, AblationToggle toggle);

// Scenario script loader (JSON, documented in the README). Throws
// ScenarioError on malformed input.
SimConfig load_scenario(const std::string& path);

}  // namespace qmpc
