#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "qmpc/leg.hpp"
#include "qmpc/sim.hpp"

namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void write_run(const std::filesystem::path& dir, const std::string& prefix,
               const qmpc::RunLog& log) {
  std::filesystem::create_directories(dir);
  write_file(dir / (prefix + "summary.json"), log.summary_json());
  write_file(dir / (prefix + "summary_metrics.json"),
             log.summary_metrics_json());
  write_file(dir / (prefix + "wbc_trace.csv"), log.wbc_trace_csv());
  write_file(dir / (prefix + "planner_trace.csv"), log.planner_trace_csv());
}

qmpc::SimConfig make_config(const std::string& scenario_file, uint64_t seed,
                            double duration, bool threaded) {
  qmpc::SimConfig cfg;
  if (!scenario_file.empty()) cfg = qmpc::load_scenario(scenario_file);
  if (seed != 0) cfg.seed = seed;
  if (duration > 0) cfg.duration = duration;
  if (threaded) cfg.threaded = true;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quadruped nmpc closed-loop simulator"};
  app.require_subcommand(1);

  std::string scenario_file, out_dir = "out", toggle_name = "mobility_cost";
  std::string qp_out = "qp_dump.txt";
  uint64_t seed = 0;
  double duration = 0;
  bool threaded = false;
  double beta = 1.0, gamma = 4.0;
  std::string field_csv;

  auto* run_cmd = app.add_subcommand("run", "closed-loop simulation");
  run_cmd->add_option("--scenario", scenario_file, "scenario json file");
  run_cmd->add_option("--seed", seed, "override the scenario seed");
  run_cmd->add_option("--duration", duration, "override the duration [s]");
  run_cmd->add_option("--out", out_dir, "output directory");
  run_cmd->add_flag("--threaded", threaded, "planner on a worker thread");

  auto* ablate_cmd = app.add_subcommand("ablate", "paired ablation runs");
  ablate_cmd->add_option("--scenario", scenario_file, "scenario json file");
  ablate_cmd->add_option("--seed", seed, "override the scenario seed");
  ablate_cmd->add_option("--duration", duration, "override the duration [s]");
  ablate_cmd->add_option("--out", out_dir, "output directory");
  ablate_cmd
      ->add_option("--toggle", toggle_name,
                   "mobility_cost|force_robustness|cone_constraints|"
                   "replan_rate")
      ->check(CLI::IsMember({"mobility_cost", "force_robustness",
                             "cone_constraints", "replan_rate"}));

  auto* calib_cmd =
      app.add_subcommand("calibrate-mobility", "leg mobility grid search");
  calib_cmd->add_option("--beta", beta, "volume weight");
  calib_cmd->add_option("--gamma", gamma, "eccentricity weight");
  calib_cmd->add_option("--field-csv", field_csv,
                        "also dump the full mobility field as csv");

  auto* dump_cmd =
      app.add_subcommand("dump-qp", "assemble and dump a hover qp subproblem");
  dump_cmd->add_option("--out", qp_out, "output path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      const qmpc::SimConfig cfg =
          make_config(scenario_file, seed, duration, threaded);
      const qmpc::RunLog log = qmpc::run(cfg);
      write_run(out_dir, "", log);
      std::cout << log.summary_json();
      return log.summary.completed ? 0 : 2;
    }
    if (ablate_cmd->parsed()) {
      const qmpc::SimConfig cfg =
          make_config(scenario_file, seed, duration, threaded);
      qmpc::AblationToggle toggle = qmpc::AblationToggle::MobilityCost;
      if (toggle_name == "force_robustness") {
        toggle = qmpc::AblationToggle::ForceRobustness;
      } else if (toggle_name == "cone_constraints") {
        toggle = qmpc::AblationToggle::ConeConstraints;
      } else if (toggle_name == "replan_rate") {
        toggle = qmpc::AblationToggle::ReplanRate;
      }
      const auto [baseline, ablated] = qmpc::ablate(cfg, toggle);
      write_run(out_dir, "baseline_", baseline);
      write_run(out_dir, "ablated_", ablated);
      std::cout << "baseline:\n"
                << baseline.summary_json() << "ablated:\n"
                << ablated.summary_json();
      return 0;
    }
    if (calib_cmd->parsed()) {
      const qmpc::LegGeometry geom;
      const qmpc::WorkspaceGrid grid;
      const qmpc::MobilityCalibration cal =
          qmpc::find_max_mobility_offset(geom, beta, gamma, grid);
      std::cout << "argmax_hip_to_foot: " << cal.argmax.transpose() << "\n"
                << "peak_mobility: " << cal.peak << "\n"
                << "volume_range: " << cal.weights.v_range << "\n"
                << "eccentricity_range: " << cal.weights.e_range << "\n"
                << "evaluated_nodes: " << cal.evaluated_nodes << "\n";
      if (!field_csv.empty()) {
        write_file(field_csv, qmpc::mobility_field_csv(geom, beta, gamma, grid));
      }
      return 0;
    }
    if (dump_cmd->parsed()) {
      qmpc::SimConfig cfg;
      const qmpc::HeightMap2_5D map = qmpc::build_scenario_map(cfg);
      qmpc::State x;
      x.p_c = qmpc::Vec3(0, 0, cfg.initial_height);
      std::array<qmpc::Vec3, qmpc::kNumLegs> feet;
      for (int i = 0; i < qmpc::kNumLegs; ++i) {
        const qmpc::Vec3 hip = cfg.model.com_to_base + cfg.model.hip_offsets[i];
        feet[i] = qmpc::Vec3(hip.x(), hip.y(), 0);
      }
      const qmpc::ReferenceTrajectory refs =
          qmpc::generate(x, feet, {}, {}, map, cfg.refgen, cfg.ocp, cfg.model);
      qmpc::Trajectory guess;
      guess.x = refs.x_ref;
      guess.u = refs.u_ref;
      const qmpc::QpSubproblem qp = qmpc::build_qp(
          guess, refs, x, cfg.ocp, cfg.model, cfg.integrator);
      write_file(qp_out, qmpc::dump_qp(qp));
      std::cout << "wrote " << qp_out << " (" << qp.horizon() << " stages)\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
