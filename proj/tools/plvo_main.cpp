// Command-line front end: synthetic scene generation, odometry runs, and
// trajectory evaluation.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "plvo/io.hpp"
#include "plvo/metrics.hpp"
#include "plvo/odometry.hpp"
#include "plvo/synthetic.hpp"

namespace {

using namespace plvo;

CostMode parseMode(const std::string& s) {
  if (s == "points_only") return CostMode::PointsOnly;
  if (s == "perp_only_lines") return CostMode::PerpOnlyLines;
  if (s == "para_only_lines") return CostMode::ParaOnlyLines;
  if (s == "both_lines") return CostMode::BothLines;
  throw CLI::ValidationError("--mode", "unknown mode '" + s + "'");
}

OdometryConfig configFromFile(const KeyValueConfig& kv) {
  OdometryConfig cfg;
  cfg.match.epipolarTol = kv.getDouble("epipolar_tol", cfg.match.epipolarTol);
  cfg.match.minDisparity =
      kv.getDouble("min_disparity", cfg.match.minDisparity);
  cfg.match.maxDisparityFrac =
      kv.getDouble("max_disparity_frac", cfg.match.maxDisparityFrac);
  cfg.match.searchRadiusPx =
      kv.getDouble("search_radius_px", cfg.match.searchRadiusPx);
  cfg.match.maxPointsPerCell =
      kv.getInt("max_points_per_cell", cfg.match.maxPointsPerCell);
  cfg.match.zMin = kv.getDouble("z_min", cfg.match.zMin);
  cfg.dynamicGrid.rho = kv.getDouble("rho", cfg.dynamicGrid.rho);
  cfg.dynamicGrid.enabled = kv.getBool("dynamic_grid", cfg.dynamicGrid.enabled);
  cfg.solver.lambda0 = kv.getDouble("lambda0", cfg.solver.lambda0);
  cfg.solver.lambdaFactor =
      kv.getDouble("lambda_factor", cfg.solver.lambdaFactor);
  cfg.solver.maxIters = kv.getInt("max_iters", cfg.solver.maxIters);
  cfg.solver.costTol = kv.getDouble("cost_tol", cfg.solver.costTol);
  cfg.solver.stepTol = kv.getDouble("step_tol", cfg.solver.stepTol);
  cfg.solver.minConstraints =
      kv.getInt("min_constraints", cfg.solver.minConstraints);
  cfg.weights.robust = kv.getBool("robust", cfg.weights.robust);
  cfg.weights.robustDelta =
      kv.getDouble("robust_delta", cfg.weights.robustDelta);
  cfg.minRowsForSolve = kv.getInt("min_rows", cfg.minRowsForSolve);
  if (kv.has("mode")) cfg.mode = parseMode(kv.getString("mode", ""));
  return cfg;
}

int runOdometry(const std::string& calibPath, const std::string& featuresPath,
                const std::string& outputPath, const std::string& modeStr,
                bool modeSet, const std::string& dynamicGridStr,
                bool dynamicGridSet, double rho, bool rhoSet,
                const std::string& configPath,
                const std::string& trajFormatStr) {
  KeyValueConfig kv;
  if (!configPath.empty()) kv = KeyValueConfig::fromFile(configPath);
  OdometryConfig cfg = configFromFile(kv);
  if (modeSet || !kv.has("mode")) cfg.mode = parseMode(modeStr);
  if (dynamicGridSet || !kv.has("dynamic_grid")) {
    if (dynamicGridStr != "on" && dynamicGridStr != "off") {
      throw CLI::ValidationError("--dynamic-grid", "expected on or off");
    }
    cfg.dynamicGrid.enabled = dynamicGridStr == "on";
  }
  if (rhoSet) cfg.dynamicGrid.rho = rho;

  const CameraModeld cam = loadCalibration(calibPath);
  int skipped = 0;
  const std::vector<RawFrame> frames = loadFeatures(featuresPath, cam,
                                                    &skipped);
  if (skipped > 0) {
    std::cerr << "skipped " << skipped << " out-of-bounds records\n";
  }

  OdometryEngine engine(cam, cfg);
  for (const RawFrame& frame : frames) {
    const FrameStats& stats = engine.processFrame(frame);
    std::cout << diagnosticsLine(stats) << "\n";
  }

  Trajectory traj;
  for (std::size_t i = 0; i < engine.trajectory().size(); ++i) {
    traj.push_back({engine.frameIds()[i], engine.trajectory()[i]});
  }
  const TrajectoryFormat fmt = trajFormatStr == "tum" ? TrajectoryFormat::Tum
                                                      : TrajectoryFormat::Kitti;
  writeTrajectory(outputPath, traj, fmt);

  if (kv.has("mask_path")) {
    std::ofstream mask(kv.getString("mask_path", ""));
    if (!mask) throw std::runtime_error("cannot write mask file");
    for (const FrameStats& stats : engine.stats()) {
      for (const GridCell& c : stats.maskCells) {
        mask << stats.frameId << " " << c.a << " " << c.b << "\n";
      }
    }
  }
  return 0;
}

int runSynth(const std::string& sceneConfigPath, const std::string& outDir) {
  const KeyValueConfig kv = KeyValueConfig::fromFile(sceneConfigPath);
  const SyntheticScene scene = generateSynthetic(sceneConfigFromKeyValues(kv));
  writeScene(scene, outDir);
  return 0;
}

int runEval(const std::string& gtPath, const std::string& estPath,
            const std::string& metric, int delta, bool align) {
  const Trajectory gt = readTrajectory(gtPath);
  const Trajectory est = readTrajectory(estPath);
  char buf[96];
  if (metric == "ape") {
    const ErrorStats e = ape(gt, est, align);
    std::snprintf(buf, sizeof(buf), "ape_trans_rmse %.6f\nape_rot_rmse %.6f\n",
                  e.transRmse, e.rotRmseDeg);
  } else if (metric == "rpe") {
    const ErrorStats e = rpe(gt, est, delta);
    std::snprintf(buf, sizeof(buf), "rpe_trans_rmse %.6f\nrpe_rot_rmse %.6f\n",
                  e.transRmse, e.rotRmseDeg);
  } else {
    throw CLI::ValidationError("--metric", "expected ape or rpe");
  }
  std::cout << buf;
  return 0;
}

int runPlotData(const std::string& trajPath) {
  char buf[64];
  for (const TrajectoryEntry& entry : readTrajectory(trajPath)) {
    std::snprintf(buf, sizeof(buf), "%.6f %.6f\n", entry.pose.t.x(),
                  entry.pose.t.z());
    std::cout << buf;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stereo point-line visual odometry with dynamic-region "
               "filtering"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run odometry on a feature file");
  std::string calibPath, featuresPath, outputPath, configPath;
  std::string modeStr = "both_lines", dynamicGridStr = "on";
  std::string trajFormatStr = "kitti";
  double rho = 4.0;
  run->add_option("--calib", calibPath, "Calibration file")->required();
  run->add_option("--features", featuresPath, "Feature observation file")
      ->required();
  run->add_option("--output", outputPath, "Output trajectory file")
      ->required();
  auto* modeOpt = run->add_option(
      "--mode", modeStr,
      "points_only|perp_only_lines|para_only_lines|both_lines");
  auto* dynOpt =
      run->add_option("--dynamic-grid", dynamicGridStr, "on|off");
  auto* rhoOpt = run->add_option(
      "--rho", rho, "Dynamic-cell threshold on mean squared error (px^2)");
  run->add_option("--config", configPath, "key = value config file");
  run->add_option("--traj-format", trajFormatStr, "kitti|tum");

  auto* synth = app.add_subcommand("synth", "Generate a synthetic scene");
  std::string sceneConfigPath, outDir;
  synth->add_option("--scene-config", sceneConfigPath, "Scene config file")
      ->required();
  synth->add_option("--out-dir", outDir, "Output directory")->required();

  auto* eval = app.add_subcommand("eval", "Evaluate a trajectory");
  std::string gtPath, estPath, metric = "ape";
  int delta = 1;
  bool align = false;
  eval->add_option("--gt", gtPath, "Ground-truth trajectory")->required();
  eval->add_option("--est", estPath, "Estimated trajectory")->required();
  eval->add_option("--metric", metric, "ape|rpe");
  eval->add_option("--delta", delta, "RPE frame delta");
  eval->add_flag("--align", align, "Rigidly align estimate before APE");

  auto* plot = app.add_subcommand("plot-data",
                                  "Emit per-frame x z path columns");
  std::string trajPath;
  plot->add_option("--traj", trajPath, "Trajectory file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      return runOdometry(calibPath, featuresPath, outputPath, modeStr,
                         modeOpt->count() > 0, dynamicGridStr,
                         dynOpt->count() > 0, rho, rhoOpt->count() > 0,
                         configPath, trajFormatStr);
    }
    if (synth->parsed()) return runSynth(sceneConfigPath, outDir);
    if (eval->parsed()) return runEval(gtPath, estPath, metric, delta, align);
    if (plot->parsed()) return runPlotData(trajPath);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
