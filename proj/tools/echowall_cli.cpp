// Command-line harness: experiment sweeps, single-scene estimation, and
// standalone plane detection on XYZ clouds.

#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "echowall/experiments.hpp"
#include "echowall/plots.hpp"

namespace {

using namespace echowall;

int run_experiment(const std::string& name, const std::string& config_path,
                   std::optional<std::uint64_t> seed, std::optional<int> workers,
                   std::optional<std::string> out_dir) {
  ExperimentConfig cfg = load_config(config_path);
  if (seed) cfg.master_seed = *seed;
  if (workers) cfg.workers = *workers;
  if (out_dir) cfg.out_dir = *out_dir;

  ResultsTable table;
  if (name == "exp1") {
    table = run_experiment_1(cfg);
  } else if (name == "exp2") {
    table = run_experiment_2(cfg);
  } else {
    table = run_experiment_3(cfg);
  }
  const auto written = emit_plots(table, cfg.out_dir);
  for (const std::string& f : written) std::printf("wrote %s\n", f.c_str());
  return 0;
}

int run_estimate(const std::string& config_path, const std::string& out_path,
                 const std::string& rir_csv, const std::string& cloud_xyz,
                 bool baseline_only) {
  ExperimentConfig cfg = load_config(config_path);
  if (cfg.scene.empty()) {
    std::fprintf(stderr, "estimate: config has no scene planes\n");
    return 1;
  }
  std::vector<Plane> planes;
  for (const ScenePlane& sp : cfg.scene) planes.push_back(sp.plane);

  const PolarGrid grid = cfg.make_grid();
  const Dictionary dict(grid, cfg.pose, cfg.directivity, cfg.response_length,
                        FracDelayKernel{cfg.kernel_half_width});

  ImpulseResponseSet h =
      simulate_rir(planes, cfg.pose, cfg.directivity, cfg.make_rir_params(true));
  h = remove_direct_path(h, cfg.pose, cfg.directivity, cfg.speed_of_sound,
                         FracDelayKernel{cfg.kernel_half_width});
  const PointCloud cloud = cast_cloud(planes, cfg.lidar);

  if (!rir_csv.empty()) write_rir_csv(h, rir_csv);
  if (!cloud_xyz.empty()) write_xyz(cloud, cloud_xyz);

  EstimatorConfig est_cfg = cfg.make_estimator(!baseline_only);
  const EstimationResult result = estimate(h, cloud, dict, est_cfg);

  nlohmann::json out;
  out["detections"] = nlohmann::json::array();
  for (const DetectedReflector& det : result.detections) {
    out["detections"].push_back(
        {{"distance", det.plane.distance},
         {"azimuth_deg", rad2deg(plane_azimuth(det.plane))},
         {"image_distance", 2.0 * det.plane.distance},
         {"confidence", det.confidence}});
  }
  out["horizontal_planes_used"] = result.horizontal_used.size();
  out["priors_used"] = result.priors_used.size();
  out["notes"] = result.notes;
  out["diagnostics"] = {{"iterations", result.diagnostics.iterations},
                        {"converged", result.diagnostics.converged},
                        {"kkt_residual", result.diagnostics.kkt_residual},
                        {"mu", result.diagnostics.mu}};
  const std::string text = out.dump(2) + "\n";
  if (out_path.empty() || out_path == "-") {
    std::fputs(text.c_str(), stdout);
  } else {
    std::FILE* f = std::fopen(out_path.c_str(), "w");
    if (!f) {
      std::fprintf(stderr, "cannot open %s\n", out_path.c_str());
      return 1;
    }
    std::fputs(text.c_str(), f);
    std::fclose(f);
  }
  return 0;
}

int run_detect_planes(const std::string& cloud_path, const std::string& config_path) {
  DetectorParams params;
  double split_tol = 5.0;
  if (!config_path.empty()) {
    const ExperimentConfig cfg = load_config(config_path);
    params = cfg.detector;
    split_tol = cfg.split_tol_deg;
  }
  const PointCloud cloud = read_xyz(cloud_path);
  const auto planes = detect_planes(cloud, params);
  const SplitPlanes split = split_horizontal_vertical(planes, split_tol);

  std::printf("%zu plane(s) from %zu points\n", planes.size(), cloud.size());
  auto print_group = [](const char* label, const std::vector<DetectedPlane>& group) {
    for (const DetectedPlane& p : group) {
      std::printf("%s: rho=%.4f m, normal=(%.4f, %.4f, %.4f), inliers=%d, rms=%.2e\n",
                  label, p.plane.distance, p.plane.normal.x(), p.plane.normal.y(),
                  p.plane.normal.z(), p.inlier_count, p.rms_residual);
    }
  };
  print_group("vertical", split.vertical);
  print_group("horizontal", split.horizontal);
  print_group("slanted", split.discarded);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acoustic reflector estimation with LiDAR priors"};
  app.require_subcommand(1);

  std::string config_path, out_dir, out_path, rir_csv, cloud_xyz, cloud_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  bool baseline_only = false;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "experiment config file")->required();
    cmd->add_option("--seed", seed, "override master seed");
    cmd->add_option("--workers", workers, "worker thread count (0 = all cores)");
    cmd->add_option("--out", out_dir, "output directory");
  };
  add_common(app.add_subcommand("exp1", "wall + floor sweep (noiseless)"));
  add_common(app.add_subcommand("exp2", "rotating single wall Monte-Carlo"));
  add_common(app.add_subcommand("exp3", "rotating wall + window Monte-Carlo"));

  CLI::App* est = app.add_subcommand("estimate", "single-scene estimation");
  est->add_option("--config", config_path, "config with a scene section")->required();
  est->add_option("--out", out_path, "result JSON path (- for stdout)");
  est->add_option("--rir-csv", rir_csv, "also dump the simulated RIR");
  est->add_option("--cloud-xyz", cloud_xyz, "also dump the simulated point cloud");
  est->add_flag("--baseline", baseline_only, "acoustics-only baseline path");

  CLI::App* det = app.add_subcommand("detect-planes", "plane detection on an XYZ cloud");
  det->add_option("cloud", cloud_path, "input cloud (xyz text)")->required();
  det->add_option("--config", config_path, "optional config for detector params");

  CLI11_PARSE(app, argc, argv);

  try {
    for (const char* name : {"exp1", "exp2", "exp3"}) {
      if (app.got_subcommand(name)) {
        return run_experiment(name, config_path, seed, workers,
                              out_dir.empty() ? std::nullopt
                                              : std::optional<std::string>(out_dir));
      }
    }
    if (app.got_subcommand("estimate"))
      return run_estimate(config_path, out_path, rir_csv, cloud_xyz, baseline_only);
    if (app.got_subcommand("detect-planes"))
      return run_detect_planes(cloud_path, config_path);
  } catch (const std::exception& ex) {
    std::fprintf(stderr, "error: %s\n", ex.what());
    return 1;
  }
  return 0;
}
