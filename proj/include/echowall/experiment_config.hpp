#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "echowall/acoustic.hpp"
#include "echowall/lidar.hpp"
#include "echowall/pipeline.hpp"
#include "echowall/polar_grid.hpp"

namespace echowall {

struct SolverSection {
  double lambda_scale = 0.1;
  std::optional<double> lambda_absolute;
  double b_horizontal_scale = 1e-3;
  double b_prior_scale = 1e-2;
  int max_iter = 2000;
  double kkt_tol_rel = 1e-6;
};

struct SweepSection {
  std::vector<double> snr_db;
  std::vector<double> angles_deg;
  std::vector<double> floor_distances;
};

struct Exp1Section {
  double wall_distance = 0.5;  // image source at R = 1
  double wall_azimuth_deg = 0.0;
};

struct Exp2Section {
  double wall_distance = 0.5;
  double wall_half_width = 0.5;
  double wall_half_height = 0.5;
};

struct Exp3Section {
  double wall_distance = 0.4;
  double window_distance = 0.6;
  double window_offset_deg = 90.0;
  double wall_half_width = 0.5;
  double wall_half_height = 0.5;
};

// Scene description for the single-shot `estimate` subcommand.
struct ScenePlane {
  Plane plane;
  // retained for lossless round-trips of the input form
  std::string kind = "vertical";  // vertical | horizontal | general
  double azimuth_deg = 0.0;
  bool below = true;
};

struct ExperimentConfig {
  SystemPose pose;
  int grid_radial_count = 120;
  double sample_rate = 16000.0;
  int response_length = 256;
  double speed_of_sound = 343.0;
  int kernel_half_width = 16;
  Directivity directivity = Directivity::cardioid(0.4);
  LidarConfig lidar;
  std::vector<ScenePlane> scene;
  SolverSection solver;
  PeakParams peaks;
  HitSpec hit;
  DetectorParams detector;
  double split_tol_deg = 5.0;
  SweepSection sweep;
  int mc_runs = 25;
  std::uint64_t master_seed = 1;
  int workers = 0;  // 0 = hardware concurrency
  std::string out_dir = "out";
  Exp1Section exp1;
  Exp2Section exp2;
  Exp3Section exp3;

  PolarGrid make_grid() const;
  RirParams make_rir_params(bool include_direct = false) const;
  EstimatorConfig make_estimator(bool use_lidar) const;
};

ExperimentConfig config_from_json(const std::string& json_text);
std::string config_to_json(const ExperimentConfig& cfg);
ExperimentConfig load_config(const std::string& path);
void save_config(const ExperimentConfig& cfg, const std::string& path);

// FNV-1a over the canonical serialized form; identifies the exact
// configuration in result tables.
std::string config_hash(const ExperimentConfig& cfg);

}  // namespace echowall
