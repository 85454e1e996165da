#pragma once

#include <string>
#include <vector>

#include "echowall/experiment_config.hpp"

namespace echowall {

struct ResultRow {
  std::string experiment;
  std::string method;  // baseline | proposed
  double angle_deg = 0.0;
  double snr_db = 0.0;
  double floor_distance = 0.0;
  int run = 0;
  std::uint64_t seed = 0;
  int wall_hit = 0;
  int window_hit = 0;
  double detected_r = 0.0;          // image-source distance of the top peak
  double detected_alpha_deg = 0.0;  // azimuth of the top peak
  double normal_mse = 0.0;
  int n_detections = 0;
  int floor_detected = 0;  // LiDAR saw a horizontal plane
  int prior_used = 0;
  int solver_iterations = 0;
  int solver_converged = 1;
  double kkt_residual = 0.0;
  double mu = 0.0;
};

struct ResultsTable {
  std::vector<ResultRow> rows;
  std::string config_hash;
};

// Experiment 1: omnidirectional loudspeaker, wall whose image source sits at
// R = 1 m, floor swept over sweep.floor_distances; noiseless.
ResultsTable run_experiment_1(const ExperimentConfig& cfg);

// Experiment 2: directive loudspeaker, bounded wall rotated around the
// system, Monte-Carlo over sweep.angles_deg x sweep.snr_db.
ResultsTable run_experiment_2(const ExperimentConfig& cfg);

// Experiment 3: wall + window (acoustically reflective, LiDAR-invisible) at
// a fixed angular offset, rotated together; Monte-Carlo as in experiment 2.
ResultsTable run_experiment_3(const ExperimentConfig& cfg);

void write_results_csv(const ResultsTable& table, const std::string& path);
ResultsTable read_results_csv(const std::string& path);

// Mean of a row field over runs grouped by (method, angle, snr) etc. are
// computed by consumers; this helper keeps the common aggregation in one
// place for plots and the acceptance suite.
double mean_hitrate(const ResultsTable& table, const std::string& method,
                    double angle_deg, double snr_db, bool window = false);

}  // namespace echowall
