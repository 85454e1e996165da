#pragma once

#include <optional>
#include <string>
#include <vector>

#include "echowall/acoustic.hpp"
#include "echowall/dictionary.hpp"
#include "echowall/horizontal.hpp"
#include "echowall/lasso.hpp"
#include "echowall/lidar.hpp"
#include "echowall/plane_detect.hpp"

namespace echowall {

struct PeakParams {
  double rel_threshold = 0.5;  // keep peaks >= threshold * max(s)
  int nms_radius_q = 3;
  int nms_radius_m = 1;
  int max_peaks = 8;
};

struct Peak {
  int q = 0;
  int m = 0;
  double radius = 0.0;
  double azimuth = 0.0;
  double magnitude = 0.0;
};

// Non-maximum suppression on the (q, m) lattice, circular in m: survivors
// dominate their neighborhood within the radii; adjacent survivors merge
// into the larger one. Sorted by magnitude, descending.
std::vector<Peak> extract_peaks(const ImageSourceMap& s, const PeakParams& params);

// End-to-end estimator configuration. The baseline (acoustics-only) method
// is the same code path with use_lidar = false.
struct EstimatorConfig {
  bool use_lidar = true;
  bool use_horizontal_elimination = true;
  bool use_prior_constraint = true;

  // lambda = lambda_scale * 2 ||Phi^T h||_inf unless lambda_absolute is set.
  double lambda_scale = 0.1;
  std::optional<double> lambda_absolute;

  // Eq-5 bound: b = b_horizontal_scale * ||h||^2 / M.
  double b_horizontal_scale = 1e-3;
  // Constraint bound: b = b_prior_scale * ||L s_unconstrained||^2.
  double b_prior_scale = 1e-2;
  double horizontal_weight_exponent = 2.0;

  double split_tol_deg = 5.0;
  DetectorParams detector;
  PeakParams peaks;
  LassoOptions solver;
  std::string solve_log_path;  // empty disables the per-solve run log
  std::string solve_log_id;
};

struct DetectedReflector {
  Plane plane;
  double confidence = 0.0;
  Peak peak;
};

struct EstimationResult {
  std::vector<DetectedReflector> detections;  // sorted by confidence
  std::vector<DetectedPlane> horizontal_used;
  std::vector<PriorLocation> priors_used;
  SolveDiagnostics diagnostics;
  ImageSourceMap solution;
  std::vector<std::string> notes;
};

// Full method: LiDAR plane detection, horizontal response elimination,
// prior-constrained sparse solve, peak extraction, plane conversion.
// h must already be direct-path-free.
EstimationResult estimate(const ImpulseResponseSet& h, const PointCloud& cloud,
                          const Dictionary& dict, const EstimatorConfig& cfg);

struct HitSpec {
  int tol_radial = 2;   // grid cells in image-source distance (2 rho)
  int tol_angular = 1;  // grid cells in azimuth
};

// Per-truth-plane hit flags; a detection is consumed by at most one truth
// plane, assigned greedily in order of detection magnitude.
std::vector<int> hitrate(const EstimationResult& result,
                         const std::vector<Plane>& truth, const HitSpec& spec,
                         const PolarGrid& grid);

// Mean over components of (nu_est - nu_true)^2 for the detection matched to
// the truth plane (falling back to the strongest detection when nothing
// matched). Returns the antipodal-normal sentinel 4/3 when there are no
// detections at all; *no_detection reports that case.
double normal_mse(const EstimationResult& result, const Plane& truth,
                  const HitSpec& spec, const PolarGrid& grid,
                  bool* no_detection = nullptr);

}  // namespace echowall
