#include "echowall/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace echowall {

std::vector<Peak> extract_peaks(const ImageSourceMap& s, const PeakParams& params) {
  const PolarGrid& grid = s.grid;
  const double max_val = s.values.size() ? s.values.maxCoeff() : 0.0;
  if (max_val <= 0.0) return {};
  const double floor_val = params.rel_threshold * max_val;

  // Candidate cells above threshold, strongest first.
  std::vector<int> order;
  for (int i = 0; i < grid.size(); ++i)
    if (s.values[i] >= floor_val) order.push_back(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (s.values[a] != s.values[b]) return s.values[a] > s.values[b];
    return a < b;
  });

  // Greedy suppression: accepting in magnitude order and discarding anything
  // within the radii of an accepted peak both enforces local dominance and
  // merges adjacent maxima into the larger one.
  std::vector<Peak> peaks;
  for (int idx : order) {
    const auto [q, m] = grid.from_flat(idx);
    bool suppressed = false;
    for (const Peak& p : peaks) {
      const int dq = std::abs(q - p.q);
      const int dm_raw = std::abs(m - p.m);
      const int dm = std::min(dm_raw, grid.angular_count - dm_raw);
      if (dq <= params.nms_radius_q && dm <= params.nms_radius_m) {
        suppressed = true;
        break;
      }
    }
    if (suppressed) continue;
    Peak p;
    p.q = q;
    p.m = m;
    p.radius = grid.radius(q);
    p.azimuth = grid.azimuth(m);
    p.magnitude = s.values[idx];
    peaks.push_back(p);
    if (static_cast<int>(peaks.size()) >= params.max_peaks) break;
  }
  return peaks;
}

EstimationResult estimate(const ImpulseResponseSet& h, const PointCloud& cloud,
                          const Dictionary& dict, const EstimatorConfig& cfg) {
  EstimationResult result;
  const PolarGrid& grid = dict.grid();

  // 1-2. Plane detection and horizontal/vertical split.
  SplitPlanes split;
  if (cfg.use_lidar && !cloud.empty()) {
    const auto detected = detect_planes(cloud, cfg.detector);
    split = split_horizontal_vertical(detected, cfg.split_tol_deg);
    if (!split.discarded.empty())
      result.notes.push_back(std::to_string(split.discarded.size()) +
                             " slanted plane(s) discarded");
  }

  // 3. Eliminate horizontal-reflector responses (Eqs. 5-6).
  ImpulseResponseSet h_walls = h;
  if (cfg.use_horizontal_elimination && !split.horizontal.empty()) {
    std::vector<int> anchors;
    for (const DetectedPlane& dp : split.horizontal) {
      const int p = expected_sample(dp.plane, dict.pose(), grid.sample_rate,
                                    grid.speed_of_sound);
      if (p < 0 || p >= h.length()) {
        result.notes.push_back("horizontal reflector at rho=" +
                               std::to_string(dp.plane.distance) +
                               " arrives outside the response, skipped");
        continue;
      }
      anchors.push_back(p);
      result.horizontal_used.push_back(dp);
    }
    if (!anchors.empty()) {
      const double b =
          cfg.b_horizontal_scale * h.energy() / static_cast<double>(h.channels());
      const HorizontalEstimate est = estimate_horizontal_response(
          h, anchors, b, cfg.horizontal_weight_exponent);
      h_walls = subtract_horizontal(h, est.response);
    }
  }

  // 4. Priors from detected vertical planes.
  std::vector<PriorLocation> priors;
  for (const DetectedPlane& dp : split.vertical) {
    PriorLocation prior;
    prior.rho = dp.plane.distance;
    prior.alpha = plane_azimuth(dp.plane);
    const double image_radius = 2.0 * prior.rho;
    if (image_radius < grid.r_min() || image_radius > grid.r_max()) {
      result.notes.push_back("vertical plane at rho=" + std::to_string(prior.rho) +
                             " maps outside the grid, skipped as prior");
      continue;
    }
    priors.push_back(prior);
  }

  // 5. Sparse solve; the prior-constrained path only when priors exist.
  const Eigen::VectorXd stacked = h_walls.stacked();
  const Eigen::VectorXd corr = dict.matrix().transpose() * stacked;
  const double lambda = cfg.lambda_absolute
                            ? *cfg.lambda_absolute
                            : lambda_from_correlation(corr, cfg.lambda_scale);

  LassoResult base = solve_lasso_quadratic(dict.gram(), corr, stacked.squaredNorm(),
                                           2.0 * dict.gram_spectral_norm(), lambda,
                                           nullptr, cfg.solver);

  LassoResult solved;
  if (cfg.use_prior_constraint && !priors.empty()) {
    const WeightVector weight = build_prior_weight(grid, priors);
    const double unconstrained_weighted =
        weight.values.cwiseAbs2().cwiseProduct(base.s.cwiseAbs2()).sum();
    if (unconstrained_weighted > 0.0) {
      const double bound = cfg.b_prior_scale * unconstrained_weighted;
      LassoOptions warm_opts = cfg.solver;
      warm_opts.warm_start = &base.s;
      solved = solve_lasso_with_prior(dict, stacked, lambda, weight, bound, warm_opts);
      result.priors_used = priors;
    } else {
      solved = std::move(base);  // already concentrated on the prior set
      result.priors_used = priors;
    }
  } else {
    solved = std::move(base);
  }

  if (!solved.diagnostics.converged)
    result.notes.push_back("solver flagged non-converged (kkt residual " +
                           std::to_string(solved.diagnostics.kkt_residual) + ")");
  if (!solved.diagnostics.constraint_satisfied)
    result.notes.push_back("prior constraint unattained (||Ls||^2 = " +
                           std::to_string(solved.diagnostics.weighted_norm_sq) + ")");

  if (!cfg.solve_log_path.empty())
    append_solve_log(cfg.solve_log_path,
                     cfg.solve_log_id.empty() ? "estimate" : cfg.solve_log_id,
                     solved.diagnostics);

  // 6-7. Peaks -> plane equations.
  result.solution.values = std::move(solved.s);
  result.solution.grid = grid;
  result.diagnostics = solved.diagnostics;

  for (const Peak& peak : extract_peaks(result.solution, cfg.peaks)) {
    DetectedReflector det;
    det.plane = image_source_to_plane(peak.radius, peak.azimuth);
    det.confidence = peak.magnitude;
    det.peak = peak;
    result.detections.push_back(det);
  }
  return result;
}

namespace {

bool matches(const DetectedReflector& det, const Plane& truth, const HitSpec& spec,
             const PolarGrid& grid) {
  const double image_det = 2.0 * det.plane.distance;
  const double image_truth = 2.0 * truth.distance;
  const double radial_tol = spec.tol_radial * grid.radial_step() + 1e-9;
  const double angular_tol = spec.tol_angular * grid.angular_step() + 1e-9;
  return std::fabs(image_det - image_truth) <= radial_tol &&
         angular_distance(plane_azimuth(det.plane), plane_azimuth(truth)) <=
             angular_tol;
}

}  // namespace

std::vector<int> hitrate(const EstimationResult& result,
                         const std::vector<Plane>& truth, const HitSpec& spec,
                         const PolarGrid& grid) {
  std::vector<int> hits(truth.size(), 0);
  std::set<std::size_t> taken;
  for (const DetectedReflector& det : result.detections) {
    for (std::size_t t = 0; t < truth.size(); ++t) {
      if (hits[t] || taken.count(t)) continue;
      if (matches(det, truth[t], spec, grid)) {
        hits[t] = 1;
        taken.insert(t);
        break;  // one truth plane per detection
      }
    }
  }
  return hits;
}

double normal_mse(const EstimationResult& result, const Plane& truth,
                  const HitSpec& spec, const PolarGrid& grid,
                  bool* no_detection) {
  if (no_detection) *no_detection = false;
  if (result.detections.empty()) {
    if (no_detection) *no_detection = true;
    return 4.0 / 3.0;  // antipodal unit normal
  }
  const DetectedReflector* best = &result.detections.front();
  for (const DetectedReflector& det : result.detections) {
    if (matches(det, truth, spec, grid)) {
      best = &det;
      break;
    }
  }
  return (best->plane.normal - truth.normal).squaredNorm() / 3.0;
}

}  // namespace echowall
