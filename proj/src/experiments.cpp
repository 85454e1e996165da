#include "echowall/experiments.hpp"

#include <atomic>
#include <functional>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "echowall/rng.hpp"

namespace echowall {

namespace {

constexpr double kInfSnr = std::numeric_limits<double>::infinity();

// Canonical integer encodings so per-cell seeds depend on sweep values, not
// on their position in the sweep lists.
std::int64_t canon_angle(double deg) { return static_cast<std::int64_t>(std::llround(deg * 100.0)); }
std::int64_t canon_snr(double db) {
  if (std::isinf(db)) return std::numeric_limits<std::int64_t>::max();
  return static_cast<std::int64_t>(std::llround(db * 1000.0));
}
std::int64_t canon_dist(double meters) { return static_cast<std::int64_t>(std::llround(meters * 1e6)); }

struct CellOutcome {
  ResultRow baseline;
  ResultRow proposed;
};

// Shared per-experiment machinery: dictionary, grid, estimator configs.
struct Harness {
  const ExperimentConfig& cfg;
  PolarGrid grid;
  Dictionary dict;
  EstimatorConfig baseline_cfg;
  EstimatorConfig proposed_cfg;

  Harness(const ExperimentConfig& cfg_, const Directivity& directivity)
      : cfg(cfg_),
        grid(cfg_.make_grid()),
        dict(grid, cfg_.pose, directivity, cfg_.response_length,
             FracDelayKernel{cfg_.kernel_half_width}),
        baseline_cfg(cfg_.make_estimator(false)),
        proposed_cfg(cfg_.make_estimator(true)) {
    dict.gram();  // prepare the shared cache before the workers start
  }

  ResultRow evaluate(const EstimationResult& res, const std::vector<Plane>& truth,
                     const std::string& method) const {
    ResultRow row;
    row.method = method;
    const auto hits = hitrate(res, truth, cfg.hit, grid);
    row.wall_hit = hits.empty() ? 0 : hits[0];
    row.window_hit = hits.size() > 1 ? hits[1] : 0;
    row.n_detections = static_cast<int>(res.detections.size());
    if (!res.detections.empty()) {
      const DetectedReflector& top = res.detections.front();
      row.detected_r = 2.0 * top.plane.distance;
      row.detected_alpha_deg = rad2deg(plane_azimuth(top.plane));
    } else {
      row.detected_r = std::numeric_limits<double>::quiet_NaN();
      row.detected_alpha_deg = std::numeric_limits<double>::quiet_NaN();
    }
    row.normal_mse = truth.empty()
                         ? 0.0
                         : normal_mse(res, truth.front(), cfg.hit, grid);
    row.floor_detected = res.horizontal_used.empty() ? 0 : 1;
    row.prior_used = res.priors_used.empty() ? 0 : 1;
    row.solver_iterations = res.diagnostics.iterations;
    row.solver_converged = res.diagnostics.converged ? 1 : 0;
    row.kkt_residual = res.diagnostics.kkt_residual;
    row.mu = res.diagnostics.mu;
    return row;
  }

  CellOutcome run_cell(const std::vector<Plane>& scene,
                       const std::vector<Plane>& truth, double snr_db,
                       std::uint64_t seed) const {
    ImpulseResponseSet h =
        simulate_rir(scene, cfg.pose, dict.directivity(), cfg.make_rir_params());
    if (std::isfinite(snr_db)) {
      // The noise floor is anchored to the omnidirectional-equivalent
      // response, so rotating a wall into a low-gain direction lowers its
      // effective SNR instead of rescaling the noise with it.
      const ImpulseResponseSet ref =
          simulate_rir(scene, cfg.pose, Directivity::omni(), cfg.make_rir_params());
      NoiseSpec spec;
      spec.snr_db = snr_db;
      spec.seed = seed;
      spec.reference_energy = ref.energy();
      h = add_noise(h, spec);
    }
    const PointCloud cloud = cast_cloud(scene, cfg.lidar);

    CellOutcome out;
    out.baseline = evaluate(estimate(h, cloud, dict, baseline_cfg), truth, "baseline");
    out.proposed = evaluate(estimate(h, cloud, dict, proposed_cfg), truth, "proposed");
    return out;
  }
};

// Runs fn(cell_index) over [0, count) on the configured number of workers.
void parallel_for(int count, int workers, const std::function<void(int)>& fn) {
  if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
  workers = std::max(1, std::min(workers, count));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

void validate_common(const ExperimentConfig& cfg) {
  if (cfg.pose.mic_count < 3)
    throw std::invalid_argument("config: need at least 3 microphones");
  if (cfg.grid_radial_count < 1)
    throw std::invalid_argument("config: radial_count must be >= 1");
  if (cfg.mc_runs < 1) throw std::invalid_argument("config: mc_runs must be >= 1");
}

}  // namespace

ResultsTable run_experiment_1(const ExperimentConfig& cfg) {
  validate_common(cfg);
  if (cfg.sweep.floor_distances.empty())
    throw std::invalid_argument("experiment 1 needs sweep.floor_distances");

  // The paper's first scenario is omnidirectional and noiseless.
  Harness harness(cfg, Directivity::omni());

  const double wall_azimuth = deg2rad(cfg.exp1.wall_azimuth_deg);
  const int cells = static_cast<int>(cfg.sweep.floor_distances.size());

  ResultsTable table;
  table.config_hash = config_hash(cfg);
  table.rows.resize(static_cast<std::size_t>(cells) * 2);

  parallel_for(cells, cfg.workers, [&](int c) {
    const double d_f = cfg.sweep.floor_distances[c];
    std::vector<Plane> scene;
    scene.push_back(Plane::vertical(wall_azimuth, cfg.exp1.wall_distance));
    scene.push_back(Plane::horizontal(d_f, /*below=*/true));
    const std::vector<Plane> truth = {scene[0]};

    const std::uint64_t seed = derive_seed(cfg.master_seed, canon_dist(d_f));
    CellOutcome out = harness.run_cell(scene, truth, kInfSnr, seed);
    for (ResultRow* row : {&out.baseline, &out.proposed}) {
      row->experiment = "exp1";
      row->floor_distance = d_f;
      row->snr_db = kInfSnr;
      row->seed = seed;
    }
    table.rows[2 * c] = out.baseline;
    table.rows[2 * c + 1] = out.proposed;
  });
  return table;
}

namespace {

ResultsTable run_rotating(const ExperimentConfig& cfg, const std::string& name,
                          const std::function<std::vector<Plane>(double)>& scene_at) {
  validate_common(cfg);
  if (cfg.sweep.angles_deg.empty() || cfg.sweep.snr_db.empty())
    throw std::invalid_argument(name + " needs sweep.angles_deg and sweep.snr_db");

  Harness harness(cfg, cfg.directivity);

  const int n_angle = static_cast<int>(cfg.sweep.angles_deg.size());
  const int n_snr = static_cast<int>(cfg.sweep.snr_db.size());
  const int cells = n_angle * n_snr * cfg.mc_runs;

  ResultsTable table;
  table.config_hash = config_hash(cfg);
  table.rows.resize(static_cast<std::size_t>(cells) * 2);

  parallel_for(cells, cfg.workers, [&](int c) {
    const int run = c % cfg.mc_runs;
    const int snr_i = (c / cfg.mc_runs) % n_snr;
    const int angle_i = c / (cfg.mc_runs * n_snr);
    const double angle_deg = cfg.sweep.angles_deg[angle_i];
    const double snr_db = cfg.sweep.snr_db[snr_i];

    const std::vector<Plane> scene = scene_at(deg2rad(angle_deg));
    std::vector<Plane> truth;
    for (const Plane& p : scene) truth.push_back(p);

    const std::uint64_t seed = derive_seed(cfg.master_seed, canon_angle(angle_deg),
                                           canon_snr(snr_db), run);
    CellOutcome out = harness.run_cell(scene, truth, snr_db, seed);
    for (ResultRow* row : {&out.baseline, &out.proposed}) {
      row->experiment = name;
      row->angle_deg = angle_deg;
      row->snr_db = snr_db;
      row->run = run;
      row->seed = seed;
    }
    table.rows[2 * c] = out.baseline;
    table.rows[2 * c + 1] = out.proposed;
  });
  return table;
}

}  // namespace

ResultsTable run_experiment_2(const ExperimentConfig& cfg) {
  return run_rotating(cfg, "exp2", [&](double angle) {
    Plane wall = Plane::vertical(angle, cfg.exp2.wall_distance);
    wall.bounds = PlaneBounds{cfg.exp2.wall_half_width, cfg.exp2.wall_half_height};
    return std::vector<Plane>{wall};
  });
}

ResultsTable run_experiment_3(const ExperimentConfig& cfg) {
  return run_rotating(cfg, "exp3", [&](double angle) {
    Plane wall = Plane::vertical(angle, cfg.exp3.wall_distance);
    wall.bounds = PlaneBounds{cfg.exp3.wall_half_width, cfg.exp3.wall_half_height};
    Plane window = Plane::vertical(angle + deg2rad(cfg.exp3.window_offset_deg),
                                   cfg.exp3.window_distance);
    window.bounds = PlaneBounds{cfg.exp3.wall_half_width, cfg.exp3.wall_half_height};
    window.lidar_reflective = false;
    return std::vector<Plane>{wall, window};
  });
}

namespace {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

double parse_double(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  return std::stod(s);
}

const char* kCsvHeader =
    "experiment,method,angle_deg,snr_db,floor_distance,run,seed,wall_hit,"
    "window_hit,detected_r,detected_alpha_deg,normal_mse,n_detections,"
    "floor_detected,prior_used,solver_iterations,solver_converged,"
    "kkt_residual,mu,config_hash";

}  // namespace

void write_results_csv(const ResultsTable& table, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  std::fprintf(f, "%s\n", kCsvHeader);
  for (const ResultRow& r : table.rows) {
    std::fprintf(f, "%s,%s,%s,%s,%s,%d,%llu,%d,%d,%s,%s,%s,%d,%d,%d,%d,%d,%s,%s,%s\n",
                 r.experiment.c_str(), r.method.c_str(),
                 format_double(r.angle_deg).c_str(), format_double(r.snr_db).c_str(),
                 format_double(r.floor_distance).c_str(), r.run,
                 static_cast<unsigned long long>(r.seed), r.wall_hit, r.window_hit,
                 format_double(r.detected_r).c_str(),
                 format_double(r.detected_alpha_deg).c_str(),
                 format_double(r.normal_mse).c_str(), r.n_detections,
                 r.floor_detected, r.prior_used, r.solver_iterations,
                 r.solver_converged, format_double(r.kkt_residual).c_str(),
                 format_double(r.mu).c_str(), table.config_hash.c_str());
  }
  std::fclose(f);
}

ResultsTable read_results_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty results csv");
  if (line != kCsvHeader) throw std::runtime_error("unexpected results csv header");

  ResultsTable table;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 20) throw std::runtime_error("malformed results row: " + line);
    ResultRow r;
    r.experiment = fields[0];
    r.method = fields[1];
    r.angle_deg = parse_double(fields[2]);
    r.snr_db = parse_double(fields[3]);
    r.floor_distance = parse_double(fields[4]);
    r.run = std::stoi(fields[5]);
    r.seed = std::stoull(fields[6]);
    r.wall_hit = std::stoi(fields[7]);
    r.window_hit = std::stoi(fields[8]);
    r.detected_r = parse_double(fields[9]);
    r.detected_alpha_deg = parse_double(fields[10]);
    r.normal_mse = parse_double(fields[11]);
    r.n_detections = std::stoi(fields[12]);
    r.floor_detected = std::stoi(fields[13]);
    r.prior_used = std::stoi(fields[14]);
    r.solver_iterations = std::stoi(fields[15]);
    r.solver_converged = std::stoi(fields[16]);
    r.kkt_residual = parse_double(fields[17]);
    r.mu = parse_double(fields[18]);
    table.config_hash = fields[19];
    table.rows.push_back(std::move(r));
  }
  return table;
}

double mean_hitrate(const ResultsTable& table, const std::string& method,
                    double angle_deg, double snr_db, bool window) {
  double sum = 0.0;
  int count = 0;
  for (const ResultRow& r : table.rows) {
    if (r.method != method) continue;
    if (std::fabs(r.angle_deg - angle_deg) > 1e-9) continue;
    if (!(std::fabs(r.snr_db - snr_db) < 1e-9 ||
          (std::isinf(r.snr_db) && std::isinf(snr_db))))
      continue;
    sum += window ? r.window_hit : r.wall_hit;
    ++count;
  }
  return count ? sum / count : 0.0;
}

}  // namespace echowall
