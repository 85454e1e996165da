#include "echowall/experiment_config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace echowall {

using nlohmann::json;

namespace {

json directivity_to_json(const Directivity& d) {
  return {{"kind", d.kind == Directivity::Kind::Omnidirectional ? "omni" : "cardioid"},
          {"q", d.q},
          {"floor_gain", d.floor_gain}};
}

Directivity directivity_from_json(const json& j) {
  Directivity d;
  const std::string kind = j.value("kind", "cardioid");
  if (kind == "omni") {
    d = Directivity::omni();
  } else if (kind == "cardioid") {
    d.kind = Directivity::Kind::CardioidFamily;
    d.q = j.value("q", 0.4);
    d.floor_gain = j.value("floor_gain", 0.05);
  } else {
    throw std::invalid_argument("unknown directivity kind: " + kind);
  }
  return d;
}

json plane_to_json(const ScenePlane& sp) {
  json j;
  j["kind"] = sp.kind;
  if (sp.kind == "vertical") {
    j["azimuth_deg"] = sp.azimuth_deg;
  } else if (sp.kind == "horizontal") {
    j["below"] = sp.below;
  } else {
    j["normal"] = {sp.plane.normal.x(), sp.plane.normal.y(), sp.plane.normal.z()};
  }
  j["distance"] = sp.plane.distance;
  if (sp.plane.bounds)
    j["bounds"] = {{"half_u", sp.plane.bounds->half_u},
                   {"half_v", sp.plane.bounds->half_v}};
  j["acoustic_reflective"] = sp.plane.acoustic_reflective;
  j["lidar_reflective"] = sp.plane.lidar_reflective;
  j["reflection_coeff"] = sp.plane.reflection_coeff;
  return j;
}

ScenePlane plane_from_json(const json& j) {
  ScenePlane sp;
  sp.kind = j.value("kind", "vertical");
  const double distance = j.value("distance", 1.0);
  if (sp.kind == "vertical") {
    sp.azimuth_deg = j.value("azimuth_deg", 0.0);
    sp.plane = Plane::vertical(deg2rad(sp.azimuth_deg), distance);
  } else if (sp.kind == "horizontal") {
    sp.below = j.value("below", true);
    sp.plane = Plane::horizontal(distance, sp.below);
  } else if (sp.kind == "general") {
    const auto n = j.at("normal");
    sp.plane.normal = Vec3(n.at(0), n.at(1), n.at(2)).normalized();
    sp.plane.distance = distance;
  } else {
    throw std::invalid_argument("unknown plane kind: " + sp.kind);
  }
  if (j.contains("bounds")) {
    PlaneBounds b;
    b.half_u = j["bounds"].value("half_u", 0.0);
    b.half_v = j["bounds"].value("half_v", 0.0);
    sp.plane.bounds = b;
  }
  sp.plane.acoustic_reflective = j.value("acoustic_reflective", true);
  sp.plane.lidar_reflective = j.value("lidar_reflective", true);
  sp.plane.reflection_coeff = j.value("reflection_coeff", 1.0);
  validate_plane(sp.plane);
  return sp;
}

}  // namespace

PolarGrid ExperimentConfig::make_grid() const {
  PolarGrid g;
  g.radial_count = grid_radial_count;
  g.angular_count = pose.mic_count;
  g.array_radius = pose.array_radius;
  g.sample_rate = sample_rate;
  g.speed_of_sound = speed_of_sound;
  return g;
}

RirParams ExperimentConfig::make_rir_params(bool include_direct) const {
  RirParams p;
  p.sample_rate = sample_rate;
  p.length = response_length;
  p.speed_of_sound = speed_of_sound;
  p.include_direct = include_direct;
  p.kernel.half_width = kernel_half_width;
  return p;
}

EstimatorConfig ExperimentConfig::make_estimator(bool use_lidar) const {
  EstimatorConfig e;
  e.use_lidar = use_lidar;
  e.lambda_scale = solver.lambda_scale;
  e.lambda_absolute = solver.lambda_absolute;
  e.b_horizontal_scale = solver.b_horizontal_scale;
  e.b_prior_scale = solver.b_prior_scale;
  e.split_tol_deg = split_tol_deg;
  e.detector = detector;
  e.peaks = peaks;
  e.solver.max_iter = solver.max_iter;
  e.solver.kkt_tol_rel = solver.kkt_tol_rel;
  return e;
}

ExperimentConfig config_from_json(const std::string& json_text) {
  const json j = json::parse(json_text);
  ExperimentConfig c;

  if (j.contains("pose")) {
    const json& p = j["pose"];
    c.pose.mic_count = p.value("mic_count", 12);
    c.pose.array_radius = p.value("array_radius", 0.05);
    c.pose.speaker_axis_angle = deg2rad(p.value("speaker_axis_angle_deg", 0.0));
    c.pose.lidar_axis_angle = deg2rad(p.value("lidar_axis_angle_deg", 180.0));
  }
  if (j.contains("grid")) c.grid_radial_count = j["grid"].value("radial_count", 120);
  if (j.contains("acoustics")) {
    const json& a = j["acoustics"];
    c.sample_rate = a.value("sample_rate", 16000.0);
    c.response_length = a.value("response_length", 256);
    c.speed_of_sound = a.value("speed_of_sound", 343.0);
    c.kernel_half_width = a.value("kernel_half_width", 16);
    if (a.contains("directivity")) c.directivity = directivity_from_json(a["directivity"]);
  }
  if (j.contains("lidar")) {
    const json& l = j["lidar"];
    c.lidar.fov_hor_deg = l.value("fov_hor_deg", 70.0);
    c.lidar.fov_ver_deg = l.value("fov_ver_deg", 50.0);
    c.lidar.rays_hor = l.value("rays_hor", 128);
    c.lidar.rays_ver = l.value("rays_ver", 96);
    c.lidar.center_azimuth = deg2rad(l.value("center_azimuth_deg", 180.0));
    c.lidar.range_noise_sigma = l.value("range_noise_sigma", 0.0);
    c.lidar.max_range = l.value("max_range", 5.0);
    c.lidar.seed = l.value("seed", 0);
  }
  if (j.contains("scene"))
    for (const json& p : j["scene"]) c.scene.push_back(plane_from_json(p));
  if (j.contains("solver")) {
    const json& s = j["solver"];
    c.solver.lambda_scale = s.value("lambda_scale", 0.1);
    if (s.contains("lambda_absolute") && !s["lambda_absolute"].is_null())
      c.solver.lambda_absolute = s["lambda_absolute"].get<double>();
    c.solver.b_horizontal_scale = s.value("b_horizontal_scale", 1e-3);
    c.solver.b_prior_scale = s.value("b_prior_scale", 1e-2);
    c.solver.max_iter = s.value("max_iter", 2000);
    c.solver.kkt_tol_rel = s.value("kkt_tol_rel", 1e-6);
  }
  if (j.contains("peaks")) {
    const json& p = j["peaks"];
    c.peaks.rel_threshold = p.value("rel_threshold", 0.5);
    c.peaks.nms_radius_q = p.value("nms_radius_q", 3);
    c.peaks.nms_radius_m = p.value("nms_radius_m", 1);
    c.peaks.max_peaks = p.value("max_peaks", 8);
  }
  if (j.contains("hit")) {
    c.hit.tol_radial = j["hit"].value("tol_radial", 2);
    c.hit.tol_angular = j["hit"].value("tol_angular", 1);
  }
  if (j.contains("detector")) {
    const json& d = j["detector"];
    c.detector.neighborhood_k = d.value("neighborhood_k", 16);
    c.detector.normal_angle_tol_deg = d.value("normal_angle_tol_deg", 10.0);
    c.detector.plane_dist_tol = d.value("plane_dist_tol", 0.01);
    c.detector.min_cluster_size = d.value("min_cluster_size", 50);
    c.detector.merge_angle_tol_deg = d.value("merge_angle_tol_deg", 5.0);
    c.detector.merge_dist_tol = d.value("merge_dist_tol", 0.02);
  }
  c.split_tol_deg = j.value("split_tol_deg", 5.0);
  if (j.contains("sweep")) {
    const json& s = j["sweep"];
    c.sweep.snr_db = s.value("snr_db", std::vector<double>{});
    c.sweep.angles_deg = s.value("angles_deg", std::vector<double>{});
    c.sweep.floor_distances = s.value("floor_distances", std::vector<double>{});
  }
  c.mc_runs = j.value("mc_runs", 25);
  c.master_seed = j.value("master_seed", std::uint64_t{1});
  c.workers = j.value("workers", 0);
  c.out_dir = j.value("out_dir", "out");
  if (j.contains("exp1")) {
    c.exp1.wall_distance = j["exp1"].value("wall_distance", 0.5);
    c.exp1.wall_azimuth_deg = j["exp1"].value("wall_azimuth_deg", 0.0);
  }
  if (j.contains("exp2")) {
    c.exp2.wall_distance = j["exp2"].value("wall_distance", 0.5);
    c.exp2.wall_half_width = j["exp2"].value("wall_half_width", 0.5);
    c.exp2.wall_half_height = j["exp2"].value("wall_half_height", 0.5);
  }
  if (j.contains("exp3")) {
    c.exp3.wall_distance = j["exp3"].value("wall_distance", 0.4);
    c.exp3.window_distance = j["exp3"].value("window_distance", 0.6);
    c.exp3.window_offset_deg = j["exp3"].value("window_offset_deg", 90.0);
    c.exp3.wall_half_width = j["exp3"].value("wall_half_width", 0.5);
    c.exp3.wall_half_height = j["exp3"].value("wall_half_height", 0.5);
  }
  return c;
}

std::string config_to_json(const ExperimentConfig& c) {
  json j;
  j["pose"] = {{"mic_count", c.pose.mic_count},
               {"array_radius", c.pose.array_radius},
               {"speaker_axis_angle_deg", rad2deg(c.pose.speaker_axis_angle)},
               {"lidar_axis_angle_deg", rad2deg(c.pose.lidar_axis_angle)}};
  j["grid"] = {{"radial_count", c.grid_radial_count}};
  j["acoustics"] = {{"sample_rate", c.sample_rate},
                    {"response_length", c.response_length},
                    {"speed_of_sound", c.speed_of_sound},
                    {"kernel_half_width", c.kernel_half_width},
                    {"directivity", directivity_to_json(c.directivity)}};
  j["lidar"] = {{"fov_hor_deg", c.lidar.fov_hor_deg},
                {"fov_ver_deg", c.lidar.fov_ver_deg},
                {"rays_hor", c.lidar.rays_hor},
                {"rays_ver", c.lidar.rays_ver},
                {"center_azimuth_deg", rad2deg(c.lidar.center_azimuth)},
                {"range_noise_sigma", c.lidar.range_noise_sigma},
                {"max_range", c.lidar.max_range},
                {"seed", c.lidar.seed}};
  j["scene"] = json::array();
  for (const ScenePlane& sp : c.scene) j["scene"].push_back(plane_to_json(sp));
  j["solver"] = {{"lambda_scale", c.solver.lambda_scale},
                 {"b_horizontal_scale", c.solver.b_horizontal_scale},
                 {"b_prior_scale", c.solver.b_prior_scale},
                 {"max_iter", c.solver.max_iter},
                 {"kkt_tol_rel", c.solver.kkt_tol_rel}};
  if (c.solver.lambda_absolute)
    j["solver"]["lambda_absolute"] = *c.solver.lambda_absolute;
  else
    j["solver"]["lambda_absolute"] = nullptr;
  j["peaks"] = {{"rel_threshold", c.peaks.rel_threshold},
                {"nms_radius_q", c.peaks.nms_radius_q},
                {"nms_radius_m", c.peaks.nms_radius_m},
                {"max_peaks", c.peaks.max_peaks}};
  j["hit"] = {{"tol_radial", c.hit.tol_radial}, {"tol_angular", c.hit.tol_angular}};
  j["detector"] = {{"neighborhood_k", c.detector.neighborhood_k},
                   {"normal_angle_tol_deg", c.detector.normal_angle_tol_deg},
                   {"plane_dist_tol", c.detector.plane_dist_tol},
                   {"min_cluster_size", c.detector.min_cluster_size},
                   {"merge_angle_tol_deg", c.detector.merge_angle_tol_deg},
                   {"merge_dist_tol", c.detector.merge_dist_tol}};
  j["split_tol_deg"] = c.split_tol_deg;
  j["sweep"] = {{"snr_db", c.sweep.snr_db},
                {"angles_deg", c.sweep.angles_deg},
                {"floor_distances", c.sweep.floor_distances}};
  j["mc_runs"] = c.mc_runs;
  j["master_seed"] = c.master_seed;
  j["workers"] = c.workers;
  j["out_dir"] = c.out_dir;
  j["exp1"] = {{"wall_distance", c.exp1.wall_distance},
               {"wall_azimuth_deg", c.exp1.wall_azimuth_deg}};
  j["exp2"] = {{"wall_distance", c.exp2.wall_distance},
               {"wall_half_width", c.exp2.wall_half_width},
               {"wall_half_height", c.exp2.wall_half_height}};
  j["exp3"] = {{"wall_distance", c.exp3.wall_distance},
               {"window_distance", c.exp3.window_distance},
               {"window_offset_deg", c.exp3.window_offset_deg},
               {"wall_half_width", c.exp3.wall_half_width},
               {"wall_half_height", c.exp3.wall_half_height}};
  return j.dump(2) + "\n";
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json(ss.str());
}

void save_config(const ExperimentConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << config_to_json(cfg);
}

std::string config_hash(const ExperimentConfig& cfg) {
  const std::string text = config_to_json(cfg);
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace echowall
