#include "echowall/lidar.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "echowall/rng.hpp"

namespace echowall {

namespace {

void validate(const LidarConfig& cfg) {
  if (cfg.fov_hor_deg <= 0.0 || cfg.fov_hor_deg > 180.0 ||
      cfg.fov_ver_deg <= 0.0 || cfg.fov_ver_deg > 180.0)
    throw std::invalid_argument("lidar FOV must be in (0, 180] degrees");
  if (cfg.rays_hor < 2 || cfg.rays_ver < 2)
    throw std::invalid_argument("lidar needs at least 2 rays per axis");
  if (cfg.max_range <= 0.0)
    throw std::invalid_argument("lidar max_range must be > 0");
}

}  // namespace

PointCloud cast_cloud(const std::vector<Plane>& planes, const LidarConfig& cfg) {
  validate(cfg);
  Rng rng(cfg.seed);
  PointCloud cloud;
  cloud.points.reserve(static_cast<std::size_t>(cfg.rays_hor) * cfg.rays_ver);

  const double half_hor = deg2rad(cfg.fov_hor_deg) / 2.0;
  const double half_ver = deg2rad(cfg.fov_ver_deg) / 2.0;

  for (int j = 0; j < cfg.rays_ver; ++j) {
    const double elev = -half_ver + 2.0 * half_ver * j / (cfg.rays_ver - 1);
    for (int i = 0; i < cfg.rays_hor; ++i) {
      const double azim =
          cfg.center_azimuth - half_hor + 2.0 * half_hor * i / (cfg.rays_hor - 1);
      const Vec3 dir(std::cos(elev) * std::cos(azim),
                     std::cos(elev) * std::sin(azim), std::sin(elev));

      double best = std::numeric_limits<double>::infinity();
      for (const Plane& plane : planes) {
        if (!plane.lidar_reflective) continue;
        const double along = plane.normal.dot(dir);
        if (along <= 1e-12) continue;  // parallel or facing away
        const double t = plane.distance / along;
        if (t <= 0.0 || t > cfg.max_range || t >= best) continue;
        if (!plane.within_bounds(t * dir)) continue;
        best = t;
      }
      if (!std::isfinite(best)) continue;

      double range = best;
      if (cfg.range_noise_sigma > 0.0) range += cfg.range_noise_sigma * rng.normal();
      if (range <= 0.0 || range > cfg.max_range) continue;
      cloud.points.push_back(range * dir);
    }
  }
  return cloud;
}

void write_xyz(const PointCloud& cloud, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  for (const Vec3& p : cloud.points)
    std::fprintf(f, "%.6f %.6f %.6f\n", p.x(), p.y(), p.z());
  std::fclose(f);
}

PointCloud read_xyz(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  PointCloud cloud;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    Vec3 p;
    if (!(ss >> p.x() >> p.y() >> p.z()))
      throw std::runtime_error("malformed xyz line: " + line);
    cloud.points.push_back(p);
  }
  return cloud;
}

}  // namespace echowall
