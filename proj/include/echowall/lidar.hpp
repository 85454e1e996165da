#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "echowall/geometry.hpp"

namespace echowall {

// Abstracted LiDAR: a regular angular grid of rays spanning the field of
// view around the center azimuth. Not a real scan pattern; the sensor model
// in the estimation problem is just "an FOV that returns surface points".
struct LidarConfig {
  double fov_hor_deg = 70.0;
  double fov_ver_deg = 50.0;
  int rays_hor = 128;
  int rays_ver = 96;
  double center_azimuth = kPi;
  double range_noise_sigma = 0.0;
  double max_range = 5.0;
  std::uint64_t seed = 0;
};

struct PointCloud {
  std::vector<Vec3> points;

  bool empty() const { return points.empty(); }
  std::size_t size() const { return points.size(); }
};

// Casts every ray against the lidar-reflective planes (honoring rectangular
// bounds) and keeps the nearest hit with positive range <= max_range.
// Gaussian range noise is applied along the ray when sigma > 0. Rays that
// hit nothing contribute no point; an empty cloud is a valid result.
PointCloud cast_cloud(const std::vector<Plane>& planes, const LidarConfig& cfg);

// XYZ text format: one "x y z" triple per line, meters, 6 decimals.
void write_xyz(const PointCloud& cloud, const std::string& path);
PointCloud read_xyz(const std::string& path);

}  // namespace echowall
