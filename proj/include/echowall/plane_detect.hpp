#pragma once

#include <vector>

#include "echowall/geometry.hpp"
#include "echowall/lidar.hpp"

namespace echowall {

struct DetectorParams {
  int neighborhood_k = 16;
  double normal_angle_tol_deg = 10.0;
  double plane_dist_tol = 0.01;
  int min_cluster_size = 50;
  double merge_angle_tol_deg = 5.0;
  double merge_dist_tol = 0.02;
};

struct DetectedPlane {
  Plane plane;  // normal oriented away from the origin, distance >= 0
  int inlier_count = 0;
  double rms_residual = 0.0;
};

// Co-planar clustering + total-least-squares fitting:
//   1. per-point normals from the k-nearest-neighbor covariance,
//   2. region growing under normal-agreement and point-to-plane tolerances,
//   3. TLS plane fit per cluster (smallest-eigenvector normal),
//   4. merging of clusters that agree within the merge tolerances,
//   5. clusters below min_cluster_size are dropped.
// Output is sorted by inlier count, descending. A cloud smaller than
// min_cluster_size yields an empty list.
std::vector<DetectedPlane> detect_planes(const PointCloud& cloud,
                                         const DetectorParams& params);

struct SplitPlanes {
  std::vector<DetectedPlane> horizontal;
  std::vector<DetectedPlane> vertical;
  std::vector<DetectedPlane> discarded;  // slanted beyond both tolerances
};

// Horizontal: normal within tol_deg of +-z. Vertical: normal z-component
// below sin(tol_deg). Anything in between is reported as discarded.
SplitPlanes split_horizontal_vertical(const std::vector<DetectedPlane>& planes,
                                      double tol_deg = 5.0);

}  // namespace echowall
