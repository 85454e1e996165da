#pragma once

#include <Eigen/Core>
#include <utility>
#include <vector>

#include "echowall/geometry.hpp"

namespace echowall {

// Candidate image-source grid in polar coordinates. Radial step is exactly
// one sample of travel (v_c / f_s); angular step matches the microphone
// spacing 2*pi/M. Candidate (q, m) sits at radius R_a + (q + 1) * dR and
// azimuth m * dA, flat index m * T + q (per-direction blocks stacked). The
// one-step offset keeps candidates strictly between R_min = R_a (a candidate
// exactly on the array circle would coincide with a microphone) and
// R_max = T * dR + R_a, which the last cell attains.
struct PolarGrid {
  int radial_count = 120;   // T
  int angular_count = 12;   // M
  double array_radius = 0.05;
  double sample_rate = 16000.0;
  double speed_of_sound = 343.0;

  double radial_step() const { return speed_of_sound / sample_rate; }
  double angular_step() const { return 2.0 * kPi / angular_count; }
  double r_min() const { return array_radius; }
  double r_max() const { return radial_count * radial_step() + array_radius; }

  int size() const { return radial_count * angular_count; }
  int flat_index(int q, int m) const { return m * radial_count + q; }
  std::pair<int, int> from_flat(int i) const {
    return {i % radial_count, i / radial_count};
  }

  double radius(int q) const { return array_radius + (q + 1) * radial_step(); }
  double azimuth(int m) const { return m * angular_step(); }
  Vec3 point(int q, int m) const {
    return {radius(q) * std::cos(azimuth(m)), radius(q) * std::sin(azimuth(m)), 0.0};
  }

  // Closest grid cell to a continuous (radius, azimuth); used to map
  // off-grid ground truth onto the candidate set.
  std::pair<int, int> nearest_cell(double r, double azimuth_rad) const;
};

// Sparse activation map s over the grid, stacked per-direction.
struct ImageSourceMap {
  Eigen::VectorXd values;
  PolarGrid grid;

  double operator()(int q, int m) const { return values[grid.flat_index(q, m)]; }
  double& operator()(int q, int m) { return values[grid.flat_index(q, m)]; }
};

// Diagonal weight for constrained solves; zero exactly at the anchors and
// growing with grid distance from them.
struct WeightVector {
  Eigen::VectorXd values;
  std::vector<std::pair<int, int>> anchors;  // (radial, angular) cells
};

struct PriorLocation {
  double rho = 0.0;    // plane distance from the point cloud
  double alpha = 0.0;  // plane azimuth
};

// Prior weight from detected vertical planes: the expected image source for
// a wall at (rho, alpha) sits at radius 2*rho in direction alpha. The weight
// is |n - n_pc| * (1 + |m - m_pc|) per cell with circular angular distance;
// multiple priors combine by elementwise minimum. A prior whose image radius
// falls outside [r_min, r_max] is rejected.
WeightVector build_prior_weight(const PolarGrid& grid,
                                const std::vector<PriorLocation>& priors);

}  // namespace echowall
