#include "echowall/polar_grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace echowall {

std::pair<int, int> PolarGrid::nearest_cell(double r, double azimuth_rad) const {
  int q = static_cast<int>(std::lround((r - array_radius) / radial_step())) - 1;
  q = std::clamp(q, 0, radial_count - 1);
  int m = static_cast<int>(std::lround(wrap_angle(azimuth_rad) / angular_step()));
  m = ((m % angular_count) + angular_count) % angular_count;
  return {q, m};
}

WeightVector build_prior_weight(const PolarGrid& grid,
                                const std::vector<PriorLocation>& priors) {
  WeightVector w;
  w.values = Eigen::VectorXd::Constant(grid.size(),
                                       std::numeric_limits<double>::infinity());

  for (const PriorLocation& prior : priors) {
    const double image_radius = 2.0 * prior.rho;
    if (image_radius < grid.r_min() || image_radius > grid.r_max()) {
      throw std::out_of_range(
          "prior at rho=" + std::to_string(prior.rho) + " maps to image radius " +
          std::to_string(image_radius) + " outside the grid [" +
          std::to_string(grid.r_min()) + ", " + std::to_string(grid.r_max()) + "]");
    }
    const int n_pc = std::clamp(
        static_cast<int>(std::lround((image_radius - grid.array_radius) /
                                     grid.radial_step())) -
            1,
        0, grid.radial_count - 1);
    int m_pc = static_cast<int>(
        std::lround(wrap_angle(prior.alpha) / grid.angular_step()));
    m_pc = ((m_pc % grid.angular_count) + grid.angular_count) % grid.angular_count;
    w.anchors.emplace_back(n_pc, m_pc);

    for (int m = 0; m < grid.angular_count; ++m) {
      const int dm_raw = std::abs(m - m_pc);
      const int dm = std::min(dm_raw, grid.angular_count - dm_raw);
      for (int q = 0; q < grid.radial_count; ++q) {
        const double l = std::abs(q - n_pc) * (1.0 + dm);
        double& cell = w.values[grid.flat_index(q, m)];
        cell = std::min(cell, l);
      }
    }
  }
  if (priors.empty()) w.values.setZero();
  return w;
}

}  // namespace echowall
