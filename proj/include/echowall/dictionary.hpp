#pragma once

#include <Eigen/Core>
#include <memory>
#include <mutex>

#include "echowall/acoustic.hpp"
#include "echowall/polar_grid.hpp"

namespace echowall {

// Linear operator mapping image-source activations on the polar grid to the
// stacked multi-channel response. Column (q, m) is exactly the stacked
// simulator output for a unit image source at grid point (q, m); the shared
// fractional-delay kernel makes that an identity, not an approximation.
//
// The Gram matrix and a spectral norm bound are computed once on demand and
// shared across solves; the object is immutable afterwards and safe to use
// from several threads.
class Dictionary {
 public:
  Dictionary(PolarGrid grid, SystemPose pose, Directivity directivity,
             int response_length, FracDelayKernel kernel = {});

  const Eigen::MatrixXd& matrix() const { return phi_; }
  const PolarGrid& grid() const { return grid_; }
  const SystemPose& pose() const { return pose_; }
  const Directivity& directivity() const { return directivity_; }
  int response_length() const { return response_length_; }
  int rows() const { return static_cast<int>(phi_.rows()); }
  int cols() const { return static_cast<int>(phi_.cols()); }

  // Phi^T Phi, cached.
  const Eigen::MatrixXd& gram() const;
  // Largest eigenvalue of the Gram (power iteration), cached.
  double gram_spectral_norm() const;

 private:
  PolarGrid grid_;
  SystemPose pose_;
  Directivity directivity_;
  int response_length_;
  FracDelayKernel kernel_;
  Eigen::MatrixXd phi_;

  mutable std::once_flag prep_flag_;
  mutable Eigen::MatrixXd gram_;
  mutable double spectral_norm_ = 0.0;
};

// Builds the dictionary; throws std::invalid_argument naming the offending
// grid point when a column's delay support does not fit the response length.
Dictionary build_dictionary(const PolarGrid& grid, const SystemPose& pose,
                            const Directivity& directivity, int response_length,
                            const FracDelayKernel& kernel = {});

}  // namespace echowall
