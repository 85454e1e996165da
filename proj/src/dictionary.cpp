#include "echowall/dictionary.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace echowall {

Dictionary::Dictionary(PolarGrid grid, SystemPose pose, Directivity directivity,
                       int response_length, FracDelayKernel kernel)
    : grid_(std::move(grid)),
      pose_(std::move(pose)),
      directivity_(std::move(directivity)),
      response_length_(response_length),
      kernel_(kernel) {
  const int mics = pose_.mic_count;
  const int rows = mics * response_length_;
  phi_.setZero(rows, grid_.size());

  const double fs_over_c = grid_.sample_rate / grid_.speed_of_sound;
  for (int m_dir = 0; m_dir < grid_.angular_count; ++m_dir) {
    const double dir_gain =
        directivity_.gain(grid_.azimuth(m_dir) - pose_.speaker_axis_angle);
    for (int q = 0; q < grid_.radial_count; ++q) {
      const Vec3 candidate = grid_.point(q, m_dir);
      const int col = grid_.flat_index(q, m_dir);
      for (int mic = 0; mic < mics; ++mic) {
        const double dist = (candidate - pose_.mic_position(mic)).norm();
        const double delay = dist * fs_over_c;
        if (delay + kernel_.half_width >= response_length_) {
          throw std::invalid_argument(
              "dictionary column (q=" + std::to_string(q) +
              ", m=" + std::to_string(m_dir) + ") needs delay " +
              std::to_string(delay) + " + kernel half-width " +
              std::to_string(kernel_.half_width) +
              " which exceeds the response length " +
              std::to_string(response_length_));
        }
        kernel_.add_impulse(phi_.col(col).segment(mic * response_length_,
                                                  response_length_),
                            delay, dir_gain / dist);
      }
    }
  }
}

const Eigen::MatrixXd& Dictionary::gram() const {
  std::call_once(prep_flag_, [this] {
    gram_.noalias() = phi_.transpose() * phi_;
    // Power iteration for the largest eigenvalue; deterministic start.
    Eigen::VectorXd v = Eigen::VectorXd::Ones(gram_.cols()).normalized();
    double lambda = 0.0;
    for (int it = 0; it < 100; ++it) {
      Eigen::VectorXd w = gram_ * v;
      const double norm = w.norm();
      if (norm == 0.0) break;
      v = w / norm;
      lambda = norm;
    }
    spectral_norm_ = lambda * 1.01;  // slack so 1/L stays a valid step
  });
  return gram_;
}

double Dictionary::gram_spectral_norm() const {
  gram();
  return spectral_norm_;
}

Dictionary build_dictionary(const PolarGrid& grid, const SystemPose& pose,
                            const Directivity& directivity, int response_length,
                            const FracDelayKernel& kernel) {
  return Dictionary(grid, pose, directivity, response_length, kernel);
}

}  // namespace echowall
