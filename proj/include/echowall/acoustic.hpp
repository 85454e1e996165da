#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "echowall/geometry.hpp"

namespace echowall {

// Hann-windowed sinc used to place impulses at fractional sample delays.
// The same kernel backs both the simulator and the dictionary so that an
// on-grid image source is represented exactly by its dictionary column.
struct FracDelayKernel {
  int half_width = 16;

  double value(double t) const;

  // h[n] += amplitude * k(n - delay) for every tap inside [0, length).
  // Returns false when part of the kernel support fell outside the buffer.
  bool add_impulse(Eigen::Ref<Eigen::VectorXd> h, double delay_samples,
                   double amplitude) const;
};

// Loudspeaker magnitude directivity. The cardioid family interpolates
// between omni (q = 1) and a pure cardioid (q = 0); gains are clamped from
// below by floor_gain so no direction is fully silent.
struct Directivity {
  enum class Kind { Omnidirectional, CardioidFamily };

  Kind kind = Kind::CardioidFamily;
  double q = 0.4;
  double floor_gain = 0.05;

  // angle is measured from the speaker axis.
  double gain(double angle_from_axis) const;

  static Directivity omni() { return {Kind::Omnidirectional, 1.0, 0.0}; }
  static Directivity cardioid(double q, double floor_gain = 0.05) {
    return {Kind::CardioidFamily, q, floor_gain};
  }
};

// M-channel discrete room impulse response h[n, m].
struct ImpulseResponseSet {
  Eigen::MatrixXd samples;  // length x channels
  double sample_rate = 16000.0;
  std::vector<std::string> warnings;

  int length() const { return static_cast<int>(samples.rows()); }
  int channels() const { return static_cast<int>(samples.cols()); }

  // Channel-major stacking h = [h^(0); h^(1); ...; h^(M-1)].
  Eigen::VectorXd stacked() const;
  static ImpulseResponseSet from_stacked(const Eigen::VectorXd& stacked,
                                         int channels, double sample_rate);

  double energy() const { return samples.squaredNorm(); }
};

struct RirParams {
  double sample_rate = 16000.0;
  int length = 256;
  double speed_of_sound = 343.0;
  bool include_direct = false;
  FracDelayKernel kernel;
};

// Zero-mean white Gaussian noise at a target SNR. The variance is derived
// from reference_energy when given (e.g. an omnidirectional-equivalent
// response, so the noise floor does not track the directivity attenuation),
// otherwise from the energy of the input itself.
struct NoiseSpec {
  double snr_db = 21.0;
  std::uint64_t seed = 0;
  std::optional<double> reference_energy;
};

// First-order forward model: one mirrored image source per acoustic plane,
// fractional-delay impulse per microphone with 1/d spreading and the
// loudspeaker gain toward the image azimuth. A reflection whose kernel
// support does not fit inside the response length records a truncation
// warning on the result.
ImpulseResponseSet simulate_rir(const std::vector<Plane>& planes,
                                const SystemPose& pose,
                                const Directivity& directivity,
                                const RirParams& params);

// h + n with empirical SNR within 0.5 dB of spec for large responses;
// deterministic given the seed. Infinite snr_db returns the input.
ImpulseResponseSet add_noise(const ImpulseResponseSet& h, const NoiseSpec& spec);

// Subtracts the synthesized direct-path template per channel, scaled by its
// least-squares coefficient. Exact on simulator-generated data because the
// same kernel and geometry are used; leaves the input untouched when no
// direct path is present.
ImpulseResponseSet remove_direct_path(const ImpulseResponseSet& h,
                                      const SystemPose& pose,
                                      const Directivity& directivity,
                                      double speed_of_sound = 343.0,
                                      const FracDelayKernel& kernel = {});

// Inspection export: per channel a (sample index, amplitude) column pair.
void write_rir_csv(const ImpulseResponseSet& h, const std::string& path);

}  // namespace echowall
