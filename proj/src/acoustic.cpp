#include "echowall/acoustic.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "echowall/rng.hpp"

namespace echowall {

namespace {

double sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = kPi * x;
  return std::sin(px) / px;
}

}  // namespace

double FracDelayKernel::value(double t) const {
  const double w = static_cast<double>(half_width);
  if (std::fabs(t) >= w) return 0.0;
  const double hann = 0.5 * (1.0 + std::cos(kPi * t / w));
  return sinc(t) * hann;
}

bool FracDelayKernel::add_impulse(Eigen::Ref<Eigen::VectorXd> h,
                                  double delay_samples, double amplitude) const {
  const int n_lo = static_cast<int>(std::ceil(delay_samples - half_width));
  const int n_hi = static_cast<int>(std::floor(delay_samples + half_width));
  const int len = static_cast<int>(h.size());
  bool fits = n_lo >= 0 && n_hi < len;
  for (int n = std::max(n_lo, 0); n <= std::min(n_hi, len - 1); ++n) {
    h[n] += amplitude * value(static_cast<double>(n) - delay_samples);
  }
  return fits;
}

double Directivity::gain(double angle_from_axis) const {
  if (kind == Kind::Omnidirectional) return 1.0;
  return std::max(q + (1.0 - q) * std::cos(angle_from_axis), floor_gain);
}

Eigen::VectorXd ImpulseResponseSet::stacked() const {
  Eigen::VectorXd v(static_cast<Eigen::Index>(length()) * channels());
  for (int m = 0; m < channels(); ++m) v.segment(m * length(), length()) = samples.col(m);
  return v;
}

ImpulseResponseSet ImpulseResponseSet::from_stacked(const Eigen::VectorXd& stacked,
                                                    int channels,
                                                    double sample_rate) {
  if (channels <= 0 || stacked.size() % channels != 0)
    throw std::invalid_argument("stacked length is not a multiple of the channel count");
  const int len = static_cast<int>(stacked.size()) / channels;
  ImpulseResponseSet h;
  h.sample_rate = sample_rate;
  h.samples.resize(len, channels);
  for (int m = 0; m < channels; ++m) h.samples.col(m) = stacked.segment(m * len, len);
  return h;
}

namespace {

// Azimuth of an image source as seen from the origin; sources on the z axis
// (horizontal reflectors) have no azimuth and radiate at the on-axis gain.
double image_azimuth(const Vec3& pos) {
  if (pos.x() == 0.0 && pos.y() == 0.0) return 0.0;
  return std::atan2(pos.y(), pos.x());
}

void add_source(ImpulseResponseSet& out, const SystemPose& pose,
                const Directivity& directivity, const RirParams& params,
                const Vec3& position, double gain_scale) {
  const double fs_over_c = params.sample_rate / params.speed_of_sound;
  const double dir_gain =
      directivity.gain(image_azimuth(position) - pose.speaker_axis_angle);
  for (int m = 0; m < pose.mic_count; ++m) {
    const double dist = (position - pose.mic_position(m)).norm();
    if (dist <= 0.0)
      throw std::invalid_argument("source coincides with a microphone");
    const double delay = dist * fs_over_c;
    const double amp = dir_gain * gain_scale / dist;
    if (!params.kernel.add_impulse(out.samples.col(m), delay, amp)) {
      out.warnings.push_back(
          "reflection at delay " + std::to_string(delay) +
          " samples truncated by response length " + std::to_string(params.length));
    }
  }
}

}  // namespace

ImpulseResponseSet simulate_rir(const std::vector<Plane>& planes,
                                const SystemPose& pose,
                                const Directivity& directivity,
                                const RirParams& params) {
  if (params.length < 1) throw std::invalid_argument("response length must be >= 1");
  if (pose.mic_count < 3) throw std::invalid_argument("need at least 3 microphones");

  ImpulseResponseSet out;
  out.sample_rate = params.sample_rate;
  out.samples = Eigen::MatrixXd::Zero(params.length, pose.mic_count);

  for (const Plane& plane : planes) {
    if (!plane.acoustic_reflective) continue;
    const ImageSource img = mirror_source(pose.origin, plane);
    add_source(out, pose, directivity, params, img.position, img.gain);
  }
  if (params.include_direct) {
    // Direct path: distance R_a to every mic, gain toward each mic azimuth.
    const double fs_over_c = params.sample_rate / params.speed_of_sound;
    for (int m = 0; m < pose.mic_count; ++m) {
      const double dist = pose.array_radius;
      const double amp =
          directivity.gain(pose.mic_azimuth(m) - pose.speaker_axis_angle) / dist;
      if (!params.kernel.add_impulse(out.samples.col(m), dist * fs_over_c, amp)) {
        out.warnings.push_back("direct path truncated by response length");
      }
    }
  }
  return out;
}

ImpulseResponseSet add_noise(const ImpulseResponseSet& h, const NoiseSpec& spec) {
  if (std::isinf(spec.snr_db)) return h;
  const double ref = spec.reference_energy.value_or(h.energy());
  if (ref <= 0.0)
    throw std::invalid_argument("add_noise: finite SNR requested on an all-zero response");

  const double n = static_cast<double>(h.length()) * h.channels();
  const double sigma = std::sqrt(ref / (n * std::pow(10.0, spec.snr_db / 10.0)));

  Rng rng(spec.seed);
  ImpulseResponseSet out = h;
  for (int m = 0; m < h.channels(); ++m)
    for (int i = 0; i < h.length(); ++i) out.samples(i, m) += sigma * rng.normal();
  return out;
}

ImpulseResponseSet remove_direct_path(const ImpulseResponseSet& h,
                                      const SystemPose& pose,
                                      const Directivity& directivity,
                                      double speed_of_sound,
                                      const FracDelayKernel& kernel) {
  RirParams params;
  params.sample_rate = h.sample_rate;
  params.length = h.length();
  params.speed_of_sound = speed_of_sound;
  params.include_direct = true;
  params.kernel = kernel;
  const ImpulseResponseSet direct = simulate_rir({}, pose, directivity, params);

  // Least-squares subtraction of the synthesized template per channel: exact
  // on simulator data, and a no-op when no direct path is present (the
  // template does not overlap the reflections).
  ImpulseResponseSet out = h;
  for (int m = 0; m < h.channels(); ++m) {
    const double norm_sq = direct.samples.col(m).squaredNorm();
    if (norm_sq <= 0.0) continue;
    const double coeff = h.samples.col(m).dot(direct.samples.col(m)) / norm_sq;
    out.samples.col(m) -= coeff * direct.samples.col(m);
  }
  return out;
}

void write_rir_csv(const ImpulseResponseSet& h, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  for (int m = 0; m < h.channels(); ++m) {
    std::fprintf(f, m ? ",n_ch%d,ch%d" : "n_ch%d,ch%d", m, m);
  }
  std::fprintf(f, "\n");
  for (int n = 0; n < h.length(); ++n) {
    for (int m = 0; m < h.channels(); ++m) {
      std::fprintf(f, m ? ",%d,%.12g" : "%d,%.12g", n, h.samples(n, m));
    }
    std::fprintf(f, "\n");
  }
  std::fclose(f);
}

}  // namespace echowall
