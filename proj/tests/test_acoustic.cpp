#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "echowall/acoustic.hpp"

using namespace echowall;

namespace {

SystemPose make_pose(double radius, int mics) {
  SystemPose pose;
  pose.array_radius = radius;
  pose.mic_count = mics;
  return pose;
}

}  // namespace

TEST_CASE("directivity gains") {
  const Directivity omni = Directivity::omni();
  CHECK(omni.gain(0.0) == 1.0);
  CHECK(omni.gain(2.1) == 1.0);

  const Directivity card = Directivity::cardioid(0.4, 0.05);
  CHECK(card.gain(0.0) == doctest::Approx(1.0));
  CHECK(card.gain(kPi / 2.0) == doctest::Approx(0.4));
  CHECK(card.gain(kPi) == doctest::Approx(0.05));  // clamped at the floor
}

TEST_CASE("single wall impulse lands at the image-source delay") {
  // R_a = 0 puts every microphone at the origin; the image of a wall at
  // 0.5 m sits at 1 m, and f_s = 34300 makes the delay exactly 100 samples.
  const SystemPose pose = make_pose(0.0, 3);
  RirParams params;
  params.sample_rate = 34300.0;
  params.length = 160;

  const std::vector<Plane> scene = {Plane::vertical(0.0, 0.5)};
  const ImpulseResponseSet h =
      simulate_rir(scene, pose, Directivity::omni(), params);

  CHECK(h.warnings.empty());
  for (int m = 0; m < 3; ++m) {
    CHECK(h.samples(100, m) == doctest::Approx(1.0));  // amplitude 1/d, d = 1
    int argmax = 0;
    h.samples.col(m).cwiseAbs().maxCoeff(&argmax);
    CHECK(argmax == 100);
  }
}

TEST_CASE("no planes and no direct path is all zero") {
  const ImpulseResponseSet h =
      simulate_rir({}, make_pose(0.05, 4), Directivity::omni(), RirParams{});
  CHECK(h.energy() == 0.0);
}

TEST_CASE("floor reflection arrives at the same sample on every channel") {
  const SystemPose pose = make_pose(0.05, 12);
  RirParams params;
  params.sample_rate = 16000.0;
  params.length = 128;

  const std::vector<Plane> scene = {Plane::horizontal(0.3, true)};
  const ImpulseResponseSet h =
      simulate_rir(scene, pose, Directivity::omni(), params);

  // Image at (0,0,-0.6): sqrt(0.05^2 + 0.6^2) = 0.6021 m -> sample 28.
  int argmax = 0;
  h.samples.col(0).cwiseAbs().maxCoeff(&argmax);
  CHECK(argmax == 28);
  for (int m = 1; m < 12; ++m)
    CHECK((h.samples.col(m) - h.samples.col(0)).lpNorm<Eigen::Infinity>() < 1e-14);
}

TEST_CASE("first-order model is additive over planes") {
  const SystemPose pose = make_pose(0.05, 6);
  RirParams params;
  params.sample_rate = 16000.0;
  params.length = 256;

  const Plane wall_a = Plane::vertical(0.0, 0.5);
  const Plane wall_b = Plane::vertical(kPi / 3.0, 0.9);
  const auto h_ab = simulate_rir({wall_a, wall_b}, pose, Directivity::omni(), params);
  const auto h_a = simulate_rir({wall_a}, pose, Directivity::omni(), params);
  const auto h_b = simulate_rir({wall_b}, pose, Directivity::omni(), params);
  CHECK((h_ab.samples - h_a.samples - h_b.samples).lpNorm<Eigen::Infinity>() < 1e-14);
}

TEST_CASE("channel symmetry about the wall azimuth") {
  const SystemPose pose = make_pose(0.05, 12);
  RirParams params;
  params.sample_rate = 16000.0;
  params.length = 256;
  const auto h = simulate_rir({Plane::vertical(0.0, 0.7)}, pose,
                              Directivity::omni(), params);
  for (int m = 1; m < 12; ++m) {
    const int mirrored = (12 - m) % 12;
    CHECK((h.samples.col(m) - h.samples.col(mirrored)).lpNorm<Eigen::Infinity>() <
          1e-12);
  }
}

TEST_CASE("amplitude follows 1/d spreading") {
  const SystemPose pose = make_pose(0.02, 4);
  RirParams params;
  params.sample_rate = 16000.0;
  params.length = 512;
  const auto near = simulate_rir({Plane::vertical(0.0, 0.5)}, pose,
                                 Directivity::omni(), params);
  const auto far = simulate_rir({Plane::vertical(0.0, 1.0)}, pose,
                                Directivity::omni(), params);
  CHECK(near.energy() / far.energy() == doctest::Approx(4.0).epsilon(0.02));
}

TEST_CASE("reflection beyond the response length records a warning") {
  RirParams params;
  params.sample_rate = 16000.0;
  params.length = 64;  // wall image at 2 m needs ~93 samples
  const auto h = simulate_rir({Plane::vertical(0.0, 1.0)}, make_pose(0.05, 4),
                              Directivity::omni(), params);
  CHECK_FALSE(h.warnings.empty());
}

TEST_CASE("stacking order is channel-major") {
  ImpulseResponseSet h;
  h.sample_rate = 8000.0;
  h.samples.resize(3, 2);
  h.samples << 1, 4, 2, 5, 3, 6;
  const Eigen::VectorXd v = h.stacked();
  for (int i = 0; i < 6; ++i) CHECK(v[i] == doctest::Approx(i + 1));
  const auto back = ImpulseResponseSet::from_stacked(v, 2, 8000.0);
  CHECK((back.samples - h.samples).norm() == 0.0);
}

TEST_CASE("add_noise basics") {
  const SystemPose pose = make_pose(0.05, 8);
  RirParams params;
  params.sample_rate = 16000.0;
  params.length = 2048;
  const auto h = simulate_rir({Plane::vertical(0.0, 0.5)}, pose,
                              Directivity::omni(), params);

  SUBCASE("infinite SNR is the identity") {
    NoiseSpec spec;
    spec.snr_db = std::numeric_limits<double>::infinity();
    const auto out = add_noise(h, spec);
    CHECK((out.samples - h.samples).norm() == 0.0);
  }

  SUBCASE("0 dB puts noise energy near signal energy") {
    NoiseSpec spec;
    spec.snr_db = 0.0;
    spec.seed = 123;
    const auto out = add_noise(h, spec);
    const double noise_energy = (out.samples - h.samples).squaredNorm();
    CHECK(noise_energy / h.energy() == doctest::Approx(1.0).epsilon(0.05));
  }

  SUBCASE("empirical SNR within half a dB") {
    for (double snr : {-9.0, 0.0, 9.0, 21.0}) {
      NoiseSpec spec;
      spec.snr_db = snr;
      spec.seed = 77;
      const auto out = add_noise(h, spec);
      const double noise_energy = (out.samples - h.samples).squaredNorm();
      const double empirical = 10.0 * std::log10(h.energy() / noise_energy);
      CHECK(std::fabs(empirical - snr) < 0.5);
    }
  }

  SUBCASE("same seed, same noise") {
    NoiseSpec spec;
    spec.snr_db = 3.0;
    spec.seed = 99;
    const auto a = add_noise(h, spec);
    const auto b = add_noise(h, spec);
    CHECK((a.samples - b.samples).norm() == 0.0);
  }

  SUBCASE("all-zero input with finite SNR is rejected") {
    ImpulseResponseSet zero;
    zero.samples = Eigen::MatrixXd::Zero(64, 4);
    NoiseSpec spec;
    spec.snr_db = 10.0;
    CHECK_THROWS_AS(add_noise(zero, spec), std::invalid_argument);
  }

  SUBCASE("reference energy overrides the signal energy") {
    NoiseSpec spec;
    spec.snr_db = 0.0;
    spec.seed = 5;
    spec.reference_energy = 4.0 * h.energy();
    const auto out = add_noise(h, spec);
    const double noise_energy = (out.samples - h.samples).squaredNorm();
    CHECK(noise_energy / h.energy() == doctest::Approx(4.0).epsilon(0.1));
  }
}

TEST_CASE("remove_direct_path") {
  const SystemPose pose = make_pose(0.05, 6);
  const Directivity dir = Directivity::cardioid(0.4, 0.05);
  RirParams params;
  params.sample_rate = 16000.0;
  params.length = 256;

  SUBCASE("no direct path present: identity") {
    const auto h = simulate_rir({Plane::vertical(0.2, 0.6)}, pose, dir, params);
    const auto out = remove_direct_path(h, pose, dir, params.speed_of_sound);
    CHECK((out.samples - h.samples).norm() == 0.0);
  }

  SUBCASE("direct path only: residual energy < 1e-10 relative") {
    params.include_direct = true;
    const auto h = simulate_rir({}, pose, dir, params);
    const auto out = remove_direct_path(h, pose, dir, params.speed_of_sound);
    CHECK(out.energy() < 1e-10 * h.energy());
  }

  SUBCASE("direct + wall equals wall-only") {
    params.include_direct = true;
    const auto with_direct =
        simulate_rir({Plane::vertical(0.0, 0.6)}, pose, dir, params);
    params.include_direct = false;
    const auto wall_only =
        simulate_rir({Plane::vertical(0.0, 0.6)}, pose, dir, params);
    const auto out =
        remove_direct_path(with_direct, pose, dir, params.speed_of_sound);
    CHECK((out.samples - wall_only.samples).squaredNorm() <
          1e-10 * wall_only.energy());
  }
}
