#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "echowall/dictionary.hpp"
#include "echowall/polar_grid.hpp"

using namespace echowall;

namespace {

PolarGrid small_grid() {
  PolarGrid g;
  g.radial_count = 24;
  g.angular_count = 8;
  g.array_radius = 0.05;
  g.sample_rate = 16000.0;
  g.speed_of_sound = 343.0;
  return g;
}

SystemPose grid_pose(const PolarGrid& g) {
  SystemPose pose;
  pose.array_radius = g.array_radius;
  pose.mic_count = g.angular_count;
  return pose;
}

}  // namespace

TEST_CASE("polar grid geometry") {
  const PolarGrid g = small_grid();
  CHECK(g.radial_step() * g.sample_rate == doctest::Approx(g.speed_of_sound));
  CHECK(g.r_min() == doctest::Approx(0.05));
  CHECK(g.r_max() - g.r_min() == doctest::Approx(g.radial_count * g.radial_step()));
  CHECK(g.angular_step() == doctest::Approx(2.0 * kPi / 8));

  // flat index is per-direction blocks of radial entries
  CHECK(g.flat_index(0, 0) == 0);
  CHECK(g.flat_index(3, 2) == 2 * 24 + 3);
  const auto [q, m] = g.from_flat(2 * 24 + 3);
  CHECK(q == 3);
  CHECK(m == 2);

  const auto [qn, mn] = g.nearest_cell(g.radius(7) + 0.4 * g.radial_step(),
                                       g.azimuth(5) + 0.3 * g.angular_step());
  CHECK(qn == 7);
  CHECK(mn == 5);
}

TEST_CASE("dictionary columns match the simulator exactly") {
  const PolarGrid g = small_grid();
  const SystemPose pose = grid_pose(g);
  const int n_h = 192;

  for (const Directivity& dir :
       {Directivity::omni(), Directivity::cardioid(0.4, 0.05)}) {
    const Dictionary dict(g, pose, dir, n_h);
    RirParams params;
    params.sample_rate = g.sample_rate;
    params.length = n_h;
    params.speed_of_sound = g.speed_of_sound;

    for (const auto& [q, m] : {std::pair{0, 0}, {5, 3}, {23, 7}, {11, 4}}) {
      const Plane plane =
          image_source_to_plane(g.radius(q), g.azimuth(m));
      const ImpulseResponseSet h = simulate_rir({plane}, pose, dir, params);
      const Eigen::VectorXd diff =
          dict.matrix().col(g.flat_index(q, m)) - h.stacked();
      CHECK(diff.lpNorm<Eigen::Infinity>() < 1e-10);
    }
  }
}

TEST_CASE("same-radius columns are channel rotations under omni gain") {
  const PolarGrid g = small_grid();
  const Dictionary dict(g, grid_pose(g), Directivity::omni(), 192);
  const int n_h = dict.response_length();
  const int q = 9;

  const Eigen::VectorXd base = dict.matrix().col(g.flat_index(q, 0));
  for (int m_dir = 1; m_dir < g.angular_count; ++m_dir) {
    const Eigen::VectorXd col = dict.matrix().col(g.flat_index(q, m_dir));
    for (int mic = 0; mic < g.angular_count; ++mic) {
      const int rotated = ((mic - m_dir) % g.angular_count + g.angular_count) %
                          g.angular_count;
      const Eigen::VectorXd a = col.segment(mic * n_h, n_h);
      const Eigen::VectorXd b = base.segment(rotated * n_h, n_h);
      CHECK((a - b).lpNorm<Eigen::Infinity>() < 1e-12);
    }
  }
}

TEST_CASE("column norms decrease with radius at fixed direction") {
  const PolarGrid g = small_grid();
  const Dictionary dict(g, grid_pose(g), Directivity::omni(), 192);
  for (int m_dir = 0; m_dir < g.angular_count; ++m_dir) {
    double prev = std::numeric_limits<double>::infinity();
    for (int q = 0; q < g.radial_count; ++q) {
      const double norm = dict.matrix().col(g.flat_index(q, m_dir)).norm();
      CHECK(norm < prev);
      prev = norm;
    }
  }
}

TEST_CASE("delay overflow is rejected with the offending grid point") {
  PolarGrid g = small_grid();
  g.radial_count = 60;  // farthest candidate needs ~93 samples
  try {
    Dictionary dict(g, grid_pose(g), Directivity::omni(), 64);
    FAIL("expected invalid_argument");
  } catch (const std::invalid_argument& ex) {
    CHECK(std::string(ex.what()).find("q=") != std::string::npos);
  }
}

TEST_CASE("prior weight construction") {
  PolarGrid g = small_grid();

  // Anchor at the cell for a wall at rho = 0.2, alpha = one angular step.
  const double rho = 0.2;
  const std::vector<PriorLocation> priors = {{rho, g.azimuth(1)}};
  const WeightVector w = build_prior_weight(g, priors);
  REQUIRE(w.anchors.size() == 1);
  const auto [n_pc, m_pc] = w.anchors[0];
  CHECK(m_pc == 1);
  CHECK(g.radius(n_pc) == doctest::Approx(2.0 * rho).epsilon(0.05));

  CHECK(w.values[g.flat_index(n_pc, m_pc)] == 0.0);
  CHECK(w.values[g.flat_index(n_pc + 2, m_pc)] == doctest::Approx(2.0));
  const int m3 = (m_pc + 3) % g.angular_count;
  CHECK(w.values[g.flat_index(n_pc + 2, m3)] == doctest::Approx(8.0));

  // Angular distance is circular: offset 7 on an 8-cell ring is distance 1.
  const int m7 = (m_pc + 7) % g.angular_count;
  CHECK(w.values[g.flat_index(n_pc + 1, m7)] == doctest::Approx(2.0));

  // Multiple priors combine by elementwise minimum.
  const std::vector<PriorLocation> two = {{rho, g.azimuth(1)}, {rho, g.azimuth(5)}};
  const WeightVector w2 = build_prior_weight(g, two);
  CHECK(w2.values[g.flat_index(n_pc, 5)] == 0.0);
  CHECK(w2.values[g.flat_index(n_pc, 1)] == 0.0);
  for (int i = 0; i < g.size(); ++i) CHECK(w2.values[i] <= w.values[i] + 1e-15);

  // Out-of-grid priors are rejected by name.
  try {
    build_prior_weight(g, {{10.0, 0.0}});
    FAIL("expected out_of_range");
  } catch (const std::out_of_range& ex) {
    CHECK(std::string(ex.what()).find("rho=10") != std::string::npos);
  }
}
