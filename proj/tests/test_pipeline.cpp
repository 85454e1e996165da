#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "echowall/pipeline.hpp"

using namespace echowall;

namespace {

PolarGrid test_grid() {
  PolarGrid g;
  g.radial_count = 24;
  g.angular_count = 12;
  g.array_radius = 0.05;
  g.sample_rate = 4000.0;
  g.speed_of_sound = 343.0;
  return g;
}

SystemPose test_pose(const PolarGrid& g) {
  SystemPose pose;
  pose.array_radius = g.array_radius;
  pose.mic_count = g.angular_count;
  return pose;
}

ImageSourceMap zero_map(const PolarGrid& g) {
  ImageSourceMap s;
  s.grid = g;
  s.values = Eigen::VectorXd::Zero(g.size());
  return s;
}

}  // namespace

TEST_CASE("extract_peaks") {
  const PolarGrid g = test_grid();
  PeakParams params;
  params.nms_radius_q = 2;
  params.nms_radius_m = 1;

  SUBCASE("all-zero map yields nothing") {
    CHECK(extract_peaks(zero_map(g), params).empty());
  }

  SUBCASE("single cell") {
    ImageSourceMap s = zero_map(g);
    s(10, 3) = 1.0;
    const auto peaks = extract_peaks(s, params);
    REQUIRE(peaks.size() == 1);
    CHECK(peaks[0].q == 10);
    CHECK(peaks[0].m == 3);
    CHECK(peaks[0].radius == doctest::Approx(g.radius(10)));
    CHECK(peaks[0].azimuth == doctest::Approx(g.azimuth(3)));
  }

  SUBCASE("adjacent maxima merge into the larger") {
    ImageSourceMap s = zero_map(g);
    s(10, 3) = 1.0;
    s(11, 3) = 0.9;
    const auto peaks = extract_peaks(s, params);
    REQUIRE(peaks.size() == 1);
    CHECK(peaks[0].q == 10);
  }

  SUBCASE("separated maxima both survive") {
    ImageSourceMap s = zero_map(g);
    s(5, 1) = 1.0;
    s(15, 7) = 0.8;
    const auto peaks = extract_peaks(s, params);
    REQUIRE(peaks.size() == 2);
    CHECK(peaks[0].magnitude == doctest::Approx(1.0));
    CHECK(peaks[1].magnitude == doctest::Approx(0.8));
  }

  SUBCASE("relative threshold drops weak peaks") {
    ImageSourceMap s = zero_map(g);
    s(5, 1) = 1.0;
    s(15, 7) = 0.3;  // below 0.5 * max
    CHECK(extract_peaks(s, params).size() == 1);
  }

  SUBCASE("angular suppression wraps around") {
    ImageSourceMap s = zero_map(g);
    s(5, 0) = 1.0;
    s(5, 11) = 0.9;  // one angular step away across the wrap
    CHECK(extract_peaks(s, params).size() == 1);
  }
}

TEST_CASE("baseline estimate is bit-identical to the plain sparse solve") {
  const PolarGrid g = test_grid();
  const SystemPose pose = test_pose(g);
  const Dictionary dict(g, pose, Directivity::omni(), 64);

  RirParams params;
  params.sample_rate = g.sample_rate;
  params.length = 64;
  const ImpulseResponseSet h =
      simulate_rir({Plane::vertical(g.azimuth(2), g.radius(9) / 2.0)}, pose,
                   Directivity::omni(), params);

  EstimatorConfig cfg;
  cfg.use_lidar = false;
  const EstimationResult res = estimate(h, PointCloud{}, dict, cfg);

  const Eigen::VectorXd stacked = h.stacked();
  const double lambda = lambda_from_correlation(
      dict.matrix().transpose() * stacked, cfg.lambda_scale);
  const LassoResult direct = solve_lasso(dict, stacked, lambda, cfg.solver);

  CHECK((res.solution.values - direct.s).norm() == 0.0);
  CHECK(res.priors_used.empty());
  CHECK(res.horizontal_used.empty());
}

TEST_CASE("noiseless on-grid wall is recovered exactly") {
  const PolarGrid g = test_grid();
  const SystemPose pose = test_pose(g);
  const Dictionary dict(g, pose, Directivity::omni(), 64);

  const int q_true = 9, m_true = 2;
  RirParams params;
  params.sample_rate = g.sample_rate;
  params.length = 64;
  const Plane wall = Plane::vertical(g.azimuth(m_true), g.radius(q_true) / 2.0);
  const ImpulseResponseSet h =
      simulate_rir({wall}, pose, Directivity::omni(), params);

  EstimatorConfig cfg;
  cfg.use_lidar = false;
  const EstimationResult res = estimate(h, PointCloud{}, dict, cfg);
  REQUIRE_FALSE(res.detections.empty());
  CHECK(res.detections[0].peak.q == q_true);
  CHECK(res.detections[0].peak.m == m_true);
  CHECK(res.detections[0].plane.distance ==
        doctest::Approx(wall.distance).epsilon(1e-9));

  // Rotating the scene by k angular cells permutes the detected azimuth.
  const int k = 5;
  const Plane rotated =
      Plane::vertical(g.azimuth((m_true + k) % g.angular_count),
                      g.radius(q_true) / 2.0);
  const ImpulseResponseSet h_rot =
      simulate_rir({rotated}, pose, Directivity::omni(), params);
  const EstimationResult res_rot = estimate(h_rot, PointCloud{}, dict, cfg);
  REQUIRE_FALSE(res_rot.detections.empty());
  CHECK(res_rot.detections[0].peak.m == (m_true + k) % g.angular_count);
  CHECK(res_rot.detections[0].peak.q == q_true);
}

TEST_CASE("hitrate matching") {
  const PolarGrid g = test_grid();
  const HitSpec spec;  // 2 radial cells, 1 angular cell

  EstimationResult res;
  DetectedReflector det;
  det.plane = Plane::vertical(g.azimuth(3), g.radius(10) / 2.0);
  det.confidence = 1.0;
  res.detections.push_back(det);

  SUBCASE("exact match") {
    const std::vector<Plane> truth = {Plane::vertical(g.azimuth(3), g.radius(10) / 2.0)};
    CHECK(hitrate(res, truth, spec, g) == std::vector<int>{1});
  }

  SUBCASE("no detections") {
    EstimationResult empty;
    const std::vector<Plane> truth = {Plane::vertical(0.0, 0.5)};
    CHECK(hitrate(empty, truth, spec, g) == std::vector<int>{0});
  }

  SUBCASE("off by three radial cells misses at tolerance two") {
    const std::vector<Plane> truth = {Plane::vertical(g.azimuth(3), g.radius(13) / 2.0)};
    CHECK(hitrate(res, truth, spec, g) == std::vector<int>{0});
  }

  SUBCASE("off by two radial cells hits") {
    const std::vector<Plane> truth = {Plane::vertical(g.azimuth(3), g.radius(12) / 2.0)};
    CHECK(hitrate(res, truth, spec, g) == std::vector<int>{1});
  }

  SUBCASE("one detection serves at most one truth plane") {
    const Plane same = Plane::vertical(g.azimuth(3), g.radius(10) / 2.0);
    const std::vector<Plane> truth = {same, same};
    CHECK(hitrate(res, truth, spec, g) == std::vector<int>{1, 0});
  }
}

TEST_CASE("normal_mse") {
  const PolarGrid g = test_grid();
  const HitSpec spec;
  const Plane truth = Plane::vertical(0.0, 0.5);

  SUBCASE("perfect detection") {
    EstimationResult res;
    DetectedReflector det;
    det.plane = Plane::vertical(0.0, 0.5);
    res.detections.push_back(det);
    CHECK(normal_mse(res, truth, spec, g) == doctest::Approx(0.0));
  }

  SUBCASE("orthogonal normal") {
    EstimationResult res;
    DetectedReflector det;
    det.plane = Plane::vertical(kPi / 2.0, 0.5);
    res.detections.push_back(det);
    CHECK(normal_mse(res, truth, spec, g) == doctest::Approx(2.0 / 3.0));
  }

  SUBCASE("no detection sentinel") {
    EstimationResult res;
    bool flagged = false;
    CHECK(normal_mse(res, truth, spec, g, &flagged) == doctest::Approx(4.0 / 3.0));
    CHECK(flagged);
  }
}

TEST_CASE("pipeline uses LiDAR planes for elimination and priors") {
  // Wall on-grid at the back (LiDAR side) plus a floor; cloud sees both.
  PolarGrid g = test_grid();
  const SystemPose pose = test_pose(g);
  const Dictionary dict(g, pose, Directivity::omni(), 64);

  const int q_true = 9, m_true = 6;  // azimuth pi, inside the LiDAR FOV
  const Plane wall = Plane::vertical(g.azimuth(m_true), g.radius(q_true) / 2.0);
  const Plane floor = Plane::horizontal(0.25, true);

  RirParams params;
  params.sample_rate = g.sample_rate;
  params.length = 64;
  const ImpulseResponseSet h =
      simulate_rir({wall, floor}, pose, Directivity::omni(), params);

  LidarConfig lidar;
  lidar.fov_hor_deg = 70.0;
  lidar.fov_ver_deg = 70.0;
  lidar.rays_hor = 96;
  lidar.rays_ver = 96;
  lidar.max_range = 2.0;
  const PointCloud cloud = cast_cloud({wall, floor}, lidar);
  REQUIRE_FALSE(cloud.empty());

  EstimatorConfig cfg;
  const EstimationResult res = estimate(h, cloud, dict, cfg);

  CHECK_FALSE(res.horizontal_used.empty());
  CHECK_FALSE(res.priors_used.empty());
  REQUIRE_FALSE(res.detections.empty());
  CHECK(res.detections[0].peak.q == q_true);
  CHECK(res.detections[0].peak.m == m_true);
}
