#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "echowall/horizontal.hpp"
#include "echowall/rng.hpp"
#include "oracles.hpp"

using namespace echowall;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ImpulseResponseSet from_matrix(const Eigen::MatrixXd& m) {
  ImpulseResponseSet h;
  h.samples = m;
  h.sample_rate = 16000.0;
  return h;
}

}  // namespace

TEST_CASE("weight vector shape") {
  const Eigen::VectorXd l = horizontal_weight(7, {3});
  CHECK(l[3] == 0.0);
  CHECK(l[4] == doctest::Approx(1.0));
  CHECK(l[5] == doctest::Approx(4.0));
  CHECK(l[0] == doctest::Approx(9.0));

  // Multiple anchors take the elementwise minimum.
  const Eigen::VectorXd l2 = horizontal_weight(7, {1, 5});
  CHECK(l2[1] == 0.0);
  CHECK(l2[5] == 0.0);
  CHECK(l2[3] == doctest::Approx(4.0));
  CHECK(l2[6] == doctest::Approx(1.0));
}

TEST_CASE("identical channels with infinite bound return the common channel") {
  Eigen::MatrixXd m(6, 4);
  Eigen::VectorXd common(6);
  common << 0.0, 0.5, 2.0, -1.0, 0.25, 0.0;
  for (int c = 0; c < 4; ++c) m.col(c) = common;
  const auto est = estimate_horizontal_response(from_matrix(m), {2}, kInf);
  CHECK((est.response - common).lpNorm<Eigen::Infinity>() < 1e-12);
  CHECK(est.mu == 0.0);
}

TEST_CASE("energy at the anchor survives any bound") {
  Eigen::MatrixXd m(3, 2);
  m.col(0) << 0.0, 2.0, 0.0;
  m.col(1) << 0.0, 0.0, 0.0;
  for (double b : {1.0, 1e-3, 1e-9}) {
    const auto est = estimate_horizontal_response(from_matrix(m), {1}, b);
    CHECK(est.response[0] == doctest::Approx(0.0));
    CHECK(est.response[1] == doctest::Approx(1.0));  // channel mean at l = 0
    CHECK(est.response[2] == doctest::Approx(0.0));
  }
}

TEST_CASE("vanishing bound suppresses everything off-anchor") {
  Rng rng(17);
  Eigen::MatrixXd m(32, 6);
  for (int i = 0; i < 32; ++i)
    for (int c = 0; c < 6; ++c) m(i, c) = rng.normal();
  const int p = 11;
  const auto est = estimate_horizontal_response(from_matrix(m), {p}, 1e-14);
  const double mean_at_p = m.row(p).sum() / 6.0;
  CHECK(est.response[p] == doctest::Approx(mean_at_p));
  for (int n = 0; n < 32; ++n) {
    if (n == p) continue;
    CHECK(std::fabs(est.response[n]) < 1e-6);
  }
}

TEST_CASE("constraint is met within 1e-9 of the bound") {
  Rng rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXd m(24, 5);
    for (int i = 0; i < 24; ++i)
      for (int c = 0; c < 5; ++c) m(i, c) = rng.normal();
    const int p = 1 + static_cast<int>(rng.uniform01() * 20);
    const double b = 1e-3 + rng.uniform01();
    const auto est = estimate_horizontal_response(from_matrix(m), {p}, b);
    const Eigen::VectorXd l = horizontal_weight(24, {p});
    const double g = l.cwiseAbs2().cwiseProduct(est.response.cwiseAbs2()).sum();
    CHECK(g <= b * (1.0 + 1e-9));
    if (est.mu > 0.0) CHECK(g >= b * (1.0 - 1e-6));
  }
}

TEST_CASE("matches the projected-gradient oracle") {
  Rng rng(29);
  for (int trial = 0; trial < 6; ++trial) {
    Eigen::MatrixXd m(20, 4);
    for (int i = 0; i < 20; ++i)
      for (int c = 0; c < 4; ++c) m(i, c) = rng.normal();
    const int p = 2 + static_cast<int>(rng.uniform01() * 16);
    const double b = 0.05 + 0.5 * rng.uniform01();

    const auto est = estimate_horizontal_response(from_matrix(m), {p}, b);
    const Eigen::VectorXd l = horizontal_weight(20, {p});
    const Eigen::VectorXd oracle = oracles::pg_horizontal(m, l, b);

    const double f_est = oracles::horizontal_objective(m, est.response);
    const double f_oracle = oracles::horizontal_objective(m, oracle);
    CHECK(f_est <= f_oracle * (1.0 + 1e-6) + 1e-10);
  }
}

TEST_CASE("solution beats random feasible perturbations") {
  Rng rng(37);
  Eigen::MatrixXd m(16, 3);
  for (int i = 0; i < 16; ++i)
    for (int c = 0; c < 3; ++c) m(i, c) = rng.normal();
  const int p = 6;
  const double b = 0.2;
  const auto est = estimate_horizontal_response(from_matrix(m), {p}, b);
  const Eigen::VectorXd l = horizontal_weight(16, {p});
  const double f_est = oracles::horizontal_objective(m, est.response);

  for (int k = 0; k < 1000; ++k) {
    Eigen::VectorXd delta(16);
    for (int i = 0; i < 16; ++i) delta[i] = 0.1 * rng.normal();
    const Eigen::VectorXd probe =
        oracles::project_weighted_ball(est.response + delta, l, b);
    CHECK(oracles::horizontal_objective(m, probe) >= f_est - 1e-9);
  }
}

TEST_CASE("subtract_horizontal") {
  Rng rng(41);
  Eigen::MatrixXd m(12, 4);
  for (int i = 0; i < 12; ++i)
    for (int c = 0; c < 4; ++c) m(i, c) = rng.normal();
  const ImpulseResponseSet h = from_matrix(m);

  SUBCASE("zero estimate is the identity") {
    const auto out = subtract_horizontal(h, Eigen::VectorXd::Zero(12));
    CHECK((out.samples - h.samples).norm() == 0.0);
  }

  SUBCASE("exact Kronecker structure cancels") {
    Eigen::VectorXd common(12);
    for (int i = 0; i < 12; ++i) common[i] = rng.normal();
    Eigen::MatrixXd k(12, 4);
    for (int c = 0; c < 4; ++c) k.col(c) = common;
    const auto out = subtract_horizontal(from_matrix(k), common);
    CHECK(out.samples.norm() == 0.0);
  }

  SUBCASE("length mismatch is rejected") {
    CHECK_THROWS_AS(subtract_horizontal(h, Eigen::VectorXd::Zero(13)),
                    std::invalid_argument);
  }
}

TEST_CASE("expected_sample") {
  SystemPose pose;
  pose.array_radius = 0.05;
  pose.mic_count = 12;

  const Plane floor = Plane::horizontal(0.3, true);
  CHECK(expected_sample(floor, pose, 16000.0) == 28);
  CHECK(expected_sample(floor, pose, 32000.0) == 56);

  SystemPose tiny = pose;
  tiny.array_radius = 1e-9;
  const Plane shallow = Plane::horizontal(1e-9, true);
  CHECK(expected_sample(shallow, tiny, 16000.0) == 0);

  CHECK_THROWS_AS(expected_sample(Plane::vertical(0.0, 1.0), pose, 16000.0),
                  std::invalid_argument);

  // Relative variant subtracts the direct-path sample.
  const int absolute = expected_sample(floor, pose, 16000.0);
  const int relative = expected_sample(floor, pose, 16000.0, 343.0, true);
  CHECK(absolute - relative ==
        static_cast<int>(std::lround(16000.0 * 0.05 / 343.0)));
}
