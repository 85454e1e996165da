#include "echowall/horizontal.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace echowall {

Eigen::VectorXd horizontal_weight(int length, const std::vector<int>& anchors,
                                  double exponent) {
  if (anchors.empty()) throw std::invalid_argument("need at least one anchor");
  Eigen::VectorXd l(length);
  for (int n = 0; n < length; ++n) {
    double best = std::numeric_limits<double>::infinity();
    for (int p : anchors) {
      if (p < 0 || p >= length)
        throw std::invalid_argument("anchor sample outside the response");
      best = std::min(best, std::pow(std::fabs(static_cast<double>(n - p)), exponent));
    }
    l[n] = best;
  }
  return l;
}

HorizontalEstimate estimate_horizontal_response(const ImpulseResponseSet& h,
                                                const std::vector<int>& anchors,
                                                double bound,
                                                double weight_exponent) {
  if (!(bound > 0.0)) throw std::invalid_argument("energy bound must be > 0");
  const int len = h.length();
  const double mics = static_cast<double>(h.channels());

  const Eigen::VectorXd l = horizontal_weight(len, anchors, weight_exponent);
  const Eigen::VectorXd l2 = l.cwiseAbs2();
  const Eigen::VectorXd channel_sum = h.samples.rowwise().sum();

  auto solve_at = [&](double mu) {
    return (channel_sum.array() / (mics + mu * l2.array())).matrix().eval();
  };
  auto weighted_sq = [&](const Eigen::VectorXd& x) {
    return l2.cwiseProduct(x.cwiseAbs2()).sum();
  };

  HorizontalEstimate est;
  est.response = solve_at(0.0);
  est.weighted_norm_sq = weighted_sq(est.response);
  if (!std::isfinite(bound) || est.weighted_norm_sq <= bound) return est;

  // ||L h_hor(mu)||^2 is continuous and strictly decreasing toward 0, so a
  // doubling bracket plus bisection always lands on the constraint boundary.
  double lo = 0.0, hi = mics;
  while (weighted_sq(solve_at(hi)) > bound) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) throw std::runtime_error("horizontal estimator failed to bracket mu");
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double g = weighted_sq(solve_at(mid));
    if (g > bound) {
      lo = mid;
    } else {
      hi = mid;
      if (bound - g <= 1e-9 * bound) break;
    }
  }
  est.mu = hi;
  est.response = solve_at(hi);
  est.weighted_norm_sq = weighted_sq(est.response);
  return est;
}

ImpulseResponseSet subtract_horizontal(const ImpulseResponseSet& h,
                                       const Eigen::VectorXd& h_hor) {
  if (h_hor.size() != h.length())
    throw std::invalid_argument("horizontal response length mismatch");
  ImpulseResponseSet out = h;
  out.samples.colwise() -= h_hor;
  return out;
}

int expected_sample(const Plane& plane, const SystemPose& pose,
                    double sample_rate, double speed_of_sound,
                    bool relative_to_direct_peak) {
  if (!is_horizontal(plane))
    throw std::invalid_argument("expected_sample requires a horizontal plane");
  const double image_dist = 2.0 * plane.distance;
  const double mic_dist =
      std::sqrt(pose.array_radius * pose.array_radius + image_dist * image_dist);
  int p = static_cast<int>(std::lround(sample_rate * mic_dist / speed_of_sound));
  if (relative_to_direct_peak)
    p -= static_cast<int>(std::lround(sample_rate * pose.array_radius / speed_of_sound));
  return p;
}

}  // namespace echowall
