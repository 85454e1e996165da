#pragma once

#include <Eigen/Core>
#include <vector>

#include "echowall/acoustic.hpp"

namespace echowall {

// Weight l[n] = min over anchors of |n - p_k|^exponent; zero exactly at the
// anchors, growing with distance from them.
Eigen::VectorXd horizontal_weight(int length, const std::vector<int>& anchors,
                                  double exponent = 2.0);

struct HorizontalEstimate {
  Eigen::VectorXd response;      // shared single-channel estimate
  double mu = 0.0;               // Lagrange multiplier (0 when unconstrained)
  double weighted_norm_sq = 0.0; // ||L h_hor||^2 at the solution
};

// Estimates the common-to-all-channels response concentrated around the
// expected arrival samples:
//   min ||h - 1_M (x) h_hor||^2  s.t.  ||L h_hor||^2 <= b
// The KKT system is diagonal, h_hor[n] = (sum_m h[n,m]) / (M + mu l[n]^2),
// with mu found by bisection so the constraint holds within 1e-9 * b.
HorizontalEstimate estimate_horizontal_response(const ImpulseResponseSet& h,
                                                const std::vector<int>& anchors,
                                                double bound,
                                                double weight_exponent = 2.0);

// h^(m) - h_hor per channel. Throws on length mismatch.
ImpulseResponseSet subtract_horizontal(const ImpulseResponseSet& h,
                                       const Eigen::VectorXd& h_hor);

// Expected arrival sample of a horizontal reflector at distance rho: the
// image source sits on the z axis at 2*rho, so every microphone hears it at
// sqrt(R_a^2 + (2 rho)^2). By default the sample index is absolute (the
// direct path is removed by template subtraction, which keeps absolute
// time); relative_to_direct_peak subtracts the direct-path sample instead.
int expected_sample(const Plane& plane, const SystemPose& pose,
                    double sample_rate, double speed_of_sound = 343.0,
                    bool relative_to_direct_peak = false);

}  // namespace echowall
