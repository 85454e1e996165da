#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <optional>
#include <vector>

namespace echowall {

using Vec3 = Eigen::Vector3d;

inline constexpr double kPi = 3.14159265358979323846;

inline double deg2rad(double deg) { return deg * kPi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / kPi; }

// Wraps an angle into [0, 2*pi).
double wrap_angle(double rad);

// Smallest absolute angular distance between two angles.
double angular_distance(double a, double b);

// Rectangular extent of a bounded plane, expressed in the plane's own
// tangent frame and centered on the foot point rho*nu.
struct PlaneBounds {
  double half_u = 0.0;
  double half_v = 0.0;
};

// Planar reflector {x : nu . x = rho}. The normal is unit length and points
// from the origin toward the plane, so distance is the system-to-plane
// distance and is always >= 0. Material flags select which sensing modality
// the plane responds to; a window reflects sound but returns no LiDAR points.
struct Plane {
  Vec3 normal = Vec3::UnitX();
  double distance = 1.0;
  std::optional<PlaneBounds> bounds;
  bool acoustic_reflective = true;
  bool lidar_reflective = true;
  double reflection_coeff = 1.0;

  // Tangent frame (u, v, normal); u is horizontal for vertical planes.
  Vec3 tangent_u() const;
  Vec3 tangent_v() const;

  // True when the point lies inside the rectangular extent (always true for
  // unbounded planes). The point is assumed to lie on the plane already.
  bool within_bounds(const Vec3& point) const;

  // Vertical plane from its azimuth and distance.
  static Plane vertical(double azimuth_rad, double distance);
  // Horizontal plane below (floor) or above (ceiling) the origin.
  static Plane horizontal(double distance, bool below);
};

// Validates the unit-normal and distance invariants; throws
// std::invalid_argument on violation.
void validate_plane(const Plane& plane, double tol = 1e-9);

// Co-located loudspeaker + UCA + LiDAR pose. Everything sits at the origin;
// microphone m lies at azimuth m * 2*pi/M on the z = 0 circle of radius
// array_radius.
struct SystemPose {
  Vec3 origin = Vec3::Zero();
  double speaker_axis_angle = 0.0;
  double lidar_axis_angle = kPi;
  double array_radius = 0.05;
  int mic_count = 12;

  double mic_azimuth(int m) const;
  Vec3 mic_position(int m) const;
};

struct ImageSource {
  Vec3 position = Vec3::Zero();
  double gain = 1.0;
};

// Reflects source_pos across the plane (first-order mirror image source);
// gain carries the plane's reflection coefficient.
ImageSource mirror_source(const Vec3& source_pos, const Plane& plane);

// Inverse of the image-source construction for a source at the origin:
// rho = R/2, nu = (cos alpha, sin alpha, 0). Throws for R <= 0.
Plane image_source_to_plane(double image_distance, double image_azimuth);

// Four-quadrant azimuth of a vertical-ish plane normal, in [0, 2*pi).
// Throws std::domain_error when the normal has no horizontal component.
double plane_azimuth(const Plane& plane);

// A plane counts as horizontal (in the pre-processing sense) when its normal
// has a z-component exceeding sin(tol_deg); a literal non-zero test is
// useless on fitted normals.
bool is_horizontal(const Plane& plane, double tol_deg = 5.0);

}  // namespace echowall
