#include "echowall/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace echowall {

double wrap_angle(double rad) {
  double w = std::fmod(rad, 2.0 * kPi);
  if (w < 0.0) w += 2.0 * kPi;
  // fmod can land exactly on 2*pi after the correction for tiny negatives
  if (w >= 2.0 * kPi) w = 0.0;
  return w;
}

double angular_distance(double a, double b) {
  double d = std::fabs(wrap_angle(a) - wrap_angle(b));
  return std::min(d, 2.0 * kPi - d);
}

Vec3 Plane::tangent_u() const {
  Vec3 u = Vec3::UnitZ().cross(normal);
  if (u.norm() < 1e-9) u = Vec3::UnitX().cross(normal);
  return u.normalized();
}

Vec3 Plane::tangent_v() const { return normal.cross(tangent_u()).normalized(); }

bool Plane::within_bounds(const Vec3& point) const {
  if (!bounds) return true;
  const Vec3 rel = point - distance * normal;
  return std::fabs(rel.dot(tangent_u())) <= bounds->half_u &&
         std::fabs(rel.dot(tangent_v())) <= bounds->half_v;
}

Plane Plane::vertical(double azimuth_rad, double dist) {
  Plane p;
  p.normal = Vec3(std::cos(azimuth_rad), std::sin(azimuth_rad), 0.0);
  p.distance = dist;
  return p;
}

Plane Plane::horizontal(double dist, bool below) {
  Plane p;
  p.normal = Vec3(0.0, 0.0, below ? -1.0 : 1.0);
  p.distance = dist;
  return p;
}

void validate_plane(const Plane& plane, double tol) {
  if (std::fabs(plane.normal.norm() - 1.0) > tol)
    throw std::invalid_argument("plane normal is not unit length");
  if (plane.distance < 0.0)
    throw std::invalid_argument("plane distance must be >= 0");
  if (plane.reflection_coeff <= 0.0 || plane.reflection_coeff > 1.0)
    throw std::invalid_argument("reflection coefficient must be in (0, 1]");
}

double SystemPose::mic_azimuth(int m) const {
  return 2.0 * kPi * static_cast<double>(m) / static_cast<double>(mic_count);
}

Vec3 SystemPose::mic_position(int m) const {
  const double a = mic_azimuth(m);
  return origin + Vec3(array_radius * std::cos(a), array_radius * std::sin(a), 0.0);
}

ImageSource mirror_source(const Vec3& source_pos, const Plane& plane) {
  const double offset = plane.normal.dot(source_pos) - plane.distance;
  ImageSource img;
  img.position = source_pos - 2.0 * offset * plane.normal;
  img.gain = plane.reflection_coeff;
  return img;
}

Plane image_source_to_plane(double image_distance, double image_azimuth) {
  if (image_distance <= 0.0)
    throw std::invalid_argument("image source distance must be > 0");
  Plane p = Plane::vertical(wrap_angle(image_azimuth), image_distance / 2.0);
  return p;
}

double plane_azimuth(const Plane& plane) {
  const double nx = plane.normal.x();
  const double ny = plane.normal.y();
  if (nx == 0.0 && ny == 0.0)
    throw std::domain_error("plane normal has no horizontal component");
  return wrap_angle(std::atan2(ny, nx));
}

bool is_horizontal(const Plane& plane, double tol_deg) {
  return std::fabs(plane.normal.z()) > std::sin(deg2rad(tol_deg));
}

}  // namespace echowall
