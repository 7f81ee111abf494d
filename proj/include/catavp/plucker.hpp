#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cmath>
#include <stdexcept>

#include "catavp/mirror.hpp"

namespace catavp {

/// 3D line in Pluecker coordinates (unit direction s, moment m = q x s).
struct PlueckerLine {
  Vec3 s = Vec3::UnitZ();
  Vec3 m = Vec3::Zero();

  PlueckerLine() = default;

  PlueckerLine(const Vec3& dir, const Vec3& moment) {
    const double n = dir.norm();
    if (!(n > 0.0)) throw std::invalid_argument("PlueckerLine: zero direction");
    s = dir / n;
    m = moment / n;
    // re-orthogonalize the moment so <s,m> = 0 holds exactly-ish
    m -= s * s.dot(m);
  }

  static PlueckerLine through_point(const Vec3& q, const Vec3& dir) {
    const double n = dir.norm();
    if (!(n > 0.0)) throw std::invalid_argument("PlueckerLine: zero direction");
    const Vec3 sd = dir / n;
    return PlueckerLine(sd, q.cross(sd));
  }

  /// point on the line closest to the origin
  Vec3 closest_point_to_origin() const { return s.cross(m); }

  double distance_to_point(const Vec3& p) const { return (p - closest_point(p)).norm(); }

  Vec3 closest_point(const Vec3& p) const {
    const Vec3 q = closest_point_to_origin();
    return q + s * s.dot(p - q);
  }

  Vec3 point_at(double t) const { return closest_point_to_origin() + t * s; }
};

/// reciprocal product; zero iff the two lines intersect (or are parallel-coplanar)
inline double line_side_product(const PlueckerLine& a, const PlueckerLine& b) {
  return a.s.dot(b.m) + b.s.dot(a.m);
}

}  // namespace catavp
