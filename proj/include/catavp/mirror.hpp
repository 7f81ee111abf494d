#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cmath>
#include <optional>
#include <stdexcept>

namespace catavp {

template <typename Scalar>
using Vec3T = Eigen::Matrix<Scalar, 3, 1>;
using Vec3 = Vec3T<double>;
using Vec2 = Eigen::Vector2d;
using Mat3 = Eigen::Matrix3d;

/// Axially symmetric quadric mirror
///   Omega(r) = r1^2 + r2^2 + A r3^2 + B r3 - C = 0.
template <typename Scalar>
struct MirrorShapeT {
  Scalar A = Scalar(1);
  Scalar B = Scalar(0);
  Scalar C = Scalar(1);

  static MirrorShapeT spherical(Scalar C) {
    if (!(C > Scalar(0))) throw std::invalid_argument("spherical mirror needs C > 0");
    return {Scalar(1), Scalar(0), C};
  }
  // Table-row naming: A = 0, C = 0 (surface x^2 + y^2 + B z = 0).
  static MirrorShapeT ellipsoid_axial(Scalar B) {
    if (B == Scalar(0)) throw std::invalid_argument("degenerate shape: A = B = C = 0");
    return {Scalar(0), B, Scalar(0)};
  }
  static MirrorShapeT conical(Scalar A) {
    if (!(A < Scalar(0))) throw std::invalid_argument("conical mirror needs A < 0");
    return {A, Scalar(0), Scalar(0)};
  }
  static MirrorShapeT cylindrical(Scalar C) {
    if (!(C > Scalar(0))) throw std::invalid_argument("cylindrical mirror needs C > 0");
    return {Scalar(0), Scalar(0), C};
  }

  // surface is non-empty iff A z^2 + B z - C <= 0 somewhere
  bool valid() const {
    if (A > Scalar(0)) return C + B * B / (Scalar(4) * A) >= Scalar(0);
    if (A == Scalar(0) && B == Scalar(0)) return C >= Scalar(0);
    return true;  // A < 0 or a linear term: unbounded in z
  }

  // squared cross-section radius at height z; negative where the surface is absent
  Scalar radius_sq(Scalar z) const { return C - B * z - A * z * z; }
};
using MirrorShape = MirrorShapeT<double>;

template <typename Scalar>
Scalar mirror_eval(const MirrorShapeT<Scalar>& m, const Vec3T<Scalar>& r) {
  return r[0] * r[0] + r[1] * r[1] + m.A * r[2] * r[2] + m.B * r[2] - m.C;
}

/// Unnormalized outward gradient [r1, r2, A r3 + B/2].
template <typename Scalar>
Vec3T<Scalar> mirror_normal_raw(const MirrorShapeT<Scalar>& m, const Vec3T<Scalar>& r) {
  return Vec3T<Scalar>(r[0], r[1], m.A * r[2] + m.B / Scalar(2));
}

struct DegenerateNormalError : std::runtime_error {
  DegenerateNormalError() : std::runtime_error("degenerate mirror normal (cone apex)") {}
};

template <typename Scalar>
Vec3T<Scalar> mirror_normal(const MirrorShapeT<Scalar>& m, const Vec3T<Scalar>& r) {
  Vec3T<Scalar> n = mirror_normal_raw(m, r);
  if (n.squaredNorm() == Scalar(0)) throw DegenerateNormalError();
  return n;
}

/// Intersection of the reflection plane with the mirror axis: k = r - n(r).
template <typename Scalar>
Vec3T<Scalar> axis_point(const MirrorShapeT<Scalar>& m, const Vec3T<Scalar>& r) {
  return Vec3T<Scalar>(Scalar(0), Scalar(0), r[2] - m.A * r[2] - m.B / Scalar(2));
}

/// Specular reflection of d_in about the plane with normal n, unit-normalized.
template <typename Scalar>
Vec3T<Scalar> reflect_direction(const Vec3T<Scalar>& n, const Vec3T<Scalar>& d_in) {
  const Scalar nn = n.squaredNorm();
  const Scalar dd = d_in.squaredNorm();
  if (nn == Scalar(0)) throw DegenerateNormalError();
  if (dd == Scalar(0)) throw std::invalid_argument("reflect_direction: zero input direction");
  Vec3T<Scalar> d = nn * d_in - Scalar(2) * n * d_in.dot(n);
  return d / d.norm();
}

/// Unit direction into the scene of the ray the camera at c sees at surface point r.
template <typename Scalar>
Vec3T<Scalar> scene_direction_at(const MirrorShapeT<Scalar>& m, const Vec3T<Scalar>& c,
                                 const Vec3T<Scalar>& r) {
  return reflect_direction(mirror_normal(m, r), Vec3T<Scalar>(r - c));
}

/// 3D point constrained to the mirror surface; the carrier of a vanishing point.
struct MirrorPoint {
  Vec3 r = Vec3::Zero();

  MirrorPoint() = default;
  explicit MirrorPoint(const Vec3& p) : r(p) {}

  static constexpr double kSurfaceTol = 1e-9;

  static MirrorPoint checked(const MirrorShape& m, const Vec3& p, double tol = kSurfaceTol) {
    if (std::abs(mirror_eval(m, p)) > tol * surface_scale(m, p))
      throw std::invalid_argument("point is not on the mirror surface");
    return MirrorPoint(p);
  }

  static double surface_scale(const MirrorShape& m, const Vec3& p) {
    return 1.0 + p[0] * p[0] + p[1] * p[1] + std::abs(m.A) * p[2] * p[2] +
           std::abs(m.B * p[2]) + std::abs(m.C);
  }
};

/// Unit 3-vector; s and -s denote the same (unoriented) line direction.
struct DirectionVector {
  Vec3 s = Vec3::UnitZ();

  DirectionVector() = default;
  explicit DirectionVector(const Vec3& v) {
    const double n = v.norm();
    if (!(n > 0.0) || !std::isfinite(n))
      throw std::invalid_argument("direction must be a nonzero finite vector");
    s = v / n;
  }

  double angle_to_line(const Vec3& other) const;
};

/// Unsigned angle between the lines spanned by a and b, in [0, pi/2].
/// atan2 of the cross/dot pair stays accurate down to machine-size angles.
inline double angle_between_lines(const Vec3& a, const Vec3& b) {
  const double cross = a.cross(b).norm();
  const double dot = std::abs(a.dot(b));
  return std::atan2(cross, dot);
}

inline double DirectionVector::angle_to_line(const Vec3& other) const {
  return angle_between_lines(s, other);
}

}  // namespace catavp
