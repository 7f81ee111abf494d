#include "catavp/camera.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <vector>

namespace catavp {

std::vector<double> axis_intersections(const MirrorShape& shape) {
  std::vector<double> zs;
  const double A = shape.A, B = shape.B, C = shape.C;
  if (std::abs(A) < 1e-300) {
    if (std::abs(B) > 1e-300) zs.push_back(C / B);
    return zs;
  }
  const double disc = B * B + 4.0 * A * C;
  if (disc < 0.0) return zs;
  const double sq = std::sqrt(disc);
  zs.push_back((-B - sq) / (2.0 * A));
  zs.push_back((-B + sq) / (2.0 * A));
  std::sort(zs.begin(), zs.end());
  return zs;
}

namespace {

// Default usable z-range of the mirror sheet the camera looks at.
ZWindow default_window(const MirrorShape& shape, const Vec3& c) {
  const double A = shape.A, B = shape.B, C = shape.C;
  const double scale = std::max(1.0, c.norm());
  if (A > 0.0) {
    // bounded: radius_sq(z) >= 0 between the two roots of A z^2 + B z - C = 0
    const double disc = B * B + 4.0 * A * C;
    const double sq = std::sqrt(std::max(0.0, disc));
    return {(-B - sq) / (2.0 * A), (-B + sq) / (2.0 * A)};
  }
  if (A < 0.0) {
    const double z0 = -B / (2.0 * A);
    const double K = C + B * B / (4.0 * A);
    if (K < 0.0) {
      // two sheets; pick the one whose vertex is nearest the camera
      const double dz = std::sqrt(K / A);
      const double v_lo = z0 - dz, v_hi = z0 + dz;
      const double span = 3.0 * scale;
      if (std::abs(c[2] - v_lo) < std::abs(c[2] - v_hi)) return {v_lo - span, v_lo};
      return {v_hi, v_hi + span};
    }
    return {c[2] - 3.0 * scale, c[2] + 3.0 * scale};  // one sheet (tube)
  }
  if (std::abs(B) > 1e-300) {
    // paraboloid x^2 + y^2 = -B z + C: real for z on one side of C/B
    const double zv = C / B;
    const double span = 4.0 * scale;
    return B > 0.0 ? ZWindow{zv - span, zv} : ZWindow{zv, zv + span};
  }
  // cylinder
  return {c[2] - 3.0 * scale, c[2] + 3.0 * scale};
}

Vec3 choose_view_target(const MirrorShape& shape, const Vec3& c, const ZWindow& w) {
  // prefer the axis intersection (mirror apex) inside the window nearest the camera
  double best_d = std::numeric_limits<double>::infinity();
  Vec3 best = Vec3::Zero();
  bool found = false;
  for (double z : axis_intersections(shape)) {
    if (!w.contains(z, 1e-9 * std::max(1.0, w.span()))) continue;
    const Vec3 p(0.0, 0.0, z);
    const double d = (p - c).norm();
    if (d < best_d) {
      best_d = d;
      best = p;
      found = true;
    }
  }
  if (found) return best;
  // no apex (e.g. one-sheet hyperboloid / cylinder): coarse scan for the surface
  // point nearest the camera along the meridian through the camera
  const double phi = std::atan2(c[1], c[0]);
  const int n = 512;
  for (int i = 0; i <= n; ++i) {
    const double z = w.lo + (w.hi - w.lo) * i / n;
    const double rr = shape.radius_sq(z);
    if (rr < 0.0) continue;
    const double rho = std::sqrt(rr);
    const Vec3 p(rho * std::cos(phi), rho * std::sin(phi), z);
    const double d = (p - c).norm();
    if (d < best_d) {
      best_d = d;
      best = p;
      found = true;
    }
  }
  if (!found) throw std::invalid_argument("mirror surface is empty in the z window");
  return best;
}

}  // namespace

CameraRig canonicalize_rig(const MirrorShape& shape, const Vec3& raw_center,
                           const PinholeIntrinsics& intr, std::optional<ZWindow> z_window) {
  if (!raw_center.allFinite()) throw std::invalid_argument("non-finite camera center");
  if (!shape.valid()) throw std::invalid_argument("empty mirror surface");

  CameraRig rig;
  rig.shape = shape;
  rig.intrinsics = intr;

  // rotation about z mapping raw_center to [0, c2 >= 0, c3]
  const double rho = std::hypot(raw_center[0], raw_center[1]);
  Mat3 R = Mat3::Identity();
  if (rho > 0.0) {
    const double ct = raw_center[1] / rho;
    const double st = raw_center[0] / rho;
    R << ct, -st, 0.0, st, ct, 0.0, 0.0, 0.0, 1.0;
  }
  rig.world_rotation = R;
  rig.c = Vec3(0.0, rho, raw_center[2]);

  if (std::abs(mirror_eval(shape, rig.c)) <
      MirrorPoint::kSurfaceTol * MirrorPoint::surface_scale(shape, rig.c))
    throw std::invalid_argument("camera center lies on the mirror surface");

  rig.z_window = z_window ? *z_window : default_window(shape, rig.c);
  rig.view_target = choose_view_target(shape, rig.c, rig.z_window);

  // deterministic camera frame looking at the target
  Vec3 zc = rig.view_target - rig.c;
  const double zn = zc.norm();
  if (zn < 1e-12) throw std::invalid_argument("camera coincides with the view target");
  zc /= zn;
  Vec3 up = std::abs(zc.dot(Vec3::UnitX())) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  Vec3 xc = (up - zc * zc.dot(up)).normalized();
  Vec3 yc = zc.cross(xc);
  rig.cam_axes.col(0) = xc;
  rig.cam_axes.col(1) = yc;
  rig.cam_axes.col(2) = zc;
  return rig;
}

Pixel project_to_pixel(const CameraRig& rig, const Vec3& r) {
  const Vec3 pc = rig.cam_axes.transpose() * (r - rig.c);
  if (!(pc[2] > 0.0)) throw BehindCameraError();
  return {rig.intrinsics.fx * pc[0] / pc[2] + rig.intrinsics.cx,
          rig.intrinsics.fy * pc[1] / pc[2] + rig.intrinsics.cy};
}

Vec3 pixel_ray_direction(const CameraRig& rig, const Pixel& px) {
  const Vec3 dc((px.u - rig.intrinsics.cx) / rig.intrinsics.fx,
                (px.v - rig.intrinsics.cy) / rig.intrinsics.fy, 1.0);
  return (rig.cam_axes * dc).normalized();
}

bool camera_facing(const CameraRig& rig, const Vec3& r) {
  const Vec3 n = mirror_normal_raw(rig.shape, r);
  return n.dot(rig.c - r) > 0.0;
}

}  // namespace catavp
