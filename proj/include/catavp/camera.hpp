#pragma once

#include <Eigen/Core>

#include <optional>
#include <stdexcept>

#include "catavp/mirror.hpp"

namespace catavp {

struct PinholeIntrinsics {
  double fx = 500.0;
  double fy = 500.0;
  double cx = 320.0;
  double cy = 240.0;
};

struct Pixel {
  double u = 0.0;
  double v = 0.0;
};

struct ZWindow {
  double lo = -1.0;
  double hi = 1.0;
  bool contains(double z, double margin = 0.0) const { return z >= lo - margin && z <= hi + margin; }
  double mid() const { return 0.5 * (lo + hi); }
  double span() const { return hi - lo; }
};

/// Canonicalized camera + mirror assembly. The world frame is rotated about the
/// mirror axis so the perspective camera center is c = [0, c2, c3] with c2 >= 0.
struct CameraRig {
  MirrorShape shape;
  Vec3 c = Vec3(0, 0, 3);
  PinholeIntrinsics intrinsics;
  Mat3 world_rotation = Mat3::Identity();
  ZWindow z_window;

  // derived camera frame: columns x_cam, y_cam, z_cam; z_cam is the viewing axis
  Mat3 cam_axes = Mat3::Identity();
  Vec3 view_target = Vec3::Zero();

  bool axial(double tol = 1e-12) const { return std::abs(c[1]) <= tol; }
};

/// Rotate raw_center about the z axis so component 1 vanishes (and component 2 >= 0),
/// attach intrinsics, derive the camera frame and a usable z-range of the mirror.
CameraRig canonicalize_rig(const MirrorShape& shape, const Vec3& raw_center,
                           const PinholeIntrinsics& intr,
                           std::optional<ZWindow> z_window = std::nullopt);

struct BehindCameraError : std::runtime_error {
  BehindCameraError() : std::runtime_error("point is behind the camera") {}
};

Pixel project_to_pixel(const CameraRig& rig, const Vec3& r);
inline Pixel project_to_pixel(const CameraRig& rig, const MirrorPoint& r) {
  return project_to_pixel(rig, r.r);
}

/// Unit ray direction (world frame) of the viewing ray through a pixel.
Vec3 pixel_ray_direction(const CameraRig& rig, const Pixel& px);

/// Mirror point on the camera-facing side: <n(r), c - r> > 0.
bool camera_facing(const CameraRig& rig, const Vec3& r);

/// z values where the mirror meets its axis (roots of A z^2 + B z - C), ascending.
std::vector<double> axis_intersections(const MirrorShape& shape);

}  // namespace catavp
