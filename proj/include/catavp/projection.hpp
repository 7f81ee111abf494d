#pragma once

#include <vector>

#include "catavp/camera.hpp"
#include "catavp/mirror.hpp"
#include "catavp/plucker.hpp"

namespace catavp {

struct ForwardSolution {
  MirrorPoint point;
  Pixel pixel;
};

struct NoSolutionError : std::runtime_error {
  NoSolutionError() : std::runtime_error("forward projection found no reflection point") {}
};
struct RayMissesMirrorError : std::runtime_error {
  RayMissesMirrorError() : std::runtime_error("pixel ray misses the mirror") {}
};

struct ForwardOptions {
  int azimuth_starts = 16;
  int z_starts = 16;
  double snell_tol = 1e-10;  // on the normalized cross-product residual
  int max_iterations = 60;
};

/// All reflection points of scene point p: stationary points of the path length
/// |r - c| + |r - p| on the mirror, located by multi-start search on the
/// (azimuth, z) chart and refined until the Snell residual
/// |d(r) x (p - r)| / (|d| |p - r|) drops below snell_tol.
std::vector<ForwardSolution> forward_project(const CameraRig& rig, const Vec3& p,
                                             const ForwardOptions& opts = {});

/// Backproject a pixel: intersect the viewing ray with the mirror (nearest
/// camera-facing intersection), reflect, and return the scene line through the
/// reflection point.
PlueckerLine pixel_to_plucker(const CameraRig& rig, const Pixel& px);

/// Reflection point used by pixel_to_plucker, exposed for reuse.
Vec3 intersect_pixel_ray(const CameraRig& rig, const Pixel& px);

/// Nearest point on the mirror surface (gradient-projection iteration).
Vec3 nearest_surface_point(const MirrorShape& shape, const Vec3& p, int max_iter = 50);

}  // namespace catavp
