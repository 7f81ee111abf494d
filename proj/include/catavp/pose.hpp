#pragma once

#include <vector>

#include "catavp/camera.hpp"
#include "catavp/mirror.hpp"
#include "catavp/plucker.hpp"
#include "catavp/vanishing_point.hpp"

namespace catavp {

struct DirectionCorrespondence {
  DirectionVector cam_dir;    // measured in the camera frame, sign-ambiguous
  DirectionVector world_dir;  // known in the world frame
};

struct LineCorrespondence {
  PlueckerLine world_line;
  std::vector<PlueckerLine> measured_rays;  // backprojected pixels on the image curve
};

struct Pose {
  Mat3 R = Mat3::Identity();
  Vec3 t = Vec3::Zero();
};

struct AllParallelError : std::runtime_error {
  AllParallelError() : std::runtime_error("all directions parallel: rotation unobservable") {}
};
struct RankDeficientError : std::runtime_error {
  RankDeficientError() : std::runtime_error("translation system is rank deficient") {}
};

/// Rotation R minimizing sum |R world_i - cam_i|^2 (orthogonal Procrustes with
/// determinant correction). The +- ambiguity of the camera directions is
/// resolved by enumeration (exhaustive for N <= 4, greedy after). For N = 2 the
/// cross-product direction is appended on both sides.
Mat3 rotation_procrustes(const std::vector<DirectionCorrespondence>& corr);

/// Translation from the generalized epipolar constraint
///   <[t]x R s_w, s> + <R s_w, m> + <R m_w, s> = 0
/// stacked over all measured rays, solved least squares via the pseudo-inverse.
Vec3 translation_from_lines(const Mat3& R, const std::vector<LineCorrespondence>& lines);

/// One stacked constraint row: a . t = b.
std::pair<Vec3, double> epipolar_row(const Mat3& R, const PlueckerLine& world_line,
                                     const PlueckerLine& ray);

struct VpObservation {
  MirrorPoint point;          // vanishing point on the mirror
  DirectionVector world_dir;  // direction of the generating bundle in the world
};

struct LinePixelObservation {
  PlueckerLine world_line;
  std::vector<Pixel> pixels;  // image points on the line's projection curve
};

/// Absolute pose: directions from the vanishing points, rotation by Procrustes,
/// rays by backprojection, translation from the stacked epipolar rows.
Pose absolute_pose(const CameraRig& rig, const std::vector<VpObservation>& vps,
                   const std::vector<LinePixelObservation>& line_pixels);

/// Rotation between two views of the same rig from matched vanishing points.
Mat3 relative_rotation(const CameraRig& rig,
                       const std::vector<std::pair<MirrorPoint, MirrorPoint>>& vp_matches);

struct LineFitResult {
  PlueckerLine line;
  double rms_pixels = 0.0;
  bool converged = false;
};

struct LineFitOptions {
  double rms_threshold = 0.25;  // pixels
  int max_iterations = 100;
  int curve_samples = 24;       // forward-projected points per cost evaluation
  double lambda_span = 8.0;     // arclength range sampled along the candidate line
};

/// Iteratively fit a 3D line to pixels of its projection curve by
/// derivative-free coordinate descent on the 4 line degrees of freedom; the
/// curve is sampled through forward projection.
LineFitResult fit_line_to_pixels(const CameraRig& rig, const std::vector<Pixel>& pixels,
                                 const PlueckerLine& init, const LineFitOptions& opts = {});

/// Initial line estimate from pairwise near-intersections of backprojected rays.
PlueckerLine triangulate_line(const CameraRig& rig, const std::vector<Pixel>& pixels);

}  // namespace catavp
