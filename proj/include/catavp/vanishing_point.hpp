#pragma once

#include <utility>
#include <vector>

#include "catavp/camera.hpp"
#include "catavp/mirror.hpp"
#include "catavp/polynomial.hpp"

namespace catavp {

/// Coefficients of the reflection-plane constraint at lambda -> infinity,
///   x * kappa1[z] + kappa3[y, z] = 0:
///   kappa1[z]    = 2 s3 c2 - 2 s2 c3 - B s2 + 2 s2 (1 - A) z
///   kappa3[y,z]  = s1 (2A - 2) y z + s1 (B + 2 c3) y - 2 A s1 c2 z - B s1 c2
struct PlaneConstraint {
  double k1_const = 0.0, k1_z = 0.0;
  double k3_yz = 0.0, k3_y = 0.0, k3_z = 0.0, k3_const = 0.0;

  double eval_k1(double z) const { return k1_const + k1_z * z; }
  double eval_k3(double y, double z) const {
    return k3_yz * y * z + k3_y * y + k3_z * z + k3_const;
  }
  double max_abs() const;
};

PlaneConstraint plane_constraint(const CameraRig& rig, const DirectionVector& s);

/// basis {y^2, y z^2, y z, y, z^3, z^2, z, 1} of the Snell denominator
const MonomialBasis2& kappa9_basis();
/// basis {y^2 z^2, y^2 z, y^2, y z^2, y z, y, z^4, z^3, z^2, z, 1}
const MonomialBasis2& kappa10_basis();

/// Coefficients a1..a8 of the lambda-denominator of the Snell constraint,
/// recovered by exact interpolation of the residual assembled from the
/// reflected-ray components (the cross-product row free of x).
Eigen::VectorXd kappa9(const CameraRig& rig, const DirectionVector& s);

/// Coefficients b1..b11 of kappa3^2 + (y^2 + A z^2 + B z - C) kappa1^2.
Eigen::VectorXd kappa10(const CameraRig& rig, const DirectionVector& s);

/// Elimination outcome for a direction (after the axial-rig gauge rotation).
struct EliminationResult {
  Polynomial kappa16;            // z^k monomial content stripped
  int axis_root_multiplicity = 0;  // k: multiplicity of the stripped z = 0 root
  bool linear_branch = false;      // y^2 coefficient of kappa9 was ~0
  bool degenerate = false;         // kappa1 and kappa3 identically zero (continuum)
  bool axis_perp_branch = false;   // s2 = s3 = 0 handled by the d2/d3 pair
};

EliminationResult eliminate_direction(const CameraRig& rig, const DirectionVector& s);

struct VanishingPointSet {
  std::vector<MirrorPoint> points;
  std::vector<Pixel> pixels;  // aligned with points
  DirectionVector direction;
  bool degenerate_flag = false;  // continuum; points holds one symmetry representative
};

VanishingPointSet vps_from_direction(const CameraRig& rig, const DirectionVector& s);

/// Keep candidates whose reflected camera ray is parallel to +-s (within
/// parallel_tol radians) and that face the camera: <n(r), c - r> > 0.
std::vector<MirrorPoint> filter_valid(const CameraRig& rig,
                                      const std::vector<MirrorPoint>& candidates,
                                      const DirectionVector& s,
                                      double parallel_tol = 1e-6);

struct InconsistentVanishingPointError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Closed-form inverse: the +-pair of directions whose vanishing point is r,
/// via the linear row (in s2, s3), the squared plane row, and the unit norm.
std::pair<DirectionVector, DirectionVector> direction_from_vp(const CameraRig& rig,
                                                              const MirrorPoint& r);

struct RigNotCentralError : std::runtime_error {
  RigNotCentralError() : std::runtime_error("rig is not a central configuration") {}
};

/// Axis positions of the two conic foci, when the shape admits a central
/// configuration (prolate ellipsoid or two-sheet hyperboloid of revolution).
std::optional<std::pair<double, double>> quadric_foci(const MirrorShape& shape);

struct CentralVp {
  MirrorPoint point;
  Pixel pixel;
};

/// Central-model baseline: the camera must sit at one focus; a direction maps
/// to the mirror intersections of the line through the other focus along +-s.
std::vector<CentralVp> central_vp(const CameraRig& rig, const DirectionVector& s);

struct OracleOptions {
  int azimuth_samples = 256;
  int z_samples = 160;
  // grid local minima below this angle are handed to the refiner; the refiner
  // itself only accepts points parallel to +-s within 1e-9
  double coarse_tol = 0.35;  // radians
  double merge_tol = 1e-6;
};

/// Brute-force verifier: dense (azimuth, z) scan of the camera-facing surface
/// for reflected rays parallel to +-s, refined by Gauss-Newton.
std::vector<MirrorPoint> vp_oracle(const CameraRig& rig, const DirectionVector& s,
                                   const OracleOptions& opts = {});

}  // namespace catavp
