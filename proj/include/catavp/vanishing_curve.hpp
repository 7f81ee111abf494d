#pragma once

#include <utility>
#include <vector>

#include "catavp/camera.hpp"
#include "catavp/mirror.hpp"
#include "catavp/polynomial.hpp"
#include "catavp/vanishing_point.hpp"

namespace catavp {

struct PlaneNormal {
  Vec3 n = Vec3::UnitZ();
  PlaneNormal() = default;
  explicit PlaneNormal(const Vec3& v) : n(DirectionVector(v).s) {}
};

/// Two independent unit directions spanning the plane perpendicular to n:
/// the two largest of n x e1, n x e2, n x e3, normalized.
std::pair<DirectionVector, DirectionVector> perpendicular_basis(const PlaneNormal& n);

/// Surface containing every vanishing point of every direction in the plane:
///   Gamma(r) = kappa20[y, z] * x + kappa21[y, z],
/// with kappa20 of total degree 2 and kappa21 of total degree 3. Coefficients
/// are normalized so the largest magnitude is 1.
struct GammaSurface {
  Eigen::VectorXd kappa20;  // on MonomialBasis2::total_degree(2)
  Eigen::VectorXd kappa21;  // on MonomialBasis2::total_degree(3)
  PlaneNormal normal;

  double eval(const Vec3& r) const;
  Vec3 gradient(const Vec3& r) const;
  double eval_k20(double y, double z) const;
  double eval_k21(double y, double z) const;
};

struct DegeneratePlaneError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Build Gamma by interpolating the plane-membership residual of the reflected
/// ray on the stated bases, then certify: vanishing points of sampled in-plane
/// directions must zero Gamma within 1e-7.
GammaSurface gamma_surface(const CameraRig& rig, const PlaneNormal& n);

struct VanishingCurve {
  std::vector<MirrorPoint> samples;
  PlaneNormal normal;
  bool closed = false;
};

struct EmptyCurveError : std::runtime_error {
  EmptyCurveError() : std::runtime_error("no vanishing curve in the camera-facing region") {}
};

/// Trace {Omega = 0} ∩ {Gamma = 0} by predictor-corrector continuation; every
/// sample satisfies |Omega| < 1e-9 and |Gamma| < 1e-9 and consecutive samples
/// are closer than arc_step.
VanishingCurve trace_vanishing_curve(const CameraRig& rig, const PlaneNormal& n,
                                     double arc_step);

bool on_curve(const CameraRig& rig, const PlaneNormal& n, const Vec3& r, double tol);

/// Distance from p to the traced polyline, sharpened by projecting onto the
/// implicit curve near the closest segment.
double distance_to_curve(const CameraRig& rig, const GammaSurface& gamma,
                         const VanishingCurve& curve, const Vec3& p);

}  // namespace catavp
