#include "catavp/vanishing_point.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

#include "catavp/projection.hpp"

namespace catavp {

namespace {

constexpr double kNodeScale = 1.5;
constexpr double kLinearBranchTol = 1e-9;   // on |a1| relative to max|a|
constexpr double kAxisTol = 1e-12;          // component magnitude for axis-parallel tests
constexpr double kSystemResidualTol = 1e-7;

// Components of the reflected camera ray with x^2 replaced via the mirror
// equation. d1 factors as x * d1x; d2 and d3 are free of x, which is what
// makes the cross-product row below purely bivariate.
struct ReflectedYZ {
  double d1x, d2, d3;
};

ReflectedYZ reflected_yz(const MirrorShape& m, const Vec3& c, double y, double z) {
  const double xsq = m.C - m.B * z - m.A * z * z - y * y;
  const double nz = m.A * z + m.B / 2.0;
  const double nsq = xsq + y * y + nz * nz;
  const double ddn = xsq + y * (y - c[1]) + nz * (z - c[2]);
  return {nsq - 2.0 * ddn, nsq * (y - c[1]) - 2.0 * y * ddn, nsq * (z - c[2]) - 2.0 * nz * ddn};
}

double geometry_scale(const CameraRig& rig) {
  const MirrorShape& m = rig.shape;
  return 1.0 + rig.c.norm() + std::abs(m.A) + std::abs(m.B) + std::abs(m.C);
}

const std::vector<Eigen::Vector2d>& nodes_for(const MonomialBasis2& basis) {
  static const std::vector<Eigen::Vector2d> n8 = interpolation_nodes(kappa9_basis(), kNodeScale);
  static const std::vector<Eigen::Vector2d> n11 =
      interpolation_nodes(kappa10_basis(), kNodeScale);
  static const std::vector<Eigen::Vector2d> n10 =
      interpolation_nodes(MonomialBasis2::total_degree(3), kNodeScale);
  if (basis.size() == kappa9_basis().size()) return n8;
  if (basis.size() == kappa10_basis().size()) return n11;
  return n10;
}

Eigen::VectorXd kappa9_for(const CameraRig& rig, const Vec3& s) {
  auto eval = [&](double y, double z) {
    const ReflectedYZ d = reflected_yz(rig.shape, rig.c, y, z);
    return d.d2 * s[2] - d.d3 * s[1];
  };
  return interpolate_coeffs(eval, kappa9_basis(), nodes_for(kappa9_basis()));
}

Eigen::VectorXd kappa10_for(const CameraRig& rig, const Vec3& s) {
  const DirectionVector sv(s);
  const PlaneConstraint pc = plane_constraint(rig, sv);
  auto eval = [&](double y, double z) {
    const double k1 = pc.eval_k1(z);
    const double k3 = pc.eval_k3(y, z);
    const double omega_yz = y * y + rig.shape.A * z * z + rig.shape.B * z - rig.shape.C;
    return k3 * k3 + omega_yz * k1 * k1;
  };
  return interpolate_coeffs(eval, kappa10_basis(), nodes_for(kappa10_basis()));
}

// Rotation angle about z taking s into the y-z half-plane (component 1 -> 0,
// component 2 >= 0). Only meaningful for axial rigs, which are z-rotation
// invariant.
double gauge_angle(const Vec3& s) { return std::atan2(s[0], s[1]); }

Mat3 rot_z(double t) {
  Mat3 R;
  R << std::cos(t), -std::sin(t), 0.0, std::sin(t), std::cos(t), 0.0, 0.0, 0.0, 1.0;
  return R;
}

struct GaugedDirection {
  Vec3 s;        // direction actually fed to the polynomial pipeline
  Mat3 back;     // maps gauged-frame points to rig-frame points
  bool applied;
};

GaugedDirection apply_gauge(const CameraRig& rig, const Vec3& s) {
  const double h = std::hypot(s[0], s[1]);
  if (!rig.axial(1e-12) || h < kAxisTol) return {s, Mat3::Identity(), false};
  const double t = gauge_angle(s);
  return {rot_z(t) * s, rot_z(-t), true};
}

bool plane_rows_vanish(const PlaneConstraint& pc, double scale) {
  return pc.max_abs() < 1e-12 * scale;
}

struct EliminationContext {
  EliminationResult result;
  Bivariate k9, k10;
  PlaneConstraint pc;
  Vec3 s_gauged = Vec3::UnitZ();
  Mat3 back = Mat3::Identity();
};

EliminationContext eliminate_impl(const CameraRig& rig, const Vec3& s_unit) {
  EliminationContext ctx;
  const GaugedDirection g = apply_gauge(rig, s_unit);
  ctx.s_gauged = g.s;
  ctx.back = g.back;

  const DirectionVector sg(g.s);
  ctx.pc = plane_constraint(rig, sg);

  if (plane_rows_vanish(ctx.pc, geometry_scale(rig)) && std::hypot(g.s[0], g.s[1]) < kAxisTol) {
    ctx.result.degenerate = true;
    return ctx;
  }

  if (std::hypot(g.s[1], g.s[2]) < kAxisTol) {
    // s parallel to the x axis of a non-axial rig: the chosen cross-product row
    // vanishes identically; the constraint moves to the d2/d3 pair.
    ctx.result.axis_perp_branch = true;
    return ctx;
  }

  const Eigen::VectorXd a = kappa9_for(rig, g.s);
  const Eigen::VectorXd b = kappa10_for(rig, g.s);
  ctx.k9 = Bivariate(kappa9_basis(), a);
  ctx.k10 = Bivariate(kappa10_basis(), b);

  Polynomial k16;
  if (std::abs(a[0]) > kLinearBranchTol * a.cwiseAbs().maxCoeff()) {
    k16 = poly_compose_resultant(ctx.k10, ctx.k9);
  } else {
    ctx.result.linear_branch = true;
    if (ctx.k9.y_slice(1).max_abs_coeff() <= 1e-12 * ctx.k9.max_abs_coeff()) {
      // kappa9 free of y (horizontal direction on an axial rig): it pins z by
      // itself and the y back-substitution falls through to the kappa10 slice
      k16 = ctx.k9.y_slice(0);
    } else {
      k16 = eliminate_y_linear(ctx.k10, ctx.k9);
    }
  }
  const int k = k16.low_order_zeros();
  ctx.result.axis_root_multiplicity = k;
  ctx.result.kappa16 = k16.shifted_down(k).trimmed();
  return ctx;
}

}  // namespace

double PlaneConstraint::max_abs() const {
  return std::max({std::abs(k1_const), std::abs(k1_z), std::abs(k3_yz), std::abs(k3_y),
                   std::abs(k3_z), std::abs(k3_const)});
}

PlaneConstraint plane_constraint(const CameraRig& rig, const DirectionVector& s) {
  const double A = rig.shape.A, B = rig.shape.B;
  const double c2 = rig.c[1], c3 = rig.c[2];
  const double s1 = s.s[0], s2 = s.s[1], s3 = s.s[2];
  PlaneConstraint pc;
  pc.k1_const = 2.0 * s3 * c2 - 2.0 * s2 * c3 - B * s2;
  pc.k1_z = 2.0 * s2 * (1.0 - A);
  pc.k3_yz = s1 * (2.0 * A - 2.0);
  pc.k3_y = s1 * (B + 2.0 * c3);
  pc.k3_z = -2.0 * A * s1 * c2;
  pc.k3_const = -B * s1 * c2;
  return pc;
}

const MonomialBasis2& kappa9_basis() {
  static const MonomialBasis2 b({{2, 0}, {1, 2}, {1, 1}, {1, 0}, {0, 3}, {0, 2}, {0, 1}, {0, 0}});
  return b;
}

const MonomialBasis2& kappa10_basis() {
  static const MonomialBasis2 b({{2, 2}, {2, 1}, {2, 0}, {1, 2}, {1, 1}, {1, 0},
                                 {0, 4}, {0, 3}, {0, 2}, {0, 1}, {0, 0}});
  return b;
}

Eigen::VectorXd kappa9(const CameraRig& rig, const DirectionVector& s) {
  return kappa9_for(rig, s.s);
}

Eigen::VectorXd kappa10(const CameraRig& rig, const DirectionVector& s) {
  return kappa10_for(rig, s.s);
}

EliminationResult eliminate_direction(const CameraRig& rig, const DirectionVector& s) {
  return eliminate_impl(rig, s.s).result;
}

std::vector<MirrorPoint> filter_valid(const CameraRig& rig,
                                      const std::vector<MirrorPoint>& candidates,
                                      const DirectionVector& s, double parallel_tol) {
  std::vector<MirrorPoint> out;
  for (const MirrorPoint& mp : candidates) {
    const Vec3 n = mirror_normal_raw(rig.shape, mp.r);
    if (n.squaredNorm() == 0.0) continue;
    if (!(n.dot(rig.c - mp.r) > 0.0)) continue;
    const Vec3 d = scene_direction_at(rig.shape, rig.c, mp.r);
    if (angle_between_lines(d, s.s) > parallel_tol) continue;
    out.push_back(mp);
  }
  return out;
}

namespace {

void polish_yz(const Bivariate& k9, const Bivariate& k10, double& y, double& z) {
  const double h = 1e-7;
  for (int it = 0; it < 3; ++it) {
    Eigen::Vector2d f(k9.eval(y, z), k10.eval(y, z));
    Eigen::Matrix2d J;
    J(0, 0) = (k9.eval(y + h, z) - f[0]) / h;
    J(0, 1) = (k9.eval(y, z + h) - f[0]) / h;
    J(1, 0) = (k10.eval(y + h, z) - f[1]) / h;
    J(1, 1) = (k10.eval(y, z + h) - f[1]) / h;
    const Eigen::Vector2d step = J.colPivHouseholderQr().solve(-f);
    if (!step.allFinite()) return;
    const double y2 = y + step[0], z2 = z + step[1];
    if (std::hypot(k9.eval(y2, z2), k10.eval(y2, z2)) < f.norm()) {
      y = y2;
      z = z2;
    } else {
      return;
    }
  }
}

// candidate (y, z) pairs for one root z of kappa16
std::vector<Eigen::Vector2d> back_substitute_y(const EliminationContext& ctx, double z) {
  std::vector<Eigen::Vector2d> out;
  const Polynomial a1p = ctx.k9.y_slice(2);
  const Polynomial beta = ctx.k9.y_slice(1);
  const Polynomial gamma = ctx.k9.y_slice(0);
  const double a1 = a1p.eval(0.0);
  const double k9scale = ctx.k9.max_abs_coeff();

  if (!ctx.result.linear_branch) {
    const double b = beta.eval(z), c = gamma.eval(z);
    const double disc = b * b - 4.0 * a1 * c;
    const double dscale = b * b + std::abs(4.0 * a1 * c) + 1e-300;
    if (disc < -1e-9 * dscale) return out;  // squaring artifact: no real y
    const double sq = std::sqrt(std::max(0.0, disc));
    out.emplace_back((-b + sq) / (2.0 * a1), z);
    out.emplace_back((-b - sq) / (2.0 * a1), z);
    return out;
  }

  const double bz = beta.eval(z);
  if (std::abs(bz) > 1e-8 * k9scale * (1.0 + std::abs(z))) {
    out.emplace_back(-gamma.eval(z) / bz, z);
    return out;
  }
  // beta(z) ~ 0: the Snell row no longer pins y here; fall back to the
  // quadratic-in-y slice of kappa10
  const double P = ctx.k10.y_slice(2).eval(z);
  const double Q = ctx.k10.y_slice(1).eval(z);
  const double R = ctx.k10.y_slice(0).eval(z);
  if (std::abs(P) > 1e-12 * ctx.k10.max_abs_coeff()) {
    const double disc = Q * Q - 4.0 * P * R;
    if (disc >= 0.0) {
      const double sq = std::sqrt(disc);
      out.emplace_back((-Q + sq) / (2.0 * P), z);
      out.emplace_back((-Q - sq) / (2.0 * P), z);
    }
  }
  return out;
}

// x candidates for a (y, z) pair: the plane row when usable, otherwise both
// mirror-equation signs (the validity filter rejects the wrong one)
std::vector<double> back_substitute_x(const CameraRig& rig, const EliminationContext& ctx,
                                      double y, double z) {
  const PlaneConstraint& pc = ctx.pc;
  const double k1 = pc.eval_k1(z);
  const double k1scale =
      std::max({std::abs(pc.k1_const), std::abs(pc.k1_z) * (1.0 + std::abs(z)), 1e-300});
  const double xsq = rig.shape.radius_sq(z) - y * y;
  if (std::abs(k1) > 1e-8 * k1scale) {
    const double x = -pc.eval_k3(y, z) / k1;
    return {x};
  }
  if (xsq < -1e-9 * (1.0 + std::abs(rig.shape.C))) return {};
  const double x = std::sqrt(std::max(0.0, xsq));
  if (x == 0.0) return {0.0};
  return {x, -x};
}

void append_candidate(const CameraRig& rig, std::vector<MirrorPoint>& cands, const Vec3& r) {
  if (!r.allFinite()) return;
  if (!rig.z_window.contains(r[2], 1e-9 * std::max(1.0, rig.z_window.span()))) return;
  const double omega = mirror_eval(rig.shape, r);
  const double sscale = MirrorPoint::surface_scale(rig.shape, r);
  if (std::abs(omega) > kSystemResidualTol * sscale) return;
  // land exactly on the surface before the invariant-checked wrap
  Vec3 rp = nearest_surface_point(rig.shape, r);
  if (std::abs(mirror_eval(rig.shape, rp)) > MirrorPoint::kSurfaceTol * sscale) return;
  cands.push_back(MirrorPoint(rp));
}

// s parallel to the x axis of a non-axial rig: solve d2 = d3 = 0 directly.
std::vector<MirrorPoint> solve_axis_perp(const CameraRig& rig) {
  const MonomialBasis2& basis = MonomialBasis2::total_degree(3);
  auto ev2 = [&](double y, double z) { return reflected_yz(rig.shape, rig.c, y, z).d2; };
  auto ev3 = [&](double y, double z) { return reflected_yz(rig.shape, rig.c, y, z).d3; };
  const Bivariate d2(basis, interpolate_coeffs(ev2, basis, nodes_for(basis)));
  const Bivariate d3(basis, interpolate_coeffs(ev3, basis, nodes_for(basis)));

  std::vector<Eigen::Vector2d> yz;
  const Polynomial b3 = d3.y_slice(1);
  if (!b3.is_zero()) {
    const Polynomial k = eliminate_y_linear(d2, d3);
    if (!k.is_zero()) {
      for (double z : real_roots(k)) {
        const double bz = b3.eval(z);
        if (std::abs(bz) > 1e-10 * d3.max_abs_coeff() * (1.0 + std::abs(z)))
          yz.emplace_back(-d3.y_slice(0).eval(z) / bz, z);
      }
    }
  } else {
    // d3 free of y (cylindrical shapes): z from d3(z) = 0, then y from d2
    const Polynomial d3z = d3.y_slice(0);
    if (!d3z.is_zero()) {
      for (double z : real_roots(d3z)) {
        const double P = d2.y_slice(2).eval(z);
        const double Q = d2.y_slice(1).eval(z);
        const double R = d2.y_slice(0).eval(z);
        if (std::abs(P) > 1e-12 * d2.max_abs_coeff()) {
          const double disc = Q * Q - 4.0 * P * R;
          if (disc >= 0.0) {
            yz.emplace_back((-Q + std::sqrt(disc)) / (2.0 * P), z);
            yz.emplace_back((-Q - std::sqrt(disc)) / (2.0 * P), z);
          }
        } else if (std::abs(Q) > 1e-12 * d2.max_abs_coeff()) {
          yz.emplace_back(-R / Q, z);
        }
      }
    }
  }

  std::vector<MirrorPoint> cands;
  for (auto& p : yz) {
    double y = p[0], z = p[1];
    polish_yz(d2, d3, y, z);
    const double xsq = rig.shape.radius_sq(z) - y * y;
    if (xsq < -1e-9) continue;
    const double x = std::sqrt(std::max(0.0, xsq));
    append_candidate(rig, cands, Vec3(x, y, z));
    if (x > 0.0) append_candidate(rig, cands, Vec3(-x, y, z));
  }
  return cands;
}

MirrorPoint axial_representative(const CameraRig& rig) {
  // apex of the camera-facing side: retro-reflection point of the axis continuum
  for (double z : axis_intersections(rig.shape)) {
    if (!rig.z_window.contains(z, 1e-9 * std::max(1.0, rig.z_window.span()))) continue;
    const Vec3 r(0.0, 0.0, z);
    if (mirror_normal_raw(rig.shape, r).squaredNorm() == 0.0) continue;
    if (camera_facing(rig, r)) return MirrorPoint(r);
  }
  throw InconsistentVanishingPointError("no camera-facing apex for the degenerate direction");
}

void dedup_sort(std::vector<MirrorPoint>& pts, double tol) {
  std::sort(pts.begin(), pts.end(), [](const MirrorPoint& a, const MirrorPoint& b) {
    return std::make_tuple(a.r[2], a.r[1], a.r[0]) < std::make_tuple(b.r[2], b.r[1], b.r[0]);
  });
  std::vector<MirrorPoint> out;
  for (const MirrorPoint& p : pts) {
    bool dup = false;
    for (const MirrorPoint& q : out)
      if ((p.r - q.r).norm() < tol) {
        dup = true;
        break;
      }
    if (!dup) out.push_back(p);
  }
  pts.swap(out);
}

}  // namespace

VanishingPointSet vps_from_direction(const CameraRig& rig, const DirectionVector& s) {
  VanishingPointSet set;
  set.direction = s;

  const EliminationContext ctx = eliminate_impl(rig, s.s);

  if (ctx.result.degenerate) {
    set.degenerate_flag = true;
    const MirrorPoint rep = axial_representative(rig);
    set.points.push_back(rep);
    set.pixels.push_back(project_to_pixel(rig, rep));
    return set;
  }

  std::vector<MirrorPoint> cands;
  if (ctx.result.axis_perp_branch) {
    cands = solve_axis_perp(rig);
  } else {
    std::vector<double> roots;
    if (!ctx.result.kappa16.is_zero()) roots = real_roots(ctx.result.kappa16);
    if (ctx.result.axis_root_multiplicity > 0) roots.push_back(0.0);
    const DirectionVector sg(ctx.s_gauged);
    for (double z : roots) {
      for (const Eigen::Vector2d& yz : back_substitute_y(ctx, z)) {
        double yp = yz[0], zp = yz[1];
        polish_yz(ctx.k9, ctx.k10, yp, zp);
        // residual gate on the unsquared system before geometric filtering
        const double k9r = std::abs(ctx.k9.eval(yp, zp));
        const double k10r = std::abs(ctx.k10.eval(yp, zp));
        const double pscale = 1.0 + yp * yp + std::pow(std::abs(zp) + 1.0, 4);
        if (k9r > kSystemResidualTol * ctx.k9.max_abs_coeff() * pscale) continue;
        if (k10r > kSystemResidualTol * ctx.k10.max_abs_coeff() * pscale) continue;
        for (double x : back_substitute_x(rig, ctx, yp, zp))
          append_candidate(rig, cands, Vec3(x, yp, zp));
      }
    }
    if (ctx.back != Mat3::Identity())
      for (MirrorPoint& p : cands) p.r = ctx.back * p.r;
  }

  std::vector<MirrorPoint> valid = filter_valid(rig, cands, s);
  dedup_sort(valid, 1e-8 * std::max(1.0, rig.c.norm()));

  for (const MirrorPoint& p : valid) {
    try {
      set.pixels.push_back(project_to_pixel(rig, p));
      set.points.push_back(p);
    } catch (const BehindCameraError&) {
      // outside the pinhole's view; not observable as an image point
    }
  }
  return set;
}

std::pair<DirectionVector, DirectionVector> direction_from_vp(const CameraRig& rig,
                                                              const MirrorPoint& mp) {
  const MirrorShape& m = rig.shape;
  const double x = mp.r[0], y = mp.r[1], z = mp.r[2];
  const double c2 = rig.c[1], c3 = rig.c[2];

  const Vec3 n = mirror_normal_raw(m, mp.r);
  if (n.squaredNorm() == 0.0) throw DegenerateNormalError();

  const ReflectedYZ d = reflected_yz(m, rig.c, y, z);
  const double dscale = std::max({std::abs(d.d2), std::abs(d.d3), 1e-300});

  // kappa17 = a1 s2 + a2 s3 with a1 = -d3, a2 = d2
  const double a1 = -d.d3, a2 = d.d2;
  // kappa18 = b1 s1^2 + b2 s2^2 + b3 s2 s3 + b4 s3^2 (plane row squared, on-surface)
  const double G = (2.0 * m.A - 2.0) * y * z + (m.B + 2.0 * c3) * y - 2.0 * m.A * c2 * z - m.B * c2;
  const double mu = -2.0 * c3 - m.B + 2.0 * (1.0 - m.A) * z;
  const double nu = 2.0 * c2;
  const double xsq = std::max(0.0, m.radius_sq(z) - y * y);
  const double b1 = G * G;
  const double b2 = -xsq * mu * mu;
  const double b3 = -2.0 * xsq * mu * nu;
  const double b4 = -xsq * nu * nu;

  double s1 = 0.0, s2 = 0.0, s3 = 0.0;
  const double bscale = std::max({std::abs(b1), std::abs(b2), std::abs(b4), 1e-300});

  if (b1 <= 1e-14 * bscale) {
    // kappa18 loses its s1 row here and the cascade cannot fix the (s2, s3)
    // magnitude; the system is completed by the remaining Snell rows, which
    // force s parallel to the full reflected ray (signed x from the point)
    const Vec3 dir(x * d.d1x, d.d2, d.d3);
    const double h = dir.norm();
    if (h < 1e-300) throw InconsistentVanishingPointError("reflected ray vanishes");
    s1 = dir[0] / h;
    s2 = dir[1] / h;
    s3 = dir[2] / h;
  } else if (std::abs(a2) >= std::abs(a1)) {
    const double t = a1 / a2;  // s3 = -t s2
    const double den = b2 - b3 * t + b4 * t * t - b1 - b1 * t * t;
    if (std::abs(den) < 1e-14 * bscale)
      throw InconsistentVanishingPointError("degenerate direction system");
    const double s2sq = -b1 / den;
    if (s2sq < -1e-12 || s2sq > 1.0 + 1e-9)
      throw InconsistentVanishingPointError("s2^2 outside [0, 1]: not a vanishing point");
    s2 = std::sqrt(std::min(1.0, std::max(0.0, s2sq)));
    s3 = -t * s2;
    const double rest = 1.0 - s2 * s2 - s3 * s3;
    s1 = std::sqrt(std::max(0.0, rest));
  } else {
    if (std::abs(a1) < 1e-12 * dscale)
      throw InconsistentVanishingPointError("kappa17 vanishes identically at this point");
    const double t = a2 / a1;  // s2 = -t s3
    const double den = b4 - b3 * t + b2 * t * t - b1 - b1 * t * t;
    if (std::abs(den) < 1e-14 * bscale)
      throw InconsistentVanishingPointError("degenerate direction system");
    const double s3sq = -b1 / den;
    if (s3sq < -1e-12 || s3sq > 1.0 + 1e-9)
      throw InconsistentVanishingPointError("s3^2 outside [0, 1]: not a vanishing point");
    s3 = std::sqrt(std::min(1.0, std::max(0.0, s3sq)));
    s2 = -t * s3;
    const double rest = 1.0 - s2 * s2 - s3 * s3;
    s1 = std::sqrt(std::max(0.0, rest));
  }

  // the cascade leaves two sign choices; the unsquared plane row keeps the
  // consistent +- pair
  const DirectionVector sv0 = DirectionVector(Vec3(s1, s2, s3));
  const DirectionVector sv1 = DirectionVector(Vec3(-s1, s2, s3));
  auto row1_residual = [&](const DirectionVector& sv) {
    const PlaneConstraint pc = plane_constraint(rig, sv);
    return std::abs(x * pc.eval_k1(z) + pc.eval_k3(y, z));
  };
  const DirectionVector best = row1_residual(sv0) <= row1_residual(sv1) ? sv0 : sv1;

  // geometric cross-check: a vanishing point is exactly the surface point whose
  // reflected camera ray is parallel to the direction
  const Vec3 dgeo = scene_direction_at(m, rig.c, mp.r);
  if (angle_between_lines(best.s, dgeo) > 1e-9)
    throw InconsistentVanishingPointError("cascade disagrees with the reflected-ray direction");

  return {best, DirectionVector(Vec3(-best.s))};
}

std::optional<std::pair<double, double>> quadric_foci(const MirrorShape& shape) {
  const double A = shape.A, B = shape.B, C = shape.C;
  if (std::abs(A) < 1e-12 || std::abs(A - 1.0) < 1e-12) return std::nullopt;
  const double z0 = -B / (2.0 * A);
  const double K = C + B * B / (4.0 * A);
  const bool hyperboloid = A < 0.0 && K < 0.0;
  const bool prolate = A > 0.0 && A < 1.0 && K > 0.0;
  if (!hyperboloid && !prolate) return std::nullopt;
  const double cf = std::sqrt(K * (1.0 - A) / A);
  return std::make_pair(z0 - cf, z0 + cf);
}

std::vector<CentralVp> central_vp(const CameraRig& rig, const DirectionVector& s) {
  const auto foci = quadric_foci(rig.shape);
  const double scale = std::max(1.0, rig.c.norm());
  if (!foci || !rig.axial(1e-9 * scale)) throw RigNotCentralError();
  double viewpoint;
  if (std::abs(rig.c[2] - foci->first) < 1e-9 * scale)
    viewpoint = foci->second;
  else if (std::abs(rig.c[2] - foci->second) < 1e-9 * scale)
    viewpoint = foci->first;
  else
    throw RigNotCentralError();

  // intersections of the line through the effective viewpoint along +-s
  const Vec3 F(0.0, 0.0, viewpoint);
  const Vec3& v = s.s;
  const double A = rig.shape.A, B = rig.shape.B;
  const double qa = v[0] * v[0] + v[1] * v[1] + A * v[2] * v[2];
  const double qb = 2.0 * (F[0] * v[0] + F[1] * v[1] + A * F[2] * v[2]) + B * v[2];
  const double qc = mirror_eval(rig.shape, F);

  std::vector<double> ts;
  if (std::abs(qa) < 1e-14) {
    if (std::abs(qb) > 0.0) ts.push_back(-qc / qb);
  } else {
    const double disc = qb * qb - 4.0 * qa * qc;
    if (disc >= 0.0) {
      const double sq = std::sqrt(disc);
      ts.push_back((-qb - sq) / (2.0 * qa));
      ts.push_back((-qb + sq) / (2.0 * qa));
    }
  }

  std::vector<CentralVp> out;
  for (double t : ts) {
    const Vec3 r = F + t * v;
    if (!rig.z_window.contains(r[2], 1e-9 * std::max(1.0, rig.z_window.span()))) continue;
    if (!camera_facing(rig, r)) continue;
    try {
      out.push_back({MirrorPoint(r), project_to_pixel(rig, r)});
    } catch (const BehindCameraError&) {
    }
  }
  std::sort(out.begin(), out.end(), [](const CentralVp& a, const CentralVp& b) {
    return std::make_tuple(a.point.r[2], a.point.r[1], a.point.r[0]) <
           std::make_tuple(b.point.r[2], b.point.r[1], b.point.r[0]);
  });
  return out;
}

std::vector<MirrorPoint> vp_oracle(const CameraRig& rig, const DirectionVector& s,
                                   const OracleOptions& opts) {
  const int na = opts.azimuth_samples, nz = opts.z_samples;
  const double zlo = rig.z_window.lo, span = rig.z_window.span();

  auto surface_point = [&](double theta, double z) {
    const double rr = std::max(0.0, rig.shape.radius_sq(z));
    const double rho = std::sqrt(rr);
    return Vec3(rho * std::cos(theta), rho * std::sin(theta), z);
  };
  auto score = [&](double theta, double z) {
    const Vec3 r = surface_point(theta, z);
    const Vec3 n = mirror_normal_raw(rig.shape, r);
    if (n.squaredNorm() == 0.0 || !(n.dot(rig.c - r) > 0.0))
      return 10.0;  // off the camera-facing side
    return angle_between_lines(reflect_direction(n, Vec3(r - rig.c)), s.s);
  };

  Eigen::MatrixXd grid(na, nz);
  for (int i = 0; i < na; ++i)
    for (int j = 0; j < nz; ++j)
      grid(i, j) = score(2.0 * M_PI * i / na, zlo + span * (j + 0.5) / nz);

  std::vector<MirrorPoint> found;
  auto refine = [&](double theta, double z) {
    auto res = [&](double t2, double z2) {
      const Vec3 rr = surface_point(t2, z2);
      const Vec3 nn = mirror_normal_raw(rig.shape, rr);
      if (nn.squaredNorm() == 0.0) return Vec3(1.0, 1.0, 1.0);
      return Vec3(reflect_direction(nn, Vec3(rr - rig.c)).cross(s.s));
    };
    auto clamp_z = [&](double zz) { return std::min(zlo + span, std::max(zlo, zz)); };

    // damped Gauss-Newton on d(r) x s over the chart
    for (int it = 0; it < 60; ++it) {
      const Vec3 f = res(theta, z);
      if (f.norm() < 1e-13) break;
      const double et = 1e-7, ez = 1e-7 * std::max(1.0, std::abs(z));
      Eigen::Matrix<double, 3, 2> J;
      J.col(0) = (res(theta + et, z) - f) / et;
      J.col(1) = (res(theta, clamp_z(z + ez)) - f) / ez;
      Eigen::Vector2d step = J.colPivHouseholderQr().solve(Eigen::Vector3d(-f));
      if (!step.allFinite()) return;
      const double cap = 0.25 * (1.0 + span);
      if (step.norm() > cap) step *= cap / step.norm();
      double damp = 1.0;
      bool moved = false;
      const double fn = f.norm();
      for (int ls = 0; ls < 8; ++ls) {
        const double t2 = theta + damp * step[0];
        const double z2 = clamp_z(z + damp * step[1]);
        if (res(t2, z2).norm() < fn) {
          theta = t2;
          z = z2;
          moved = true;
          break;
        }
        damp *= 0.5;
      }
      if (!moved) return;
      if (damp * step.norm() < 1e-15) break;
    }
    const Vec3 r = surface_point(theta, z);
    const Vec3 n = mirror_normal_raw(rig.shape, r);
    if (n.squaredNorm() == 0.0 || !(n.dot(rig.c - r) > 0.0)) return;
    if (angle_between_lines(reflect_direction(n, Vec3(r - rig.c)), s.s) > 1e-9) return;
    for (const MirrorPoint& q : found)
      if ((q.r - r).norm() < opts.merge_tol) return;
    found.push_back(MirrorPoint(nearest_surface_point(rig.shape, r)));
  };

  for (int i = 0; i < na; ++i) {
    for (int j = 0; j < nz; ++j) {
      const double v = grid(i, j);
      if (v > opts.coarse_tol) continue;
      bool is_min = true;
      for (int di = -1; di <= 1 && is_min; ++di)
        for (int dj = -1; dj <= 1 && is_min; ++dj) {
          if (!di && !dj) continue;
          const int jj = std::min(nz - 1, std::max(0, j + dj));
          if (grid((i + di + na) % na, jj) < v) is_min = false;
        }
      if (is_min) refine(2.0 * M_PI * i / na, zlo + span * (j + 0.5) / nz);
    }
  }

  std::sort(found.begin(), found.end(), [](const MirrorPoint& a, const MirrorPoint& b) {
    return std::make_tuple(a.r[2], a.r[1], a.r[0]) < std::make_tuple(b.r[2], b.r[1], b.r[0]);
  });
  return found;
}

}  // namespace catavp
