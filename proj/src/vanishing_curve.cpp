#include "catavp/vanishing_curve.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace catavp {

namespace {

constexpr double kNodeScale = 1.5;

struct ReflectedParts {
  double d1x, d2, d3;
};

ReflectedParts reflected_parts(const MirrorShape& m, const Vec3& c, double y, double z) {
  const double xsq = m.C - m.B * z - m.A * z * z - y * y;
  const double nz = m.A * z + m.B / 2.0;
  const double nsq = xsq + y * y + nz * nz;
  const double ddn = xsq + y * (y - c[1]) + nz * (z - c[2]);
  return {nsq - 2.0 * ddn, nsq * (y - c[1]) - 2.0 * y * ddn, nsq * (z - c[2]) - 2.0 * nz * ddn};
}

double poly_scale(const Vec3& r) {
  const double m = 1.0 + r.cwiseAbs().maxCoeff();
  return m * m * m * (1.0 + std::abs(r[0]));
}

}  // namespace

std::pair<DirectionVector, DirectionVector> perpendicular_basis(const PlaneNormal& n) {
  const Vec3 cands[3] = {n.n.cross(Vec3::UnitX()), n.n.cross(Vec3::UnitY()),
                         n.n.cross(Vec3::UnitZ())};
  int i0 = 0, i1 = 1;
  double best0 = -1.0, best1 = -1.0;
  for (int i = 0; i < 3; ++i) {
    const double nn = cands[i].norm();
    if (nn > best0) {
      best1 = best0;
      i1 = i0;
      best0 = nn;
      i0 = i;
    } else if (nn > best1) {
      best1 = nn;
      i1 = i;
    }
  }
  return {DirectionVector(cands[i0]), DirectionVector(cands[i1])};
}

double GammaSurface::eval_k20(double y, double z) const {
  return MonomialBasis2::total_degree(2).eval(kappa20, y, z);
}
double GammaSurface::eval_k21(double y, double z) const {
  return MonomialBasis2::total_degree(3).eval(kappa21, y, z);
}
double GammaSurface::eval(const Vec3& r) const {
  return eval_k20(r[1], r[2]) * r[0] + eval_k21(r[1], r[2]);
}
Vec3 GammaSurface::gradient(const Vec3& r) const {
  const double h = 1e-7 * (1.0 + r.cwiseAbs().maxCoeff());
  Vec3 g;
  g[0] = eval_k20(r[1], r[2]);
  g[1] = (eval(Vec3(r[0], r[1] + h, r[2])) - eval(Vec3(r[0], r[1] - h, r[2]))) / (2.0 * h);
  g[2] = (eval(Vec3(r[0], r[1], r[2] + h)) - eval(Vec3(r[0], r[1], r[2] - h))) / (2.0 * h);
  return g;
}

GammaSurface gamma_surface(const CameraRig& rig, const PlaneNormal& n) {
  GammaSurface gs;
  gs.normal = n;

  // the in-plane condition on the reflected ray, <d(r), n> = 0, is affine in x
  // once x^2 is replaced through the mirror equation: kappa20 x + kappa21
  auto ev20 = [&](double y, double z) {
    return n.n[0] * reflected_parts(rig.shape, rig.c, y, z).d1x;
  };
  auto ev21 = [&](double y, double z) {
    const ReflectedParts d = reflected_parts(rig.shape, rig.c, y, z);
    return n.n[1] * d.d2 + n.n[2] * d.d3;
  };
  const MonomialBasis2& b2 = MonomialBasis2::total_degree(2);
  const MonomialBasis2& b3 = MonomialBasis2::total_degree(3);
  gs.kappa20 = interpolate_coeffs(ev20, b2, interpolation_nodes(b2, kNodeScale));
  gs.kappa21 = interpolate_coeffs(ev21, b3, interpolation_nodes(b3, kNodeScale));

  const double scale =
      std::max({gs.kappa20.cwiseAbs().maxCoeff(), gs.kappa21.cwiseAbs().maxCoeff(), 1e-300});
  gs.kappa20 /= scale;
  gs.kappa21 /= scale;

  // construction certificate: vanishing points of sampled in-plane directions
  // must lie on Gamma
  const auto [s1, s2] = perpendicular_basis(n);
  int certified = 0;
  for (int k = 0; k < 24; ++k) {
    const double alpha = -1.0 + 3.0 * k / 23.0;
    const Vec3 sv = alpha * s1.s + (1.0 - alpha) * s2.s;
    if (sv.norm() < 1e-9) continue;
    VanishingPointSet vps;
    try {
      vps = vps_from_direction(rig, DirectionVector(sv));
    } catch (const std::exception&) {
      continue;
    }
    if (vps.degenerate_flag) continue;
    for (const MirrorPoint& p : vps.points) {
      if (std::abs(gs.eval(p.r)) > 1e-7 * poly_scale(p.r))
        throw DegeneratePlaneError("gamma surface failed its construction certificate");
      ++certified;
    }
  }
  if (certified == 0)
    throw DegeneratePlaneError("no non-degenerate in-plane direction produced vanishing points");
  return gs;
}

namespace {

bool correct_onto_curve(const CameraRig& rig, const GammaSurface& gs, Vec3& r,
                        double tol = 1e-12) {
  for (int it = 0; it < 20; ++it) {
    const double f0 = mirror_eval(rig.shape, r);
    const double f1 = gs.eval(r);
    const double s0 = MirrorPoint::surface_scale(rig.shape, r);
    const double s1 = poly_scale(r);
    if (std::abs(f0) < tol * s0 && std::abs(f1) < tol * s1) return true;
    Eigen::Matrix<double, 2, 3> J;
    J.row(0) = 2.0 * mirror_normal_raw(rig.shape, r).transpose();
    J.row(1) = gs.gradient(r).transpose();
    const Eigen::Vector2d F(f0, f1);
    const Eigen::Matrix2d JJt = J * J.transpose();
    if (std::abs(JJt.determinant()) < 1e-300) return false;
    const Vec3 step = -J.transpose() * JJt.ldlt().solve(F);
    if (!step.allFinite()) return false;
    r += step;
  }
  const double f0 = mirror_eval(rig.shape, r);
  const double f1 = gs.eval(r);
  return std::abs(f0) < 1e-9 * MirrorPoint::surface_scale(rig.shape, r) &&
         std::abs(f1) < 1e-9 * poly_scale(r);
}

Vec3 curve_tangent(const CameraRig& rig, const GammaSurface& gs, const Vec3& r) {
  return Vec3(2.0 * mirror_normal_raw(rig.shape, r)).cross(gs.gradient(r));
}

std::vector<Vec3> curve_seeds(const CameraRig& rig, const PlaneNormal& n) {
  const auto [s1, s2] = perpendicular_basis(n);
  std::vector<Vec3> seeds;
  for (int k = 0; k < 16; ++k) {
    const double alpha = -0.5 + 2.0 * k / 15.0;
    const Vec3 sv = alpha * s1.s + (1.0 - alpha) * s2.s;
    if (sv.norm() < 1e-9) continue;
    try {
      const VanishingPointSet vps = vps_from_direction(rig, DirectionVector(sv));
      if (vps.degenerate_flag) continue;
      for (const MirrorPoint& p : vps.points) seeds.push_back(p.r);
    } catch (const std::exception&) {
    }
  }
  return seeds;
}

// march one branch; returns samples excluding the start point
std::vector<Vec3> march(const CameraRig& rig, const GammaSurface& gs, const Vec3& start,
                        Vec3 dir, double arc_step, bool& closed) {
  std::vector<Vec3> out;
  closed = false;
  Vec3 r = start;
  Vec3 prev_t = dir;
  const int max_steps = 200000;
  double h = arc_step;
  const double wmargin = 1e-9 * std::max(1.0, rig.z_window.span());

  for (int step = 0; step < max_steps; ++step) {
    Vec3 t = curve_tangent(rig, gs, r);
    const double tn = t.norm();
    if (tn < 1e-14) break;
    t /= tn;
    if (t.dot(prev_t) < 0.0) t = -t;

    Vec3 rn = r + h * t;
    // exact x-lift from the Gamma row where it is well conditioned; otherwise the
    // 3D corrector alone handles the kappa20 -> 0 locus
    const double k20 = gs.eval_k20(rn[1], rn[2]);
    if (std::abs(k20) > 0.05) rn[0] = -gs.eval_k21(rn[1], rn[2]) / k20;

    if (!correct_onto_curve(rig, gs, rn) || (rn - r).norm() > 3.0 * h) {
      h *= 0.5;
      if (h < 1e-6 * arc_step) break;
      continue;
    }
    if (!rig.z_window.contains(rn[2], wmargin)) break;

    out.push_back(rn);
    prev_t = t;
    r = rn;
    h = std::min(arc_step, h * 1.6);

    if (step > 2 && (rn - start).norm() < 0.75 * arc_step) {
      closed = true;
      break;
    }
  }
  return out;
}

}  // namespace

VanishingCurve trace_vanishing_curve(const CameraRig& rig, const PlaneNormal& n,
                                     double arc_step) {
  if (!(arc_step > 0.0)) throw std::invalid_argument("arc_step must be positive");
  const GammaSurface gs = gamma_surface(rig, n);

  VanishingCurve curve;
  curve.normal = n;

  std::vector<Vec3> seeds = curve_seeds(rig, n);
  Vec3 start = Vec3::Zero();
  bool have_start = false;
  for (Vec3 s : seeds) {
    if (correct_onto_curve(rig, gs, s) && camera_facing(rig, s)) {
      start = s;
      have_start = true;
      break;
    }
  }
  if (!have_start) throw EmptyCurveError();

  Vec3 t0 = curve_tangent(rig, gs, start);
  if (t0.norm() < 1e-14) throw EmptyCurveError();
  t0.normalize();

  bool closed = false;
  std::vector<Vec3> fwd = march(rig, gs, start, t0, arc_step, closed);
  std::vector<Vec3> pts;
  pts.push_back(start);
  pts.insert(pts.end(), fwd.begin(), fwd.end());
  if (!closed) {
    bool closed_b = false;
    std::vector<Vec3> bwd = march(rig, gs, start, Vec3(-t0), arc_step, closed_b);
    std::reverse(bwd.begin(), bwd.end());
    pts.insert(pts.begin(), bwd.begin(), bwd.end());
  }
  curve.closed = closed;

  for (const Vec3& p : pts) curve.samples.push_back(MirrorPoint(p));
  if (curve.samples.empty()) throw EmptyCurveError();
  return curve;
}

bool on_curve(const CameraRig& rig, const PlaneNormal& n, const Vec3& r, double tol) {
  if (!r.allFinite()) return false;
  const GammaSurface gs = gamma_surface(rig, n);
  if (std::abs(mirror_eval(rig.shape, r)) >= tol) return false;
  if (std::abs(gs.eval(r)) >= tol) return false;
  const Vec3 nr = mirror_normal_raw(rig.shape, r);
  return nr.squaredNorm() > 0.0 && nr.dot(rig.c - r) > 0.0;
}

double distance_to_curve(const CameraRig& rig, const GammaSurface& gs,
                         const VanishingCurve& curve, const Vec3& p) {
  if (curve.samples.empty()) return std::numeric_limits<double>::infinity();
  double best = std::numeric_limits<double>::infinity();
  Vec3 q_best = curve.samples.front().r;
  const size_t n = curve.samples.size();
  const size_t nseg = curve.closed ? n : n - 1;
  for (size_t i = 0; i < std::max<size_t>(nseg, 1); ++i) {
    const Vec3& a = curve.samples[i].r;
    const Vec3& b = curve.samples[(i + 1) % n].r;
    const Vec3 ab = b - a;
    const double len2 = ab.squaredNorm();
    const double t = len2 > 0.0 ? std::min(1.0, std::max(0.0, ab.dot(p - a) / len2)) : 0.0;
    const Vec3 q = a + t * ab;
    const double d = (q - p).norm();
    if (d < best) {
      best = d;
      q_best = q;
    }
  }
  // sharpen by sliding the footpoint along the implicit curve toward p
  Vec3 r = q_best;
  for (int it = 0; it < 25; ++it) {
    if (!correct_onto_curve(rig, gs, r)) break;
    Vec3 t = curve_tangent(rig, gs, r);
    const double tn = t.norm();
    if (tn < 1e-14) break;
    t /= tn;
    const double slide = t.dot(p - r);
    if (std::abs(slide) < 1e-14) break;
    r += 0.9 * slide * t;
  }
  if (correct_onto_curve(rig, gs, r)) best = std::min(best, (p - r).norm());
  return best;
}

}  // namespace catavp
