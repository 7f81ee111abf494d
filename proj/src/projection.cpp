#include "catavp/projection.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace catavp {

namespace {

struct Chart {
  const MirrorShape& shape;
  const ZWindow& w;

  double rho(double z) const { return std::sqrt(std::max(0.0, shape.radius_sq(z))); }

  Vec3 point(double theta, double z) const {
    const double r = rho(z);
    return Vec3(r * std::cos(theta), r * std::sin(theta), z);
  }

  double clamp_z(double z, double inset = 0.0) const {
    return std::min(w.hi - inset, std::max(w.lo + inset, z));
  }
};

// normalized Snell residual: d(r) x (p - r) scaled to unit factors
Vec3 snell_residual(const CameraRig& rig, const Vec3& r, const Vec3& p) {
  const Vec3 n = mirror_normal_raw(rig.shape, r);
  if (n.squaredNorm() == 0.0) return Vec3::Constant(1.0);
  const Vec3 d = reflect_direction(n, Vec3(r - rig.c));
  Vec3 to_p = p - r;
  const double tn = to_p.norm();
  if (tn < 1e-300) return Vec3::Zero();  // p on the mirror at r: degenerate but consistent
  return d.cross(to_p / tn);
}

double path_length(const CameraRig& rig, const Vec3& r, const Vec3& p) {
  return (r - rig.c).norm() + (r - p).norm();
}

}  // namespace

Vec3 nearest_surface_point(const MirrorShape& shape, const Vec3& p, int max_iter) {
  Vec3 r = p;
  for (int it = 0; it < max_iter; ++it) {
    const double f = mirror_eval(shape, r);
    const Vec3 g = 2.0 * mirror_normal_raw(shape, r);
    const double g2 = g.squaredNorm();
    if (g2 < 1e-300) break;
    r -= g * (f / g2);
    if (std::abs(f) < 1e-14 * MirrorPoint::surface_scale(shape, r)) break;
  }
  return r;
}

std::vector<ForwardSolution> forward_project(const CameraRig& rig, const Vec3& p,
                                             const ForwardOptions& opts) {
  if (!p.allFinite()) throw std::invalid_argument("forward_project: non-finite point");
  const Chart chart{rig.shape, rig.z_window};
  const double span = rig.z_window.span();
  const double inset = 1e-6 * span;

  const double scale = std::max({1.0, rig.c.norm(), std::sqrt(std::abs(rig.shape.C))});

  std::vector<Vec3> found;

  auto try_start = [&](double theta0, double z0) {
    double theta = theta0, z = chart.clamp_z(z0, inset);

    // a few damped descent steps on the Fermat length to land in a basin
    double h_th = 0.15, h_z = 0.05 * span;
    for (int it = 0; it < 12; ++it) {
      const double f0 = path_length(rig, chart.point(theta, z), p);
      double best = f0, bt = theta, bz = z;
      for (int dth = -1; dth <= 1; ++dth)
        for (int dz = -1; dz <= 1; ++dz) {
          if (!dth && !dz) continue;
          const double t2 = theta + dth * h_th;
          const double z2 = chart.clamp_z(z + dz * h_z, inset);
          const double f2 = path_length(rig, chart.point(t2, z2), p);
          if (f2 < best) {
            best = f2;
            bt = t2;
            bz = z2;
          }
        }
      if (best >= f0) {
        h_th *= 0.5;
        h_z *= 0.5;
      } else {
        theta = bt;
        z = bz;
      }
    }

    // Gauss-Newton on the Snell residual (2 unknowns, 3 residuals)
    for (int it = 0; it < opts.max_iterations; ++it) {
      const Vec3 r = chart.point(theta, z);
      const Vec3 f = snell_residual(rig, r, p);
      if (f.norm() < opts.snell_tol) break;
      const double eth = 1e-7;
      const double ez = 1e-7 * std::max(1.0, std::abs(z));
      const Vec3 fth = snell_residual(rig, chart.point(theta + eth, z), p);
      const Vec3 fz = snell_residual(rig, chart.point(theta, chart.clamp_z(z + ez, inset)), p);
      Eigen::Matrix<double, 3, 2> J;
      J.col(0) = (fth - f) / eth;
      J.col(1) = (fz - f) / ez;
      const Eigen::Vector2d step =
          J.colPivHouseholderQr().solve(Eigen::Vector3d(-f));
      if (!step.allFinite()) return;
      double damp = 1.0;
      double fn = f.norm();
      for (int ls = 0; ls < 6; ++ls) {
        const double t2 = theta + damp * step[0];
        const double z2 = chart.clamp_z(z + damp * step[1], inset);
        if (snell_residual(rig, chart.point(t2, z2), p).norm() < fn) {
          theta = t2;
          z = z2;
          break;
        }
        damp *= 0.5;
        if (ls == 5) return;  // stuck
      }
      if (step.norm() * damp < 1e-15) break;
    }

    const Vec3 r = chart.point(theta, z);
    if (snell_residual(rig, r, p).norm() > opts.snell_tol) return;
    if (!camera_facing(rig, r)) return;
    // reflected ray must run toward p, not away from it
    const Vec3 d = scene_direction_at(rig.shape, rig.c, r);
    if ((p - r).norm() > 1e-12 * scale && d.dot(p - r) <= 0.0) return;
    for (const Vec3& q : found)
      if ((q - r).norm() < 1e-7 * scale) return;
    found.push_back(r);
  };

  for (int i = 0; i < opts.azimuth_starts; ++i)
    for (int j = 0; j < opts.z_starts; ++j)
      try_start(2.0 * M_PI * i / opts.azimuth_starts,
                rig.z_window.lo + span * (j + 0.5) / opts.z_starts);

  std::vector<ForwardSolution> out;
  for (const Vec3& r : found) {
    try {
      out.push_back({MirrorPoint(r), project_to_pixel(rig, r)});
    } catch (const BehindCameraError&) {
    }
  }
  if (out.empty()) throw NoSolutionError();
  std::sort(out.begin(), out.end(), [](const ForwardSolution& a, const ForwardSolution& b) {
    return std::make_tuple(a.point.r[2], a.point.r[1], a.point.r[0]) <
           std::make_tuple(b.point.r[2], b.point.r[1], b.point.r[0]);
  });
  return out;
}

Vec3 intersect_pixel_ray(const CameraRig& rig, const Pixel& px) {
  const Vec3 v = pixel_ray_direction(rig, px);
  const Vec3& c = rig.c;
  const double A = rig.shape.A, B = rig.shape.B;
  const double qa = v[0] * v[0] + v[1] * v[1] + A * v[2] * v[2];
  const double qb = 2.0 * (c[0] * v[0] + c[1] * v[1] + A * c[2] * v[2]) + B * v[2];
  const double qc = mirror_eval(rig.shape, c);

  std::vector<double> ts;
  if (std::abs(qa) < 1e-14 * (std::abs(qb) + std::abs(qc) + 1.0)) {
    if (std::abs(qb) > 0.0) ts.push_back(-qc / qb);
  } else {
    const double disc = qb * qb - 4.0 * qa * qc;
    if (disc >= 0.0) {
      const double sq = std::sqrt(disc);
      ts.push_back((-qb - sq) / (2.0 * qa));
      ts.push_back((-qb + sq) / (2.0 * qa));
    }
  }

  double best_t = std::numeric_limits<double>::infinity();
  for (double t : ts) {
    if (t <= 1e-12) continue;
    const Vec3 r = c + t * v;
    if (!rig.z_window.contains(r[2], 1e-9 * std::max(1.0, rig.z_window.span()))) continue;
    if (!camera_facing(rig, r)) continue;
    best_t = std::min(best_t, t);
  }
  if (!std::isfinite(best_t)) throw RayMissesMirrorError();
  return c + best_t * v;
}

PlueckerLine pixel_to_plucker(const CameraRig& rig, const Pixel& px) {
  const Vec3 r = intersect_pixel_ray(rig, px);
  const Vec3 s = scene_direction_at(rig.shape, rig.c, r);
  return PlueckerLine::through_point(r, s);
}

}  // namespace catavp
