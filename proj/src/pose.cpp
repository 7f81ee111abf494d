#include "catavp/pose.hpp"

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>

#include "catavp/projection.hpp"

namespace catavp {

namespace {

Mat3 kabsch(const std::vector<Vec3>& world, const std::vector<Vec3>& cam) {
  Mat3 M = Mat3::Zero();
  for (size_t i = 0; i < world.size(); ++i) M += cam[i] * world[i].transpose();
  Eigen::JacobiSVD<Mat3> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 D = Mat3::Identity();
  D(2, 2) = (svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0 ? -1.0 : 1.0;
  return svd.matrixU() * D * svd.matrixV().transpose();
}

double alignment_cost(const Mat3& R, const std::vector<Vec3>& world,
                      const std::vector<Vec3>& cam) {
  double c = 0.0;
  for (size_t i = 0; i < world.size(); ++i) c += (R * world[i] - cam[i]).squaredNorm();
  return c;
}

}  // namespace

Mat3 rotation_procrustes(const std::vector<DirectionCorrespondence>& corr) {
  const size_t n = corr.size();
  if (n < 2) throw std::invalid_argument("rotation needs at least 2 direction correspondences");

  bool any_nonparallel = false;
  for (size_t i = 1; i < n; ++i)
    if (angle_between_lines(corr[i].world_dir.s, corr[0].world_dir.s) > 1e-9)
      any_nonparallel = true;
  if (!any_nonparallel) throw AllParallelError();

  std::vector<Vec3> world(n);
  for (size_t i = 0; i < n; ++i) world[i] = corr[i].world_dir.s;

  auto augmented = [&](std::vector<Vec3> w, std::vector<Vec3> c) {
    if (w.size() == 2) {
      const Vec3 wx = w[0].cross(w[1]);
      const Vec3 cx = c[0].cross(c[1]);
      if (wx.norm() > 1e-12 && cx.norm() > 1e-12) {
        w.push_back(wx.normalized());
        c.push_back(cx.normalized());
      }
    }
    return std::make_pair(w, c);
  };

  Mat3 best_R = Mat3::Identity();
  double best_cost = std::numeric_limits<double>::infinity();

  if (n <= 4) {
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
      std::vector<Vec3> cam(n);
      for (size_t i = 0; i < n; ++i)
        cam[i] = (mask >> i & 1u) ? Vec3(-corr[i].cam_dir.s) : corr[i].cam_dir.s;
      auto [w, c] = augmented(world, cam);
      const Mat3 R = kabsch(w, c);
      const double cost = alignment_cost(R, w, c);
      if (cost < best_cost) {
        best_cost = cost;
        best_R = R;
      }
    }
  } else {
    // greedy: anchor the first sign, pick each remaining sign by consistency
    // with the running estimate, then one refinement sweep
    std::vector<Vec3> cam(n);
    cam[0] = corr[0].cam_dir.s;
    std::vector<Vec3> w2 = {world[0]}, c2 = {cam[0]};
    for (size_t i = 1; i < n; ++i) {
      Mat3 R = w2.size() >= 2 ? kabsch(w2, c2) : Mat3::Identity();
      const Vec3 pred = R * world[i];
      cam[i] = pred.dot(corr[i].cam_dir.s) >= 0.0 ? corr[i].cam_dir.s : Vec3(-corr[i].cam_dir.s);
      w2.push_back(world[i]);
      c2.push_back(cam[i]);
    }
    for (int sweep = 0; sweep < 2; ++sweep) {
      const Mat3 R = kabsch(world, cam);
      for (size_t i = 0; i < n; ++i) {
        const Vec3 pred = R * world[i];
        cam[i] = pred.dot(corr[i].cam_dir.s) >= 0.0 ? corr[i].cam_dir.s : Vec3(-corr[i].cam_dir.s);
      }
    }
    best_R = kabsch(world, cam);
  }
  return best_R;
}

std::pair<Vec3, double> epipolar_row(const Mat3& R, const PlueckerLine& world_line,
                                     const PlueckerLine& ray) {
  const Vec3 Rs = R * world_line.s;
  const Vec3 Rm = R * world_line.m;
  // <[t]x Rs, s> = <t, Rs x s>
  return {Rs.cross(ray.s), -(Rs.dot(ray.m) + Rm.dot(ray.s))};
}

Vec3 translation_from_lines(const Mat3& R, const std::vector<LineCorrespondence>& lines) {
  int rows = 0;
  for (const auto& l : lines) rows += static_cast<int>(l.measured_rays.size());
  if (rows < 3) throw RankDeficientError();

  Eigen::MatrixXd Amat(rows, 3);
  Eigen::VectorXd b(rows);
  int r = 0;
  for (const auto& l : lines)
    for (const auto& ray : l.measured_rays) {
      const auto [a, bi] = epipolar_row(R, l.world_line, ray);
      Amat.row(r) = a.transpose();
      b[r] = bi;
      ++r;
    }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(Amat, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv[2] < 1e-9 * sv[0]) throw RankDeficientError();
  return svd.solve(b);
}

Pose absolute_pose(const CameraRig& rig, const std::vector<VpObservation>& vps,
                   const std::vector<LinePixelObservation>& line_pixels) {
  std::vector<DirectionCorrespondence> corr;
  for (const auto& obs : vps) {
    const auto [sp, sm] = direction_from_vp(rig, obs.point);
    corr.push_back({sp, obs.world_dir});
  }
  Pose pose;
  pose.R = rotation_procrustes(corr);

  std::vector<LineCorrespondence> lines;
  for (const auto& lp : line_pixels) {
    LineCorrespondence lc;
    lc.world_line = lp.world_line;
    for (const Pixel& px : lp.pixels) lc.measured_rays.push_back(pixel_to_plucker(rig, px));
    lines.push_back(std::move(lc));
  }
  pose.t = translation_from_lines(pose.R, lines);
  return pose;
}

Mat3 relative_rotation(const CameraRig& rig,
                       const std::vector<std::pair<MirrorPoint, MirrorPoint>>& vp_matches) {
  std::vector<DirectionCorrespondence> corr;
  for (const auto& [r1, r2] : vp_matches) {
    const auto d1 = direction_from_vp(rig, r1);
    const auto d2 = direction_from_vp(rig, r2);
    // frame-1 direction plays the world role: R maps view 1 to view 2
    corr.push_back({d2.first, d1.first});
  }
  return rotation_procrustes(corr);
}

PlueckerLine triangulate_line(const CameraRig& rig, const std::vector<Pixel>& pixels) {
  if (pixels.size() < 2) throw std::invalid_argument("triangulate_line needs >= 2 pixels");
  std::vector<PlueckerLine> rays;
  for (const Pixel& px : pixels) rays.push_back(pixel_to_plucker(rig, px));

  // midpoints of the closest-approach segments of ray pairs
  std::vector<Vec3> pts;
  for (size_t i = 0; i < rays.size(); ++i)
    for (size_t j = i + 1; j < rays.size(); ++j) {
      const Vec3 &si = rays[i].s, &sj = rays[j].s;
      const Vec3 qi = rays[i].closest_point_to_origin();
      const Vec3 qj = rays[j].closest_point_to_origin();
      const double d = si.dot(sj);
      const double den = 1.0 - d * d;
      if (den < 1e-12) continue;
      const Vec3 dq = qj - qi;
      const double ti = (dq.dot(si) - d * dq.dot(sj)) / den;
      const double tj = (d * dq.dot(si) - dq.dot(sj)) / den;
      pts.push_back(0.5 * (qi + ti * si + qj + tj * sj));
    }
  if (pts.size() < 2) throw std::invalid_argument("triangulate_line: rays are near parallel");

  Vec3 mean = Vec3::Zero();
  for (const Vec3& p : pts) mean += p;
  mean /= static_cast<double>(pts.size());
  Mat3 cov = Mat3::Zero();
  for (const Vec3& p : pts) cov += (p - mean) * (p - mean).transpose();
  Eigen::SelfAdjointEigenSolver<Mat3> eig(cov);
  const Vec3 dir = eig.eigenvectors().col(2);
  return PlueckerLine::through_point(mean, dir);
}

namespace {

double line_fit_cost(const CameraRig& rig, const std::vector<Pixel>& pixels,
                     const PlueckerLine& line, const LineFitOptions& opts) {
  // pixels of sampled line points; cost = mean squared distance from each
  // measured pixel to the sampled projection polyline
  std::vector<Vec2> curve;
  ForwardOptions fo;
  fo.azimuth_starts = 8;
  fo.z_starts = 8;
  fo.snell_tol = 1e-9;
  const Vec3 q0 = line.closest_point_to_origin();
  for (int k = 0; k < opts.curve_samples; ++k) {
    const double t = -opts.lambda_span / 2.0 + opts.lambda_span * k / (opts.curve_samples - 1);
    try {
      for (const auto& sol : forward_project(rig, Vec3(q0 + t * line.s), fo))
        curve.emplace_back(sol.pixel.u, sol.pixel.v);
    } catch (const NoSolutionError&) {
    }
  }
  if (curve.size() < 2) return 1e12;

  double cost = 0.0;
  for (const Pixel& px : pixels) {
    double best = std::numeric_limits<double>::infinity();
    for (const Vec2& c : curve) best = std::min(best, (c - Vec2(px.u, px.v)).squaredNorm());
    cost += best;
  }
  return cost / static_cast<double>(pixels.size());
}

}  // namespace

LineFitResult fit_line_to_pixels(const CameraRig& rig, const std::vector<Pixel>& pixels,
                                 const PlueckerLine& init, const LineFitOptions& opts) {
  if (pixels.size() < 4)
    throw std::invalid_argument("fit_line_to_pixels needs at least 4 pixels");

  // 4 dof: two rotation angles of the direction, two moment components in the
  // plane normal to the direction
  auto assemble = [](const Eigen::Vector4d& p, const Mat3& frame0) {
    const Mat3 Rx = Eigen::AngleAxisd(p[0], frame0.col(0)).toRotationMatrix();
    const Mat3 Ry = Eigen::AngleAxisd(p[1], frame0.col(1)).toRotationMatrix();
    const Vec3 s = Ry * Rx * frame0.col(2);
    const Vec3 q = p[2] * frame0.col(0) + p[3] * frame0.col(1);
    return PlueckerLine::through_point(q, s);
  };

  Mat3 frame0;
  frame0.col(2) = init.s;
  Vec3 up = std::abs(init.s.dot(Vec3::UnitX())) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  frame0.col(0) = (up - init.s * init.s.dot(up)).normalized();
  frame0.col(1) = init.s.cross(frame0.col(0));

  const Vec3 q0 = init.closest_point_to_origin();
  Eigen::Vector4d param(0.0, 0.0, q0.dot(frame0.col(0)), q0.dot(frame0.col(1)));
  // the component of q0 along the initial direction is irrelevant (line dof)

  double cost = line_fit_cost(rig, pixels, assemble(param, frame0), opts);
  Eigen::Vector4d step(0.05, 0.05, 0.1, 0.1);

  LineFitResult result;
  for (int it = 0; it < opts.max_iterations; ++it) {
    bool improved = false;
    for (int k = 0; k < 4; ++k) {
      for (double sgn : {+1.0, -1.0}) {
        Eigen::Vector4d trial = param;
        trial[k] += sgn * step[k];
        const double c = line_fit_cost(rig, pixels, assemble(trial, frame0), opts);
        if (c < cost) {
          cost = c;
          param = trial;
          improved = true;
          break;
        }
      }
    }
    if (!improved) step *= 0.5;
    if (std::sqrt(cost) < opts.rms_threshold) break;
    if (step.maxCoeff() < 1e-10) break;
  }

  result.line = assemble(param, frame0);
  result.rms_pixels = std::sqrt(cost);
  result.converged = result.rms_pixels < opts.rms_threshold;
  return result;
}

}  // namespace catavp
