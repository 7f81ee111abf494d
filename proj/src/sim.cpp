#include "catavp/sim.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "catavp/projection.hpp"
#include "catavp/vanishing_point.hpp"

namespace catavp {

// ---- rng -------------------------------------------------------------------

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

Rng Rng::from_seed(std::uint64_t seed) {
  Rng r;
  r.state = seed;
  (void)r.next_u64();
  return r;
}

Rng Rng::counter(std::uint64_t seed, std::uint64_t level, std::uint64_t trial) {
  std::uint64_t x = seed;
  std::uint64_t a = splitmix64(x) ^ (0x632be59bd9b4e019ULL * (level + 1));
  std::uint64_t b = splitmix64(a) ^ (0x9e3779b97f4a7c15ULL * (trial + 1));
  return from_seed(splitmix64(b));
}

std::uint64_t Rng::next_u64() { return splitmix64(state); }

double Rng::uniform() { return (next_u64() >> 11) * 0x1.0p-53; }

double Rng::uniform(double a, double b) { return a + (b - a) * uniform(); }

double Rng::gaussian() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

Vec3 Rng::unit_vector() {
  const double z = uniform(-1.0, 1.0);
  const double phi = uniform(0.0, 2.0 * M_PI);
  const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
  return Vec3(rho * std::cos(phi), rho * std::sin(phi), z);
}

// ---- presets ---------------------------------------------------------------

std::vector<std::string> preset_names() {
  return {"spherical", "ellipsoidal", "hyperbolic", "central-hyperbolic"};
}

CameraRig preset_rig(const std::string& name) {
  const PinholeIntrinsics intr{600.0, 600.0, 512.0, 384.0};
  if (name == "spherical")
    return canonicalize_rig(MirrorShape{1.0, 0.0, 1.0}, Vec3(0.0, 0.2, 3.0), intr);
  if (name == "ellipsoidal")
    return canonicalize_rig(MirrorShape{0.5, 0.0, 1.0}, Vec3(0.0, 0.15, 2.6), intr);
  if (name == "hyperbolic")
    return canonicalize_rig(MirrorShape{-2.0, 2.0, -1.0}, Vec3(0.0, 0.1, -1.3), intr,
                            ZWindow{1.3660254037844386, 3.3660254037844386});
  if (name == "central-hyperbolic")
    return canonicalize_rig(MirrorShape{-2.0, 2.0, -1.0}, Vec3(0.0, 0.0, -1.0), intr,
                            ZWindow{1.3660254037844386, 3.3660254037844386});
  throw std::invalid_argument("unknown preset: " + name);
}

CameraRig rig_from_config(const ConfigFile& cfg) {
  const MirrorShape shape{cfg.get_double("mirror", "A"), cfg.get_double("mirror", "B"),
                          cfg.get_double("mirror", "C")};
  const Vec3 center(cfg.get_double("camera", "cx_world"), cfg.get_double("camera", "cy_world"),
                    cfg.get_double("camera", "cz_world"));
  const PinholeIntrinsics intr{cfg.get_double_or("camera", "fx", 600.0),
                               cfg.get_double_or("camera", "fy", 600.0),
                               cfg.get_double_or("camera", "cx", 512.0),
                               cfg.get_double_or("camera", "cy", 384.0)};
  std::optional<ZWindow> window;
  if (cfg.has("mirror", "z_lo") && cfg.has("mirror", "z_hi"))
    window = ZWindow{cfg.get_double("mirror", "z_lo"), cfg.get_double("mirror", "z_hi")};
  return canonicalize_rig(shape, center, intr, window);
}

// ---- scenes and noise ------------------------------------------------------

std::vector<PlueckerLine> gen_parallel_bundle(const DirectionVector& direction, int count,
                                              double spread, Rng& rng) {
  if (count < 1) throw std::invalid_argument("bundle needs count >= 1");
  std::vector<PlueckerLine> out;
  for (int i = 0; i < count; ++i) {
    const Vec3 q(rng.uniform(-spread, spread), rng.uniform(-spread, spread),
                 rng.uniform(-spread, spread));
    out.push_back(PlueckerLine::through_point(q, direction.s));
  }
  return out;
}

DirectionVector perturb_direction(const DirectionVector& s, double angle_deg, Rng& rng) {
  if (angle_deg < 0.0) throw std::invalid_argument("noise angle must be >= 0");
  if (angle_deg == 0.0) return s;
  const double angle = angle_deg * M_PI / 180.0 * rng.gaussian();
  // uniform axis in the plane perpendicular to s
  Vec3 u = std::abs(s.s.dot(Vec3::UnitX())) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  const Vec3 e1 = (u - s.s * s.s.dot(u)).normalized();
  const Vec3 e2 = s.s.cross(e1);
  const double phi = rng.uniform(0.0, 2.0 * M_PI);
  const Vec3 axis = std::cos(phi) * e1 + std::sin(phi) * e2;
  const Eigen::AngleAxisd rot(angle, axis);
  return DirectionVector(rot * s.s);
}

Vec3 perturb_point(const MirrorShape& shape, const Vec3& r, double sigma, Rng& rng) {
  if (sigma < 0.0) throw std::invalid_argument("sigma must be >= 0");
  Vec3 noisy = r;
  if (sigma > 0.0)
    noisy += sigma * Vec3(rng.gaussian(), rng.gaussian(), rng.gaussian());
  return nearest_surface_point(shape, noisy);
}

Pixel perturb_point(const Pixel& px, double sigma, Rng& rng) {
  if (sigma < 0.0) throw std::invalid_argument("sigma must be >= 0");
  if (sigma == 0.0) return px;
  return {px.u + sigma * rng.gaussian(), px.v + sigma * rng.gaussian()};
}

// ---- metrics ---------------------------------------------------------------

double metric_vp_distance(const Vec3& r_gt, const Vec3& r) { return (r_gt - r).norm(); }

double metric_vp_set_distance(const std::vector<MirrorPoint>& gt,
                              const std::vector<MirrorPoint>& est) {
  if (gt.empty() || est.empty()) return std::numeric_limits<double>::infinity();
  double acc = 0.0;
  for (const MirrorPoint& e : est) {
    double best = std::numeric_limits<double>::infinity();
    for (const MirrorPoint& g : gt) best = std::min(best, (e.r - g.r).norm());
    acc += best;
  }
  return acc / static_cast<double>(est.size());
}

double metric_rotation(const Mat3& R_gt, const Mat3& R) { return (R_gt - R).norm(); }

// ---- sweeps ----------------------------------------------------------------

Experiment experiment_from_name(const std::string& name) {
  if (name == "vp-from-dir") return Experiment::VpFromDir;
  if (name == "dir-from-vp") return Experiment::DirFromVp;
  if (name == "abs-rotation") return Experiment::AbsRotation;
  if (name == "abs-translation") return Experiment::AbsTranslation;
  if (name == "relative-rotation") return Experiment::RelativeRotation;
  throw std::invalid_argument("unknown experiment: " + name);
}

std::string experiment_name(Experiment e) {
  switch (e) {
    case Experiment::VpFromDir: return "vp-from-dir";
    case Experiment::DirFromVp: return "dir-from-vp";
    case Experiment::AbsRotation: return "abs-rotation";
    case Experiment::AbsTranslation: return "abs-translation";
    case Experiment::RelativeRotation: return "relative-rotation";
  }
  return "?";
}

SweepConfig sweep_config_from_file(const ConfigFile& cfg) {
  SweepConfig sc;
  if (cfg.has("mirror", "preset")) {
    sc.preset_name = cfg.get("mirror", "preset");
    sc.rig = preset_rig(sc.preset_name);
  } else {
    sc.rig = rig_from_config(cfg);
    sc.preset_name = "custom";
  }
  const std::string kind = cfg.get_or("noise", "kind", "pixel-gaussian");
  if (kind == "direction-angle")
    sc.kind = NoiseKind::DirectionAngleDeg;
  else if (kind == "pixel-gaussian")
    sc.kind = NoiseKind::PixelGaussian;
  else
    throw ConfigError("unknown noise kind: " + kind);
  sc.levels = cfg.get_double_list("noise", "levels");
  if (!std::is_sorted(sc.levels.begin(), sc.levels.end()))
    throw ConfigError("noise levels must be ascending");
  sc.trials = static_cast<int>(cfg.get_long_or("noise", "trials", 100));
  if (sc.trials < 1) throw ConfigError("trials must be >= 1");
  sc.seed = static_cast<std::uint64_t>(cfg.get_long_or("noise", "seed", 1));
  return sc;
}

namespace {

// a direction whose vanishing points are computable and non-degenerate on this rig
DirectionVector draw_direction(const CameraRig& rig, Rng& rng, VanishingPointSet* out_vps) {
  for (int attempt = 0; attempt < 64; ++attempt) {
    const Vec3 v = rng.unit_vector();
    if (std::hypot(v[0], v[1]) < 0.05) continue;      // away from the axial continuum
    if (std::hypot(v[1], v[2]) < 0.05) continue;      // away from the x-axis special row
    DirectionVector s(v);
    try {
      VanishingPointSet vps = vps_from_direction(rig, s);
      if (vps.degenerate_flag || vps.points.empty()) continue;
      if (out_vps) *out_vps = std::move(vps);
      return s;
    } catch (const std::exception&) {
    }
  }
  throw std::runtime_error("could not draw a usable direction for this rig");
}

Mat3 random_rotation(Rng& rng) {
  const Vec3 axis = rng.unit_vector();
  const double angle = rng.uniform(0.0, M_PI);
  return Eigen::AngleAxisd(angle, axis).toRotationMatrix();
}

// backproject a (possibly noisy) vanishing-point pixel to the mirror surface
MirrorPoint vp_from_pixel(const CameraRig& rig, const Pixel& px) {
  return MirrorPoint(nearest_surface_point(rig.shape, intersect_pixel_ray(rig, px)));
}

double trial_vp_from_dir(const CameraRig& rig, double level, Rng& rng) {
  VanishingPointSet gt;
  const DirectionVector s = draw_direction(rig, rng, &gt);
  const DirectionVector s_noisy = perturb_direction(s, level, rng);
  const VanishingPointSet est = vps_from_direction(rig, s_noisy);
  if (est.degenerate_flag || est.points.empty())
    throw std::runtime_error("noisy direction lost its vanishing points");
  return metric_vp_set_distance(gt.points, est.points);
}

double trial_dir_from_vp(const CameraRig& rig, double level, Rng& rng) {
  VanishingPointSet gt;
  const DirectionVector s = draw_direction(rig, rng, &gt);
  const Pixel noisy = perturb_point(gt.pixels.front(), level, rng);
  const MirrorPoint r = vp_from_pixel(rig, noisy);
  const auto [sp, sm] = direction_from_vp(rig, r);
  return angle_between_lines(sp.s, s.s) * 180.0 / M_PI;
}

struct RotationTrial {
  Mat3 R_gt;
  Mat3 R;
  std::vector<DirectionVector> world_dirs;
};

RotationTrial run_rotation_trial(const CameraRig& rig, double level, Rng& rng, int ndirs) {
  RotationTrial t;
  t.R_gt = random_rotation(rng);
  std::vector<DirectionCorrespondence> corr;
  int guard = 0;
  while (static_cast<int>(corr.size()) < ndirs) {
    if (++guard > 64) throw std::runtime_error("rotation trial: no usable directions");
    const Vec3 w = rng.unit_vector();
    bool distinct = true;
    for (const auto& c : corr)
      if (angle_between_lines(c.world_dir.s, w) < 0.2) distinct = false;
    if (!distinct) continue;
    const Vec3 cam = t.R_gt * w;
    if (std::hypot(cam[0], cam[1]) < 0.05 || std::hypot(cam[1], cam[2]) < 0.05) continue;
    try {
      const VanishingPointSet vps = vps_from_direction(rig, DirectionVector(cam));
      if (vps.degenerate_flag || vps.points.empty()) continue;
      const Pixel noisy = perturb_point(vps.pixels.front(), level, rng);
      const MirrorPoint r = vp_from_pixel(rig, noisy);
      const auto [sp, sm] = direction_from_vp(rig, r);
      corr.push_back({sp, DirectionVector(w)});
      t.world_dirs.push_back(DirectionVector(w));
    } catch (const std::exception&) {
    }
  }
  t.R = rotation_procrustes(corr);
  return t;
}

double trial_abs_rotation(const CameraRig& rig, double level, Rng& rng) {
  const RotationTrial t = run_rotation_trial(rig, level, rng, 3);
  return metric_rotation(t.R_gt, t.R);
}

double trial_abs_translation(const CameraRig& rig, double level, Rng& rng) {
  const RotationTrial rot = run_rotation_trial(rig, level, rng, 3);
  const Vec3 t_gt(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5));

  // two lines placed in the camera frame where the mirror sees them, then
  // mapped back to the world through the ground-truth pose
  ForwardOptions fo;
  fo.azimuth_starts = 10;
  fo.z_starts = 10;
  std::vector<LineCorrespondence> lines;
  int guard = 0;
  while (lines.size() < 2) {
    if (++guard > 32) throw std::runtime_error("translation trial: no visible lines");
    const Vec3 dir_c = rng.unit_vector();
    const Vec3 q_c = rig.view_target + 1.0 * rng.unit_vector() +
                     Vec3(0.0, 0.0, rng.uniform(0.3, 0.9));
    LineCorrespondence lc;
    const Vec3 s_w = rot.R_gt.transpose() * dir_c;
    const Vec3 q_w = rot.R_gt.transpose() * (q_c - t_gt);
    lc.world_line = PlueckerLine::through_point(q_w, s_w);
    bool ok = true;
    for (int k = 0; k < 6 && ok; ++k) {
      const Vec3 p = q_c + (-2.5 + k) * 1.0 * dir_c;
      try {
        const auto sols = forward_project(rig, p, fo);
        const Pixel noisy = perturb_point(sols.front().pixel, level, rng);
        lc.measured_rays.push_back(pixel_to_plucker(rig, noisy));
      } catch (const std::exception&) {
        ok = false;
      }
    }
    if (ok) lines.push_back(std::move(lc));
  }
  const Vec3 t_est = translation_from_lines(rot.R, lines);
  return (t_est - t_gt).norm();
}

double trial_relative_rotation(const CameraRig& rig, double level, Rng& rng) {
  const Mat3 R_rel = random_rotation(rng);
  std::vector<std::pair<MirrorPoint, MirrorPoint>> matches;
  int guard = 0;
  while (matches.size() < 3) {
    if (++guard > 64) throw std::runtime_error("relative trial: no usable matches");
    const Vec3 d1 = rng.unit_vector();
    const Vec3 d2 = R_rel * d1;
    if (std::hypot(d1[0], d1[1]) < 0.05 || std::hypot(d1[1], d1[2]) < 0.05) continue;
    if (std::hypot(d2[0], d2[1]) < 0.05 || std::hypot(d2[1], d2[2]) < 0.05) continue;
    try {
      const VanishingPointSet v1 = vps_from_direction(rig, DirectionVector(d1));
      const VanishingPointSet v2 = vps_from_direction(rig, DirectionVector(d2));
      if (v1.degenerate_flag || v1.points.empty()) continue;
      if (v2.degenerate_flag || v2.points.empty()) continue;
      const MirrorPoint r1 = vp_from_pixel(rig, perturb_point(v1.pixels.front(), level, rng));
      const MirrorPoint r2 = vp_from_pixel(rig, perturb_point(v2.pixels.front(), level, rng));
      matches.emplace_back(r1, r2);
    } catch (const std::exception&) {
    }
  }
  return metric_rotation(R_rel, relative_rotation(rig, matches));
}

SweepRow summarize(double level, std::vector<double>& errs, int failures) {
  SweepRow row;
  row.noise_level = level;
  row.failures = failures;
  if (errs.empty()) return row;
  std::sort(errs.begin(), errs.end());
  auto quantile = [&](double q) {
    const double pos = q * (errs.size() - 1);
    const size_t i = static_cast<size_t>(pos);
    const double frac = pos - i;
    return i + 1 < errs.size() ? errs[i] * (1.0 - frac) + errs[i + 1] * frac : errs[i];
  };
  row.median = quantile(0.5);
  row.q25 = quantile(0.25);
  row.q75 = quantile(0.75);
  row.mean = std::accumulate(errs.begin(), errs.end(), 0.0) / errs.size();
  return row;
}

}  // namespace

SweepResult run_sweep(const SweepConfig& config, Experiment experiment) {
  SweepResult result;
  result.experiment = experiment;
  result.preset_name = config.preset_name;

  for (size_t li = 0; li < config.levels.size(); ++li) {
    const double level = config.levels[li];
    std::vector<double> errs;
    int failures = 0;
    for (int trial = 0; trial < config.trials; ++trial) {
      Rng rng = Rng::counter(config.seed, li, trial);
      try {
        double e = 0.0;
        switch (experiment) {
          case Experiment::VpFromDir: e = trial_vp_from_dir(config.rig, level, rng); break;
          case Experiment::DirFromVp: e = trial_dir_from_vp(config.rig, level, rng); break;
          case Experiment::AbsRotation: e = trial_abs_rotation(config.rig, level, rng); break;
          case Experiment::AbsTranslation:
            e = trial_abs_translation(config.rig, level, rng);
            break;
          case Experiment::RelativeRotation:
            e = trial_relative_rotation(config.rig, level, rng);
            break;
        }
        if (!std::isfinite(e)) throw std::runtime_error("non-finite error");
        errs.push_back(e);
      } catch (const std::exception&) {
        ++failures;
      }
    }
    result.rows.push_back(summarize(level, errs, failures));
  }
  return result;
}

// ---- outputs ---------------------------------------------------------------

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace

std::string sweep_csv(const SweepResult& result) {
  std::string out = "noise_level,median,mean,q25,q75,failures\n";
  for (const SweepRow& r : result.rows) {
    out += fmt(r.noise_level) + "," + fmt(r.median) + "," + fmt(r.mean) + "," + fmt(r.q25) +
           "," + fmt(r.q75) + "," + std::to_string(r.failures) + "\n";
  }
  return out;
}

void emit_csv(const SweepResult& result, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << sweep_csv(result);
}

void emit_svg(const std::vector<SweepResult>& results, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);

  const double W = 720.0, H = 480.0, ml = 70.0, mr = 20.0, mt = 20.0, mb = 50.0;
  double xmax = 1e-12, ymax = 1e-12;
  for (const auto& res : results)
    for (const auto& r : res.rows) {
      xmax = std::max(xmax, r.noise_level);
      ymax = std::max(ymax, r.median);
    }
  auto X = [&](double x) { return ml + (W - ml - mr) * (xmax > 0 ? x / xmax : 0.0); };
  auto Y = [&](double y) { return H - mb - (H - mt - mb) * (ymax > 0 ? y / ymax : 0.0); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b"};

  f << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  f << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(W) << "\" height=\""
    << fmt(H) << "\" viewBox=\"0 0 " << fmt(W) << " " << fmt(H) << "\">\n";
  f << "<rect x=\"0\" y=\"0\" width=\"" << fmt(W) << "\" height=\"" << fmt(H)
    << "\" fill=\"white\"/>\n";
  f << "<line x1=\"" << fmt(ml) << "\" y1=\"" << fmt(H - mb) << "\" x2=\"" << fmt(W - mr)
    << "\" y2=\"" << fmt(H - mb) << "\" stroke=\"black\"/>\n";
  f << "<line x1=\"" << fmt(ml) << "\" y1=\"" << fmt(mt) << "\" x2=\"" << fmt(ml) << "\" y2=\""
    << fmt(H - mb) << "\" stroke=\"black\"/>\n";
  f << "<text x=\"" << fmt(0.5 * W) << "\" y=\"" << fmt(H - 12.0)
    << "\" text-anchor=\"middle\" font-size=\"14\">noise level</text>\n";
  f << "<text x=\"16\" y=\"" << fmt(0.5 * H)
    << "\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 16 " << fmt(0.5 * H)
    << ")\">median error</text>\n";

  int idx = 0;
  for (const auto& res : results) {
    const char* color = colors[idx % 5];
    f << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (const auto& r : res.rows) f << fmt(X(r.noise_level)) << "," << fmt(Y(r.median)) << " ";
    f << "\"/>\n";
    for (const auto& r : res.rows)
      f << "<circle cx=\"" << fmt(X(r.noise_level)) << "\" cy=\"" << fmt(Y(r.median))
        << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    f << "<text x=\"" << fmt(W - mr - 180.0) << "\" y=\"" << fmt(mt + 18.0 * (idx + 1))
      << "\" font-size=\"13\" fill=\"" << color << "\">" << res.preset_name << " ("
      << experiment_name(res.experiment) << ")</text>\n";
    ++idx;
  }
  f << "</svg>\n";
}

void emit_outputs(const SweepResult& result, const std::string& csv_path,
                  const std::string& svg_path) {
  emit_csv(result, csv_path);
  emit_svg({result}, svg_path);
}

double linear_fit_r2(const std::vector<double>& x, const std::vector<double>& y) {
  const size_t n = std::min(x.size(), y.size());
  if (n < 2) return 0.0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double den = n * sxx - sx * sx;
  if (std::abs(den) < 1e-300) return 0.0;
  const double slope = (n * sxy - sx * sy) / den;
  const double icept = (sy - slope * sx) / n;
  double ss_res = 0, ss_tot = 0;
  const double ybar = sy / n;
  for (size_t i = 0; i < n; ++i) {
    const double fit = slope * x[i] + icept;
    ss_res += (y[i] - fit) * (y[i] - fit);
    ss_tot += (y[i] - ybar) * (y[i] - ybar);
  }
  if (ss_tot < 1e-300) return 1.0;
  return 1.0 - ss_res / ss_tot;
}

// ---- synthetic pose scenes -------------------------------------------------

PoseScene make_chessboard_scene(const CameraRig& rig, const Pose& gt, int pixels_per_line,
                                Rng& rng) {
  PoseScene scene;
  scene.gt_pose = gt;

  // board axes in the world; their camera-frame images give the vanishing points
  const Vec3 world_dirs[3] = {Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitZ()};
  for (const Vec3& w : world_dirs) {
    const Vec3 cam = gt.R * w;
    if (std::hypot(cam[0], cam[1]) < 0.05 || std::hypot(cam[1], cam[2]) < 0.05) continue;
    const VanishingPointSet vps = vps_from_direction(rig, DirectionVector(cam));
    if (vps.degenerate_flag || vps.points.empty()) continue;
    scene.vps.push_back({vps.points.front(), DirectionVector(w)});
  }

  ForwardOptions fo;
  fo.azimuth_starts = 12;
  fo.z_starts = 12;
  int guard = 0;
  while (scene.line_pixels.size() < 2) {
    if (++guard > 40) break;
    const Vec3 dir_c = rng.unit_vector();
    const Vec3 q_c = rig.view_target + 1.8 * rng.unit_vector() + Vec3(0.0, 0.0, 1.0);
    LinePixelObservation obs;
    obs.world_line = PlueckerLine::through_point(gt.R.transpose() * (q_c - gt.t),
                                                 gt.R.transpose() * dir_c);
    bool ok = true;
    for (int k = 0; k < pixels_per_line && ok; ++k) {
      const double lam = -1.5 + 3.0 * k / std::max(1, pixels_per_line - 1);
      try {
        obs.pixels.push_back(forward_project(rig, Vec3(q_c + lam * dir_c), fo).front().pixel);
      } catch (const std::exception&) {
        ok = false;
      }
    }
    if (ok && obs.pixels.size() >= 2) scene.line_pixels.push_back(std::move(obs));
  }
  return scene;
}

}  // namespace catavp
