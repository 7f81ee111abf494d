// Command-line front end: vanishing points, directions, curves, pose, and
// experiment sweeps for quadric-mirror catadioptric rigs.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>

#include "catavp/config.hpp"
#include "catavp/pose.hpp"
#include "catavp/projection.hpp"
#include "catavp/sim.hpp"
#include "catavp/vanishing_curve.hpp"
#include "catavp/vanishing_point.hpp"

namespace {

using namespace catavp;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

Vec3 parse_vec3(const std::string& text) {
  std::string t = text;
  for (char& c : t)
    if (c == ',') c = ' ';
  std::istringstream in(t);
  Vec3 v;
  if (!(in >> v[0] >> v[1] >> v[2])) throw std::invalid_argument("expected x,y,z: " + text);
  return v;
}

CameraRig rig_from_arg(const std::string& arg) {
  for (const std::string& name : preset_names())
    if (arg == name) return preset_rig(arg);
  return rig_from_config(ConfigFile::load(arg));
}

void print_point(const MirrorPoint& p, const Pixel& px) {
  std::printf("point % .12g % .12g % .12g  pixel % .6f % .6f\n", p.r[0], p.r[1], p.r[2], px.u,
              px.v);
}

int cmd_vp(const std::string& rig_arg, const std::string& dir_arg) {
  const CameraRig rig = rig_from_arg(rig_arg);
  const VanishingPointSet vps = vps_from_direction(rig, DirectionVector(parse_vec3(dir_arg)));
  if (vps.degenerate_flag)
    std::printf("degenerate direction: continuum of vanishing points; representative:\n");
  for (size_t i = 0; i < vps.points.size(); ++i) print_point(vps.points[i], vps.pixels[i]);
  if (vps.points.empty()) {
    std::printf("no vanishing points on the camera-facing surface\n");
    return kExitNumerical;
  }
  return kExitOk;
}

int cmd_direction(const std::string& rig_arg, const std::string& point_arg) {
  const CameraRig rig = rig_from_arg(rig_arg);
  const MirrorPoint r = MirrorPoint::checked(rig.shape, parse_vec3(point_arg), 1e-6);
  const auto [sp, sm] = direction_from_vp(rig, r);
  std::printf("direction % .15g % .15g % .15g\n", sp.s[0], sp.s[1], sp.s[2]);
  std::printf("direction % .15g % .15g % .15g\n", sm.s[0], sm.s[1], sm.s[2]);
  return kExitOk;
}

int cmd_curve(const std::string& rig_arg, const std::string& normal_arg, double step,
              const std::string& out) {
  const CameraRig rig = rig_from_arg(rig_arg);
  const VanishingCurve curve =
      trace_vanishing_curve(rig, PlaneNormal(parse_vec3(normal_arg)), step);
  std::FILE* f = out.empty() ? stdout : std::fopen(out.c_str(), "w");
  if (!f) throw std::runtime_error("cannot open " + out);
  std::fprintf(f, "# x y z u v   (%s, %zu samples)\n", curve.closed ? "closed" : "open",
               curve.samples.size());
  for (const MirrorPoint& p : curve.samples) {
    Pixel px{0, 0};
    try {
      px = project_to_pixel(rig, p);
    } catch (const BehindCameraError&) {
    }
    std::fprintf(f, "% .12g % .12g % .12g % .6f % .6f\n", p.r[0], p.r[1], p.r[2], px.u, px.v);
  }
  if (f != stdout) std::fclose(f);
  return kExitOk;
}

int cmd_pose(const std::string& scene_path) {
  const ConfigFile cfg = ConfigFile::load(scene_path);
  const CameraRig rig = rig_from_config(cfg);

  std::vector<VpObservation> vps;
  for (int i = 1;; ++i) {
    const std::string sec = "vp" + std::to_string(i);
    if (!cfg.has(sec, "point")) break;
    VpObservation obs;
    const auto pt = cfg.get_double_list(sec, "point");
    const auto dir = cfg.get_double_list(sec, "world_dir");
    if (pt.size() != 3 || dir.size() != 3)
      throw ConfigError(sec + ": point and world_dir need 3 numbers");
    obs.point = MirrorPoint::checked(rig.shape, Vec3(pt[0], pt[1], pt[2]), 1e-6);
    obs.world_dir = DirectionVector(Vec3(dir[0], dir[1], dir[2]));
    vps.push_back(obs);
  }

  std::vector<LinePixelObservation> lines;
  for (int i = 1;; ++i) {
    const std::string sec = "line" + std::to_string(i);
    if (!cfg.has(sec, "direction")) break;
    LinePixelObservation obs;
    const auto d = cfg.get_double_list(sec, "direction");
    const auto q = cfg.get_double_list(sec, "point");
    const auto px = cfg.get_double_list(sec, "pixels");
    if (d.size() != 3 || q.size() != 3 || px.size() < 2 || px.size() % 2)
      throw ConfigError(sec + ": need direction, point, and u v pixel pairs");
    obs.world_line = PlueckerLine::through_point(Vec3(q[0], q[1], q[2]), Vec3(d[0], d[1], d[2]));
    for (size_t k = 0; k + 1 < px.size(); k += 2) obs.pixels.push_back({px[k], px[k + 1]});
    lines.push_back(obs);
  }

  if (vps.size() < 2) throw ConfigError("scene needs at least two [vpN] sections");
  const Pose pose = absolute_pose(rig, vps, lines);
  std::printf("R\n");
  for (int r = 0; r < 3; ++r)
    std::printf("  % .15g % .15g % .15g\n", pose.R(r, 0), pose.R(r, 1), pose.R(r, 2));
  std::printf("t  % .15g % .15g % .15g\n", pose.t[0], pose.t[1], pose.t[2]);
  return kExitOk;
}

int cmd_sweep(const std::string& experiment, const std::string& config_path,
              const std::string& csv_path, const std::string& svg_path) {
  const SweepConfig sc = sweep_config_from_file(ConfigFile::load(config_path));
  const SweepResult result = run_sweep(sc, experiment_from_name(experiment));
  emit_outputs(result, csv_path, svg_path);
  std::printf("wrote %s and %s\n", csv_path.c_str(), svg_path.c_str());
  int failures = 0;
  for (const auto& row : result.rows) failures += row.failures;
  std::printf("levels %zu, trials/level %d, total failed trials %d\n", result.rows.size(),
              sc.trials, failures);
  return kExitOk;
}

int cmd_oracle_check(int trials, std::uint64_t seed) {
  int checked = 0;
  double worst = 0.0;
  Rng rng = Rng::from_seed(seed);
  const auto presets = preset_names();
  while (checked < trials) {
    const CameraRig rig = preset_rig(presets[rng.next_u64() % presets.size()]);
    const Vec3 v = rng.unit_vector();
    if (std::hypot(v[0], v[1]) < 0.05 || std::hypot(v[1], v[2]) < 0.05) continue;
    const DirectionVector s(v);
    VanishingPointSet vps;
    try {
      vps = vps_from_direction(rig, s);
    } catch (const std::exception&) {
      continue;
    }
    if (vps.degenerate_flag || vps.points.empty()) continue;
    const std::vector<MirrorPoint> oracle = vp_oracle(rig, s);
    if (oracle.empty()) continue;
    double hausdorff = 0.0;
    for (const MirrorPoint& p : vps.points) {
      double best = 1e300;
      for (const MirrorPoint& q : oracle) best = std::min(best, (p.r - q.r).norm());
      hausdorff = std::max(hausdorff, best);
    }
    for (const MirrorPoint& q : oracle) {
      double best = 1e300;
      for (const MirrorPoint& p : vps.points) best = std::min(best, (p.r - q.r).norm());
      hausdorff = std::max(hausdorff, best);
    }
    worst = std::max(worst, hausdorff);
    ++checked;
  }
  std::printf("oracle agreement on %d instances: worst Hausdorff %.3e\n", checked, worst);
  if (worst > 1e-6) {
    std::printf("FAIL: exceeds 1e-6\n");
    return kExitNumerical;
  }
  std::printf("PASS\n");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vanishing points and curves for quadric-mirror catadioptric cameras"};
  app.require_subcommand(1);

  std::string rig_arg = "spherical", dir_arg, point_arg, normal_arg;
  std::string config_path, scene_path, experiment;
  std::string out_path, csv_path = "sweep.csv", svg_path = "sweep.svg";
  double step = 0.02;
  int trials = 50;
  std::uint64_t seed = 1;

  auto* vp = app.add_subcommand("vp", "vanishing points of a 3D direction");
  vp->add_option("--dir", dir_arg, "direction x,y,z")->required();
  vp->add_option("--rig", rig_arg, "preset name or config file");

  auto* direction = app.add_subcommand("direction", "directions generating a vanishing point");
  direction->add_option("--point", point_arg, "mirror point x,y,z")->required();
  direction->add_option("--rig", rig_arg, "preset name or config file");

  auto* curve = app.add_subcommand("curve", "trace the vanishing curve of a plane normal");
  curve->add_option("--normal", normal_arg, "plane normal x,y,z")->required();
  curve->add_option("--rig", rig_arg, "preset name or config file");
  curve->add_option("--step", step, "arc step bound");
  curve->add_option("--out", out_path, "output file (default stdout)");

  auto* pose = app.add_subcommand("pose", "absolute pose from a scene file");
  pose->add_option("--scene", scene_path, "scene config file")->required();

  auto* sweep = app.add_subcommand("sweep", "noise sweep experiment");
  sweep->add_option("--experiment", experiment,
                    "vp-from-dir | dir-from-vp | abs-rotation | abs-translation | "
                    "relative-rotation")
      ->required();
  sweep->add_option("--config", config_path, "sweep config file")->required();
  sweep->add_option("--csv", csv_path, "CSV output path");
  sweep->add_option("--svg", svg_path, "SVG output path");

  auto* oracle = app.add_subcommand("oracle-check", "analytic-vs-brute-force agreement suite");
  oracle->add_option("--trials", trials, "number of random instances");
  oracle->add_option("--seed", seed, "rng seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (vp->parsed()) return cmd_vp(rig_arg, dir_arg);
    if (direction->parsed()) return cmd_direction(rig_arg, point_arg);
    if (curve->parsed()) return cmd_curve(rig_arg, normal_arg, step, out_path);
    if (pose->parsed()) return cmd_pose(scene_path);
    if (sweep->parsed()) return cmd_sweep(experiment, config_path, csv_path, svg_path);
    if (oracle->parsed()) return cmd_oracle_check(trials, seed);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "invalid input: %s\n", e.what());
    return kExitValidation;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumerical;
  }
  return kExitOk;
}
