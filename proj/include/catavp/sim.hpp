#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "catavp/camera.hpp"
#include "catavp/config.hpp"
#include "catavp/mirror.hpp"
#include "catavp/plucker.hpp"
#include "catavp/pose.hpp"

namespace catavp {

/// Deterministic counter-seeded generator (splitmix64 core). Per-trial streams
/// are derived from (seed, level, trial), so execution order cannot change
/// results.
struct Rng {
  std::uint64_t state = 0x9e3779b97f4a7c15ULL;

  static Rng from_seed(std::uint64_t seed);
  static Rng counter(std::uint64_t seed, std::uint64_t level, std::uint64_t trial);

  std::uint64_t next_u64();
  double uniform();                      // [0, 1)
  double uniform(double a, double b);
  double gaussian();                     // standard normal (Box-Muller)
  Vec3 unit_vector();
};

// ---- presets ---------------------------------------------------------------

/// Rigs used by the simulation sweeps. The reference experiments never publish
/// their rig parameters, so these are documented stand-ins:
///   spherical          A=1,  B=0, C=1   camera [0, 0.2, 3]
///   ellipsoidal        A=0.5,B=0, C=1   camera [0, 0.15, 2.6]
///   hyperbolic         A=-2, B=2, C=-1  camera [0, 0.1, -1.3]   (non-central)
///   central-hyperbolic A=-2, B=2, C=-1  camera [0, 0, -1]       (at the focus)
std::vector<std::string> preset_names();
CameraRig preset_rig(const std::string& name);

/// [mirror] A B C, [camera] cx_world cy_world cz_world fx fy cx cy
CameraRig rig_from_config(const ConfigFile& cfg);

// ---- scenes and noise ------------------------------------------------------

struct Scene {
  std::vector<std::vector<PlueckerLine>> bundles;  // each bundle shares a direction
  CameraRig rig;
  Pose gt_pose;  // world -> camera
};

std::vector<PlueckerLine> gen_parallel_bundle(const DirectionVector& direction, int count,
                                              double spread, Rng& rng);

/// Rotate s about a uniformly random perpendicular axis by a gaussian angle
/// with standard deviation angle_deg (degrees).
DirectionVector perturb_direction(const DirectionVector& s, double angle_deg, Rng& rng);

/// iid gaussian on each coordinate, then re-projection onto the mirror.
Vec3 perturb_point(const MirrorShape& shape, const Vec3& r, double sigma, Rng& rng);
Pixel perturb_point(const Pixel& px, double sigma, Rng& rng);

// ---- metrics ---------------------------------------------------------------

double metric_vp_distance(const Vec3& r_gt, const Vec3& r);
/// minimum-pairing set error: mean over estimated points of the distance to the
/// nearest ground-truth point (infinite when either set is empty)
double metric_vp_set_distance(const std::vector<MirrorPoint>& gt,
                              const std::vector<MirrorPoint>& est);
double metric_rotation(const Mat3& R_gt, const Mat3& R);

// ---- sweeps ----------------------------------------------------------------

enum class NoiseKind { DirectionAngleDeg, PixelGaussian };

enum class Experiment {
  VpFromDir,
  DirFromVp,
  AbsRotation,
  AbsTranslation,
  RelativeRotation,
};

Experiment experiment_from_name(const std::string& name);
std::string experiment_name(Experiment e);

struct SweepConfig {
  CameraRig rig;
  std::string preset_name = "spherical";
  NoiseKind kind = NoiseKind::PixelGaussian;
  std::vector<double> levels;  // ascending
  int trials = 100;
  std::uint64_t seed = 1;
};

SweepConfig sweep_config_from_file(const ConfigFile& cfg);

struct SweepRow {
  double noise_level = 0.0;
  double median = 0.0;
  double mean = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;
  int failures = 0;
};

struct SweepResult {
  Experiment experiment = Experiment::VpFromDir;
  std::string preset_name;
  std::vector<SweepRow> rows;
};

SweepResult run_sweep(const SweepConfig& config, Experiment experiment);

// ---- outputs ---------------------------------------------------------------

std::string sweep_csv(const SweepResult& result);
void emit_csv(const SweepResult& result, const std::string& path);
/// error-vs-noise SVG, one polyline series per result
void emit_svg(const std::vector<SweepResult>& results, const std::string& path);
void emit_outputs(const SweepResult& result, const std::string& csv_path,
                  const std::string& svg_path);

/// R^2 of the least-squares line through (x, y); 1 for a perfect linear trend.
double linear_fit_r2(const std::vector<double>& x, const std::vector<double>& y);

// ---- synthetic pose scenes -------------------------------------------------

struct PoseScene {
  std::vector<VpObservation> vps;
  std::vector<LinePixelObservation> line_pixels;
  Pose gt_pose;
};

/// Chessboard-style scene: two (or three) orthogonal bundle directions with a
/// known pose, vanishing points computed in the camera frame, and pixels of two
/// 3D lines for the translation rows.
PoseScene make_chessboard_scene(const CameraRig& rig, const Pose& gt, int pixels_per_line,
                                Rng& rng);

}  // namespace catavp
