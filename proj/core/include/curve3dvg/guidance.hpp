#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "curve3dvg/camera.hpp"
#include "curve3dvg/image.hpp"
#include "curve3dvg/rng.hpp"
#include "curve3dvg/scene.hpp"
#include "curve3dvg/visibility.hpp"

namespace c3vg {

// Diffusion-style schedule constants: guidance scale interpolation, timestep
// annealing, and the cumulative noise products used by x0 reconstruction.
struct ScheduleConfig {
    double lambda0 = 1.0;
    double lambda1 = 7.5;
    double t_lo_frac = 0.1;  // sampling range as fractions of N
    double t_hi_frac = 0.9;
    int N = 1000;
    int total_steps = 2000;
    double anneal_window_frac = 0.1;  // late-step sampling width above t_lo
    std::vector<double> alpha_bar;    // index t-1 for t = 1..N

    ScheduleConfig();
};

// Cumulative alpha products of the scaled-linear beta schedule
// (sqrt-interpolated betas from beta_start to beta_end).
std::vector<double> scaled_linear_alpha_bar(int N, double beta_start = 0.00085,
                                            double beta_end = 0.012);

// Throws ConfigError when ranges or the alpha_bar table are inconsistent.
void validate_schedule(const ScheduleConfig& cfg);

// lambda0 + (lambda1 - lambda0) * (1 - t/N); domain error outside 1..N.
double cfg_scale(int t, const ScheduleConfig& cfg);

// Upper bound of the t-sampling range at `step`, as a fraction of N: falls
// linearly from t_hi_frac to t_lo_frac + anneal_window_frac.
double anneal_upper_frac(int step, const ScheduleConfig& cfg);

// Uniform draw from [t_lo_frac*N, anneal_upper_frac(step)*N].
int anneal_timestep(int step, const ScheduleConfig& cfg, Rng& rng);

// x0* = (x_t - sqrt(1 - alpha_bar_t) * delta_star) / sqrt(alpha_bar_t).
Image reconstruct_x0(const Image& x_t, const Image& delta_star, int t,
                     const ScheduleConfig& cfg);

// ---- analytic oracle scene ----------------------------------------------

struct SpherePrimitive {
    Vec3 center{0.0, 0.0, 0.0};
    double radius = 1.0;
};

struct BoxPrimitive {
    Vec3 center{0.0, 0.0, 0.0};
    Vec3 half{0.5, 0.5, 0.5};  // axis-aligned half extents
};

using Primitive = std::variant<SpherePrimitive, BoxPrimitive>;

struct OracleScene {
    std::vector<Primitive> primitives;

    static OracleScene sphere();      // unit sphere at origin
    static OracleScene sphere_box();  // sphere plus an offset box
};

struct RayHit {
    double depth = 0.0;  // +inf when nothing is hit
    Vec3 normal{0.0, 0.0, 0.0};
    int primitive = -1;
    bool hit() const { return primitive >= 0; }
};

// First surface along the ray through a device pixel (or toward a world
// point); depth is camera-space z-distance, matching ProjectedPoint::d_z.
RayHit raycast_pixel(const OracleScene& scene, const Camera& cam, double px, double py);
RayHit raycast_toward(const OracleScene& scene, const Camera& cam, const Vec3& target);

// Per-pixel first-surface z-depths from this camera (+inf where no surface).
DepthMap render_depth(const OracleScene& scene, const Camera& cam);

// White background, light-gray interior, dark lines at silhouette and sharp
// edges (hit-mask, depth, or normal discontinuities between neighbors).
Image render_edge_image(const OracleScene& scene, const Camera& cam);

// Separable Gaussian blur; sigma <= 0 returns the input unchanged.
Image gaussian_blur(const Image& image, double sigma);

// Coarse-to-fine proxy: sigma falls linearly from sigma_max at cfg = lambda0
// to 0 at cfg = lambda1.
double blur_sigma_for_cfg(double cfg_value, const ScheduleConfig& cfg,
                          double sigma_max = 4.0);

enum class BlurMode { C2F, ConstantFine, ConstantCoarse };

// ---- guidance streams ----------------------------------------------------

struct GuidanceSample {
    Image image;  // H x W x 3 target
    DepthMap depth_front;
    DepthMap depth_back;
    Camera camera;
    int step = 0;
    int t = 0;
};

GuidanceSample oracle_render(const OracleScene& scene, const Camera& cam, int step, int t,
                             const ScheduleConfig& cfg, BlurMode mode = BlurMode::C2F);

class GuidanceSource {
public:
    virtual ~GuidanceSource() = default;
    // Number of distinct cameras, 0 when cameras are sampled on demand.
    virtual int camera_count() const = 0;
    virtual std::vector<GuidanceSample> batch(int step, int t, int batch_size,
                                              Rng& cam_rng) = 0;
};

// Samples fresh cameras every batch and ray-casts the oracle.
class OracleGuidanceSource : public GuidanceSource {
public:
    OracleGuidanceSource(OracleScene scene, ScheduleConfig schedule,
                         CameraSamplerConfig cameras = {}, BlurMode mode = BlurMode::C2F);
    int camera_count() const override { return 0; }
    std::vector<GuidanceSample> batch(int step, int t, int batch_size,
                                      Rng& cam_rng) override;

private:
    OracleScene scene_;
    ScheduleConfig schedule_;
    CameraSamplerConfig cameras_;
    BlurMode mode_;
};

// Fixed camera set with cached sharp targets and depths; per-step blur only.
// Used by the recovery experiment, where training views are frozen.
class PrerenderedGuidanceSource : public GuidanceSource {
public:
    PrerenderedGuidanceSource(const OracleScene& scene, ScheduleConfig schedule,
                              std::vector<Camera> cameras, BlurMode mode = BlurMode::C2F);
    // Depths still come from the oracle, but the sharp targets are supplied by
    // the caller (e.g. renders of a known scene).
    PrerenderedGuidanceSource(const OracleScene& scene, ScheduleConfig schedule,
                              std::vector<Camera> cameras, std::vector<Image> targets,
                              BlurMode mode = BlurMode::C2F);
    int camera_count() const override { return static_cast<int>(cameras_.size()); }
    std::vector<GuidanceSample> batch(int step, int t, int batch_size,
                                      Rng& cam_rng) override;
    const std::vector<Camera>& cameras() const { return cameras_; }
    // Sharp (unblurred) target for one camera, for evaluation.
    const Image& sharp_target(int cam) const { return targets_[cam]; }
    const DepthMap& front_depth(int cam) const { return fronts_[cam]; }
    const DepthMap& back_depth(int cam) const { return backs_[cam]; }

private:
    ScheduleConfig schedule_;
    std::vector<Camera> cameras_;
    std::vector<Image> targets_;
    std::vector<DepthMap> fronts_;
    std::vector<DepthMap> backs_;
    BlurMode mode_;
};

// Step directory of a saved guidance sequence.
struct GuidanceStep {
    int step = 0;
    int t = 0;
    double cfg = 0.0;
    std::vector<GuidanceSample> cams;
};

// Layout: <dir>/step_{s:05}/cam_{c:02}.png + .front.pfm + .back.pfm + .json,
// plus per-step meta.json holding {"t": ..., "cfg_scale": ...}.
void save_guidance_step(const std::string& dir, int step, int t, double cfg_value,
                        const std::vector<GuidanceSample>& cams);
std::vector<GuidanceStep> load_guidance(const std::string& dir);

// Replays a saved sequence in step order; exhaustion raises RunError.
class DirectoryGuidanceSource : public GuidanceSource {
public:
    explicit DirectoryGuidanceSource(const std::string& dir);
    int camera_count() const override;
    std::vector<GuidanceSample> batch(int step, int t, int batch_size,
                                      Rng& cam_rng) override;
    const std::vector<GuidanceStep>& steps() const { return steps_; }

private:
    std::vector<GuidanceStep> steps_;
};

// ---- surface-constrained scene generation --------------------------------

Vec3 sample_surface_point(const OracleScene& scene, Rng& rng);

// n_paths sketch curves lying on primitive surfaces: great-circle arcs on
// spheres, straight face segments on boxes. The recovery experiment's ground
// truth.
Scene3DVG scene_on_primitives(const OracleScene& scene, int n_paths, Rng& rng,
                              double stroke_width = 1.5);

// Farthest-point sampled anchors on the oracle surfaces, one short curve per
// anchor.
Scene3DVG farthest_point_init(const OracleScene& scene, int n_paths, Rng& rng,
                              double stroke_width = 1.5);

// Control points drawn uniformly inside a ball.
Scene3DVG random_ball_init(int n_paths, Rng& rng, double radius = 1.0,
                           double stroke_width = 1.5);

}  // namespace c3vg
