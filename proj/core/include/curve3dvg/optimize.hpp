#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "curve3dvg/guidance.hpp"
#include "curve3dvg/image.hpp"
#include "curve3dvg/rng.hpp"
#include "curve3dvg/scene.hpp"
#include "curve3dvg/visibility.hpp"

namespace c3vg {

// ---- image distances -----------------------------------------------------

// Distance ids: "pyramid-l2" (4-level binomial pyramid, per level the mean
// over pixels of the summed squared channel difference, averaged over
// levels), "l2" (single level of the same), "cosine" (one minus the cosine
// similarity of the flattened images), "off".
struct LossConfig {
    std::string structural_distance = "pyramid-l2";
    std::string semantic_distance = "off";
    double weight_structural = 1.0;
    double weight_semantic = 1.0;
};

// ConfigError when both terms are off or an id is unknown.
void validate_loss(const LossConfig& cfg);

struct LossTerms {
    double total = 0.0;
    double structural = 0.0;
    double semantic = 0.0;
};

// Weighted sum of the enabled distances; when grad is non-null it receives
// the exact gradient w.r.t. `rendered`. Shapes must match.
LossTerms image_loss(const Image& rendered, const Image& target, const LossConfig& cfg,
                     Image* grad = nullptr);

// One distance by id; "off" scores 0 with a zero gradient.
double image_distance(const std::string& id, const Image& a, const Image& b,
                      Image* grad = nullptr);

// ---- Adam ----------------------------------------------------------------

struct AdamParams {
    double lr_points = 0.001;
    double lr_color = 0.001;
    double lr_width = 0.001;
    double lr_net = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct AdamState {
    std::vector<double> m, v;
    long step = 0;
};

// Bias-corrected Adam update in place. The state adopts the parameter shape
// on first use; a later shape change is an invalid_argument.
void adam_step(AdamState& state, std::vector<double>& params,
               const std::vector<double>& grads, double lr, const AdamParams& hp);

// ---- fitting -------------------------------------------------------------

enum class InitMode { FarthestPoint, Random };

struct FitConfig {
    int total_steps = 2000;
    int batch_cameras = 4;
    std::uint64_t seed = 0;
    InitMode init = InitMode::FarthestPoint;
    int n_paths = 64;
    bool train_colors = true;
    bool train_widths = false;      // the trained parameter list is points+colors
    bool train_visibility = true;   // false: every path renders FixedHigh (ablation)
    int vote_every = 50;            // antipodal vote cadence for the log
    int log_every = 1;
    int checkpoint_every = 0;       // 0 disables the checkpoint callback

    LossConfig loss;
    VisibilityConfig visibility;
    AdamParams adam;
};

struct LogRecord {
    int step = 0;
    double loss_total = 0.0;
    double loss_structural = 0.0;
    double loss_semantic = 0.0;
    int t = 0;
    double cfg_scale = 0.0;
    double mean_importance = 1.0;
    double visible_fraction = 1.0;
};

// One JSON object per line, step order.
std::string log_to_jsonl(const std::vector<LogRecord>& log);

struct FitResult {
    Scene3DVG scene;
    ImportanceNet net;
    std::vector<LogRecord> log;
};

using CheckpointFn =
    std::function<void(int step, const Scene3DVG& scene, const ImportanceNet& net)>;

// Multi-view fitting: per step draws one timestep, pulls a camera batch from
// the guidance source, renders with Train-mode opacities and applies one Adam
// update to control points, colors, optional widths, and the importance net.
// Deterministic for a fixed seed. RunError when guidance runs out.
FitResult fit(const Scene3DVG& init, GuidanceSource& guidance,
              const ScheduleConfig& schedule, const FitConfig& cfg,
              const CheckpointFn& checkpoint = {});

// ---- evaluation ----------------------------------------------------------

// Front/back depth maps for a camera, used to vote during inference.
using DepthProvider = std::function<std::pair<DepthMap, DepthMap>(const Camera&)>;

// One view with Inference-mode opacities (3 channels).
Image render_inference_view(const Scene3DVG& scene, const ImportanceNet& net,
                            const Camera& cam, const VisibilityConfig& vis = {},
                            const DepthProvider& depths = {});

// Mean distance over consecutive rendered view pairs on an azimuth ring
// (wrapping around); needs at least 3 cameras.
double adjacent_view_consistency(const Scene3DVG& scene, const ImportanceNet& net,
                                 const std::vector<Camera>& ring,
                                 const std::string& distance = "pyramid-l2",
                                 const VisibilityConfig& vis = {},
                                 const DepthProvider& depths = {});

// Symmetric Chamfer distance between densely sampled curve points.
double chamfer_distance(const Scene3DVG& a, const Scene3DVG& b,
                        int samples_per_curve = 32);

}  // namespace c3vg
