#pragma once

#include <set>
#include <string>
#include <vector>

#include "curve3dvg/camera.hpp"
#include "curve3dvg/geometry.hpp"
#include "curve3dvg/io.hpp"
#include "curve3dvg/scene.hpp"

namespace c3vg {

// NeRF-style positional encoding: for each frequency j in [0, L) a block of
// sin(2^j pi p_c) for c in {x,y,z} followed by the matching cos terms.
// Output length 6L.
std::vector<double> positional_encoding(const Vec3& p, int L);

// Derivative of the encoding w.r.t. p: out[k] = d enc[k] / d p_{axis(k)}.
std::vector<double> positional_encoding_deriv(const Vec3& p, int L);

struct NetParams {
    std::vector<double> w1, b1;  // hidden x input
    std::vector<double> w2, b2;  // hidden x hidden
    std::vector<double> w3, b3;  // 1 x hidden

    void fill(double v);
    void accumulate(const NetParams& other, double scale = 1.0);
};

// Per-view importance of a 3D point: Sigmoid(MLP(encoding(p), view_dir)).
// Two ReLU hidden layers of 64 units; view direction is the unit vector from
// the camera position toward its look-at target.
class ImportanceNet {
public:
    explicit ImportanceNet(std::uint64_t seed, int L = 6, int hidden = 64);

    int encoding_bands() const { return L_; }
    int hidden_units() const { return hidden_; }
    int input_dim() const { return 6 * L_ + 3; }

    double importance(const Vec3& p, const Camera& cam) const;

    // Intermediate activations for one forward evaluation.
    struct Tape {
        std::vector<double> x, z1, a1, z2, a2;
        double z3 = 0.0, out = 0.0;
        Vec3 p;
    };
    double importance_tape(const Vec3& p, const Camera& cam, Tape& tape) const;

    // Accumulates d(loss)/d(weights) into grads given dL/d(output); when
    // d_point is non-null also returns dL/dp through the encoding.
    void backward(const Tape& tape, double d_out, NetParams& grads,
                  Vec3* d_point = nullptr) const;

    NetParams& params() { return params_; }
    const NetParams& params() const { return params_; }
    NetParams zero_grads() const;

    std::vector<NamedTensor> to_tensors() const;
    static ImportanceNet from_tensors(const std::vector<NamedTensor>& tensors);

private:
    ImportanceNet(int L, int hidden);  // uninitialized weights
    int L_;
    int hidden_;
    NetParams params_;
};

// Front or back depth image for one camera; +inf marks pixels with no
// surface. Row 0 is the top row.
struct DepthMap {
    int width = 0;
    int height = 0;
    std::vector<float> depth;
    Camera camera;

    float at(int x, int y) const { return depth[static_cast<std::size_t>(y) * width + x]; }
};

// Bilinear lookup at normalized image coordinates. Returns +inf when the
// point falls outside the image or any contributing pixel is +inf, so such
// samples cannot fail the depth test.
double depth_lookup(const DepthMap& map, const Vec2& d_xy);

void save_depth_map(const DepthMap& map, const std::string& pfm_path,
                    const std::string& camera_path);
DepthMap load_depth_map(const std::string& pfm_path, const std::string& camera_path);

struct VisibilityConfig {
    double tau_alpha = 0.75;    // importance threshold
    double alpha_depth = 0.25;  // adaptive depth-threshold scale
    int k_points = 8;           // samples per curve
    double vote_fraction = 0.5; // fraction of votes needed for visibility
    double opacity_high = 1.0;
    double opacity_low = 0.2;
};

struct ImportanceFilterResult {
    std::vector<double> importance;  // per flattened curve
    std::set<int> non_important;     // curve ids with importance < tau_alpha
};

ImportanceFilterResult curve_importance_filter(const ImportanceNet& net,
                                               const Scene3DVG& scene, const Camera& cam,
                                               const VisibilityConfig& cfg);

struct VoteResult {
    bool visible = true;
    std::vector<bool> point_votes;
};

// Depth voting against the antipodal view: a sample is visible when its
// front-depth residual (minus the adaptive slack tau_d) stays below its
// back-depth residual. Throws ConfigError unless depth_front matches cam and
// depth_back matches its antipodal camera.
VoteResult antipodal_vote(const BezierCurve3D& curve, const Camera& cam,
                          const DepthMap& depth_front, const DepthMap& depth_back,
                          const VisibilityConfig& cfg);

enum class VisibilityMode { Train, Inference };

// Per-path opacity decisions. Multi-curve paths aggregate their curves: mean
// importance, and a vote_fraction share of curve votes for visibility.
// Train: paths fully inside the non-important set render with their trained
// importance (gradients flow to the net), everything else at opacity_high.
// Inference: opacity_high iff importance >= tau_alpha or the vote says
// visible, else opacity_low.
std::vector<OpacityState> resolve_opacities(const Scene3DVG& scene,
                                            const std::vector<double>& importance,
                                            const std::set<int>& non_important,
                                            const std::vector<bool>& votes,
                                            VisibilityMode mode,
                                            const VisibilityConfig& cfg);

}  // namespace c3vg
