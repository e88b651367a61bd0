#include "curve3dvg/visibility.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "curve3dvg/errors.hpp"
#include "curve3dvg/project.hpp"
#include "curve3dvg/rng.hpp"

namespace c3vg {

std::vector<double> positional_encoding(const Vec3& p, int L) {
    if (L < 1) throw std::invalid_argument("positional encoding needs L >= 1");
    std::vector<double> out;
    out.reserve(6 * static_cast<std::size_t>(L));
    const double comps[3] = {p.x, p.y, p.z};
    for (int j = 0; j < L; ++j) {
        const double f = std::ldexp(std::numbers::pi, j);  // 2^j * pi
        for (int c = 0; c < 3; ++c) out.push_back(std::sin(f * comps[c]));
        for (int c = 0; c < 3; ++c) out.push_back(std::cos(f * comps[c]));
    }
    return out;
}

std::vector<double> positional_encoding_deriv(const Vec3& p, int L) {
    if (L < 1) throw std::invalid_argument("positional encoding needs L >= 1");
    std::vector<double> out;
    out.reserve(6 * static_cast<std::size_t>(L));
    const double comps[3] = {p.x, p.y, p.z};
    for (int j = 0; j < L; ++j) {
        const double f = std::ldexp(std::numbers::pi, j);
        for (int c = 0; c < 3; ++c) out.push_back(f * std::cos(f * comps[c]));
        for (int c = 0; c < 3; ++c) out.push_back(-f * std::sin(f * comps[c]));
    }
    return out;
}

void NetParams::fill(double v) {
    for (auto* vec : {&w1, &b1, &w2, &b2, &w3, &b3})
        std::fill(vec->begin(), vec->end(), v);
}

void NetParams::accumulate(const NetParams& other, double scale) {
    const auto add = [scale](std::vector<double>& dst, const std::vector<double>& src) {
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += scale * src[i];
    };
    add(w1, other.w1);
    add(b1, other.b1);
    add(w2, other.w2);
    add(b2, other.b2);
    add(w3, other.w3);
    add(b3, other.b3);
}

ImportanceNet::ImportanceNet(int L, int hidden) : L_(L), hidden_(hidden) {
    if (L < 1 || hidden < 1) throw std::invalid_argument("bad importance net shape");
    const int in = input_dim();
    params_.w1.resize(static_cast<std::size_t>(hidden) * in);
    params_.b1.assign(hidden, 0.0);
    params_.w2.resize(static_cast<std::size_t>(hidden) * hidden);
    params_.b2.assign(hidden, 0.0);
    params_.w3.resize(hidden);
    params_.b3.assign(1, 0.0);
}

ImportanceNet::ImportanceNet(std::uint64_t seed, int L, int hidden)
    : ImportanceNet(L, hidden) {
    Rng rng(seed);
    const double s1 = std::sqrt(2.0 / input_dim());
    for (double& w : params_.w1) w = s1 * rng.normal();
    const double s2 = std::sqrt(2.0 / hidden_);
    for (double& w : params_.w2) w = s2 * rng.normal();
    const double s3 = 1.0 / std::sqrt(static_cast<double>(hidden_));
    for (double& w : params_.w3) w = s3 * rng.normal();
}

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

double ImportanceNet::importance_tape(const Vec3& p, const Camera& cam, Tape& tape) const {
    tape.p = p;
    tape.x = positional_encoding(p, L_);
    const Vec3 dir = camera_basis(cam).forward;
    tape.x.push_back(dir.x);
    tape.x.push_back(dir.y);
    tape.x.push_back(dir.z);

    const int in = input_dim();
    const int H = hidden_;
    tape.z1.assign(H, 0.0);
    tape.a1.assign(H, 0.0);
    for (int j = 0; j < H; ++j) {
        double z = params_.b1[j];
        const double* row = params_.w1.data() + static_cast<std::size_t>(j) * in;
        for (int i = 0; i < in; ++i) z += row[i] * tape.x[i];
        tape.z1[j] = z;
        tape.a1[j] = z > 0.0 ? z : 0.0;
    }
    tape.z2.assign(H, 0.0);
    tape.a2.assign(H, 0.0);
    for (int j = 0; j < H; ++j) {
        double z = params_.b2[j];
        const double* row = params_.w2.data() + static_cast<std::size_t>(j) * H;
        for (int i = 0; i < H; ++i) z += row[i] * tape.a1[i];
        tape.z2[j] = z;
        tape.a2[j] = z > 0.0 ? z : 0.0;
    }
    double z3 = params_.b3[0];
    for (int i = 0; i < H; ++i) z3 += params_.w3[i] * tape.a2[i];
    tape.z3 = z3;
    tape.out = sigmoid(z3);
    return tape.out;
}

double ImportanceNet::importance(const Vec3& p, const Camera& cam) const {
    Tape tape;
    return importance_tape(p, cam, tape);
}

void ImportanceNet::backward(const Tape& tape, double d_out, NetParams& grads,
                             Vec3* d_point) const {
    const int in = input_dim();
    const int H = hidden_;
    const double dz3 = d_out * tape.out * (1.0 - tape.out);
    grads.b3[0] += dz3;
    std::vector<double> dz2(H);
    for (int j = 0; j < H; ++j) {
        grads.w3[j] += dz3 * tape.a2[j];
        dz2[j] = tape.z2[j] > 0.0 ? params_.w3[j] * dz3 : 0.0;
    }
    std::vector<double> da1(H, 0.0);
    for (int j = 0; j < H; ++j) {
        if (dz2[j] == 0.0) continue;
        grads.b2[j] += dz2[j];
        double* wrow = grads.w2.data() + static_cast<std::size_t>(j) * H;
        const double* prow = params_.w2.data() + static_cast<std::size_t>(j) * H;
        for (int i = 0; i < H; ++i) {
            wrow[i] += dz2[j] * tape.a1[i];
            da1[i] += prow[i] * dz2[j];
        }
    }
    std::vector<double> dx;
    if (d_point) dx.assign(in, 0.0);
    for (int j = 0; j < H; ++j) {
        const double dz1 = tape.z1[j] > 0.0 ? da1[j] : 0.0;
        if (dz1 == 0.0) continue;
        grads.b1[j] += dz1;
        double* wrow = grads.w1.data() + static_cast<std::size_t>(j) * in;
        const double* prow = params_.w1.data() + static_cast<std::size_t>(j) * in;
        for (int i = 0; i < in; ++i) {
            wrow[i] += dz1 * tape.x[i];
            if (d_point) dx[i] += prow[i] * dz1;
        }
    }
    if (d_point) {
        const std::vector<double> deriv = positional_encoding_deriv(tape.p, L_);
        Vec3 g{0.0, 0.0, 0.0};
        for (int j = 0; j < L_; ++j) {
            for (int half = 0; half < 2; ++half) {
                for (int c = 0; c < 3; ++c) {
                    const int k = 6 * j + 3 * half + c;
                    const double contrib = dx[k] * deriv[k];
                    if (c == 0)
                        g.x += contrib;
                    else if (c == 1)
                        g.y += contrib;
                    else
                        g.z += contrib;
                }
            }
        }
        *d_point = g;
    }
}

NetParams ImportanceNet::zero_grads() const {
    NetParams g = params_;
    g.fill(0.0);
    return g;
}

std::vector<NamedTensor> ImportanceNet::to_tensors() const {
    const auto tensor = [](std::string name, std::vector<std::uint32_t> shape,
                           const std::vector<double>& values) {
        NamedTensor t;
        t.name = std::move(name);
        t.shape = std::move(shape);
        t.values.reserve(values.size());
        for (double v : values) t.values.push_back(static_cast<float>(v));
        return t;
    };
    const auto H = static_cast<std::uint32_t>(hidden_);
    const auto in = static_cast<std::uint32_t>(input_dim());
    return {
        tensor("meta", {2}, {static_cast<double>(L_), static_cast<double>(hidden_)}),
        tensor("w1", {H, in}, params_.w1),
        tensor("b1", {H}, params_.b1),
        tensor("w2", {H, H}, params_.w2),
        tensor("b2", {H}, params_.b2),
        tensor("w3", {1, H}, params_.w3),
        tensor("b3", {1}, params_.b3),
    };
}

ImportanceNet ImportanceNet::from_tensors(const std::vector<NamedTensor>& tensors) {
    const auto find = [&tensors](const std::string& name) -> const NamedTensor& {
        for (const NamedTensor& t : tensors)
            if (t.name == name) return t;
        throw IngestError("importance net blob missing tensor '" + name + "'");
    };
    const NamedTensor& meta = find("meta");
    if (meta.values.size() != 2) throw IngestError("importance net meta malformed");
    ImportanceNet net(static_cast<int>(meta.values[0]), static_cast<int>(meta.values[1]));
    const auto load = [&find](const std::string& name, std::vector<double>& dst) {
        const NamedTensor& t = find(name);
        if (t.values.size() != dst.size())
            throw IngestError("importance net tensor '" + name + "' has wrong size");
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = t.values[i];
    };
    load("w1", net.params_.w1);
    load("b1", net.params_.b1);
    load("w2", net.params_.w2);
    load("b2", net.params_.b2);
    load("w3", net.params_.w3);
    load("b3", net.params_.b3);
    return net;
}

double depth_lookup(const DepthMap& map, const Vec2& d_xy) {
    const double s = 0.5 * std::min(map.width, map.height);
    const double px = 0.5 * map.width + d_xy.x * s;
    const double py = 0.5 * map.height - d_xy.y * s;
    const double gx = px - 0.5;  // grid of pixel centers
    const double gy = py - 0.5;
    if (gx < 0.0 || gy < 0.0 || gx > map.width - 1 || gy > map.height - 1)
        return std::numeric_limits<double>::infinity();
    const int x0 = std::min(static_cast<int>(gx), map.width - 2 >= 0 ? map.width - 2 : 0);
    const int y0 = std::min(static_cast<int>(gy), map.height - 2 >= 0 ? map.height - 2 : 0);
    const int x1 = std::min(x0 + 1, map.width - 1);
    const int y1 = std::min(y0 + 1, map.height - 1);
    const float taps[4] = {map.at(x0, y0), map.at(x1, y0), map.at(x0, y1), map.at(x1, y1)};
    for (float t : taps)
        if (std::isinf(t)) return std::numeric_limits<double>::infinity();
    const double fx = gx - x0;
    const double fy = gy - y0;
    const double top = taps[0] * (1.0 - fx) + taps[1] * fx;
    const double bot = taps[2] * (1.0 - fx) + taps[3] * fx;
    return top * (1.0 - fy) + bot * fy;
}

void save_depth_map(const DepthMap& map, const std::string& pfm_path,
                    const std::string& camera_path) {
    write_pfm(map.depth, map.width, map.height, pfm_path);
    save_camera(map.camera, camera_path);
}

DepthMap load_depth_map(const std::string& pfm_path, const std::string& camera_path) {
    DepthMap map;
    map.depth = read_pfm(pfm_path, map.width, map.height);
    map.camera = load_camera(camera_path);
    if (map.camera.width != map.width || map.camera.height != map.height)
        throw IngestError("depth map resolution does not match its camera", pfm_path);
    return map;
}

ImportanceFilterResult curve_importance_filter(const ImportanceNet& net,
                                               const Scene3DVG& scene, const Camera& cam,
                                               const VisibilityConfig& cfg) {
    ImportanceFilterResult result;
    const int n = scene.curve_count();
    result.importance.reserve(n);
    for (int c = 0; c < n; ++c) {
        const std::vector<Vec3> samples = sample_points(scene.curve(c), cfg.k_points);
        double sum = 0.0;
        for (const Vec3& p : samples) sum += net.importance(p, cam);
        const double imp = sum / samples.size();
        result.importance.push_back(imp);
        if (imp < cfg.tau_alpha) result.non_important.insert(c);
    }
    return result;
}

VoteResult antipodal_vote(const BezierCurve3D& curve, const Camera& cam,
                          const DepthMap& depth_front, const DepthMap& depth_back,
                          const VisibilityConfig& cfg) {
    if (!cameras_equal(depth_front.camera, cam, 1e-6))
        throw ConfigError("front depth map camera does not match the query camera");
    if (!cameras_equal(depth_back.camera, antipodal_camera(cam), 1e-6))
        throw ConfigError("back depth map camera is not the antipodal camera");

    const Camera back_cam = depth_back.camera;
    VoteResult result;
    result.point_votes.reserve(cfg.k_points);
    int visible_votes = 0;
    for (const Vec3& p : sample_points(curve, cfg.k_points)) {
        bool vote = true;  // unknown/occluder-free samples count as visible
        try {
            const ProjectedPoint front = project_point(cam, p);
            const ProjectedPoint back = project_point(back_cam, p);
            const double df = depth_lookup(depth_front, front.d_xy);
            const double db = depth_lookup(depth_back, back.d_xy);
            if (std::isfinite(df) && std::isfinite(db)) {
                const double tau_d = cfg.alpha_depth * std::abs(df - db);
                vote = std::abs(front.d_z - df) - tau_d < std::abs(back.d_z - db);
            }
        } catch (const BehindCameraError&) {
            vote = true;
        }
        result.point_votes.push_back(vote);
        if (vote) ++visible_votes;
    }
    result.visible = visible_votes > cfg.vote_fraction * cfg.k_points;
    return result;
}

std::vector<OpacityState> resolve_opacities(const Scene3DVG& scene,
                                            const std::vector<double>& importance,
                                            const std::set<int>& non_important,
                                            const std::vector<bool>& votes,
                                            VisibilityMode mode,
                                            const VisibilityConfig& cfg) {
    const int n_curves = scene.curve_count();
    if (static_cast<int>(importance.size()) != n_curves)
        throw std::invalid_argument("importance size does not match curve count");
    if (!votes.empty() && static_cast<int>(votes.size()) != n_curves)
        throw std::invalid_argument("votes size does not match curve count");

    std::vector<OpacityState> out;
    out.reserve(scene.paths.size());
    int flat = 0;
    for (const Path3D& path : scene.paths) {
        const int nc = path.curve_count();
        double imp_sum = 0.0;
        int in_d = 0;
        int curve_votes = 0;
        for (int c = 0; c < nc; ++c, ++flat) {
            imp_sum += importance[flat];
            if (non_important.count(flat)) ++in_d;
            if (!votes.empty() && votes[flat]) ++curve_votes;
        }
        const double imp = imp_sum / nc;
        const bool all_non_important = in_d == nc;
        const bool vote_visible =
            !votes.empty() && curve_votes > cfg.vote_fraction * nc;

        if (mode == VisibilityMode::Train) {
            out.push_back(all_non_important ? OpacityState::trained(imp)
                                            : OpacityState::fixed_high(cfg.opacity_high));
        } else {
            const bool high = imp >= cfg.tau_alpha || vote_visible;
            out.push_back(high ? OpacityState::fixed_high(cfg.opacity_high)
                               : OpacityState::fixed_low(cfg.opacity_low));
        }
    }
    return out;
}

}  // namespace c3vg
