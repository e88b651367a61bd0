#include "curve3dvg/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <variant>

#include <json.hpp>

#include "curve3dvg/errors.hpp"
#include "curve3dvg/project.hpp"
#include "curve3dvg/raster.hpp"

namespace c3vg {

using nlohmann::json;

// ---- image distances -----------------------------------------------------

namespace {

constexpr int kPyramidLevels = 4;
// 5-tap binomial kernel for the pyramid, replicated edges.
constexpr double kPyrKernel[5] = {1.0 / 16, 4.0 / 16, 6.0 / 16, 4.0 / 16, 1.0 / 16};

Image blur5(const Image& img) {
    const int W = img.width, H = img.height, C = img.channels;
    Image tmp(W, H, C), out(W, H, C);
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x)
            for (int c = 0; c < C; ++c) {
                double acc = 0.0;
                for (int i = -2; i <= 2; ++i)
                    acc += kPyrKernel[i + 2] * img.at(std::clamp(x + i, 0, W - 1), y, c);
                tmp.at(x, y, c) = acc;
            }
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x)
            for (int c = 0; c < C; ++c) {
                double acc = 0.0;
                for (int i = -2; i <= 2; ++i)
                    acc += kPyrKernel[i + 2] * tmp.at(x, std::clamp(y + i, 0, H - 1), c);
                out.at(x, y, c) = acc;
            }
    return out;
}

// Adjoint of blur5: scatter with the same clamped taps, vertical then
// horizontal to transpose the forward composition order.
Image blur5_adjoint(const Image& g) {
    const int W = g.width, H = g.height, C = g.channels;
    Image tmp(W, H, C), out(W, H, C);
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x)
            for (int c = 0; c < C; ++c) {
                const double v = g.at(x, y, c);
                if (v == 0.0) continue;
                for (int i = -2; i <= 2; ++i)
                    tmp.at(x, std::clamp(y + i, 0, H - 1), c) += kPyrKernel[i + 2] * v;
            }
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x)
            for (int c = 0; c < C; ++c) {
                const double v = tmp.at(x, y, c);
                if (v == 0.0) continue;
                for (int i = -2; i <= 2; ++i)
                    out.at(std::clamp(x + i, 0, W - 1), y, c) += kPyrKernel[i + 2] * v;
            }
    return out;
}

Image downsample2(const Image& img) {
    const int W2 = (img.width + 1) / 2, H2 = (img.height + 1) / 2;
    Image out(W2, H2, img.channels);
    for (int y = 0; y < H2; ++y)
        for (int x = 0; x < W2; ++x)
            for (int c = 0; c < img.channels; ++c)
                out.at(x, y, c) = img.at(2 * x, 2 * y, c);
    return out;
}

Image downsample2_adjoint(const Image& g, int parent_w, int parent_h) {
    Image out(parent_w, parent_h, g.channels);
    for (int y = 0; y < g.height; ++y)
        for (int x = 0; x < g.width; ++x)
            for (int c = 0; c < g.channels; ++c)
                out.at(2 * x, 2 * y, c) = g.at(x, y, c);
    return out;
}

// Mean over pixels of the summed squared channel difference; constant offsets
// in one channel therefore score exactly offset^2.
double level_l2(const Image& a, const Image& b, Image* grad, double grad_scale) {
    const double inv_n = 1.0 / (static_cast<double>(a.width) * a.height);
    double loss = 0.0;
    if (grad && !grad->same_shape(a)) *grad = Image(a.width, a.height, a.channels);
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        const double d = a.data[i] - b.data[i];
        loss += d * d;
        if (grad) grad->data[i] = 2.0 * d * inv_n * grad_scale;
    }
    return loss * inv_n;
}

double pyramid_l2(const Image& a, const Image& b, Image* grad) {
    std::vector<Image> pa{a}, pb{b};
    for (int l = 1; l < kPyramidLevels; ++l) {
        pa.push_back(downsample2(blur5(pa.back())));
        pb.push_back(downsample2(blur5(pb.back())));
    }
    const double inv_levels = 1.0 / kPyramidLevels;
    double loss = 0.0;
    std::vector<Image> level_grads(kPyramidLevels);
    for (int l = 0; l < kPyramidLevels; ++l)
        loss += inv_levels *
                level_l2(pa[l], pb[l], grad ? &level_grads[l] : nullptr, inv_levels);
    if (grad) {
        Image acc = level_grads[kPyramidLevels - 1];
        for (int l = kPyramidLevels - 1; l >= 1; --l) {
            Image up = blur5_adjoint(
                downsample2_adjoint(acc, pa[l - 1].width, pa[l - 1].height));
            for (std::size_t i = 0; i < up.data.size(); ++i)
                up.data[i] += level_grads[l - 1].data[i];
            acc = std::move(up);
        }
        *grad = std::move(acc);
    }
    return loss;
}

double cosine_distance(const Image& a, const Image& b, Image* grad) {
    double na2 = 0.0, nb2 = 0.0, ab = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        na2 += a.data[i] * a.data[i];
        nb2 += b.data[i] * b.data[i];
        ab += a.data[i] * b.data[i];
    }
    const double na = std::sqrt(na2), nb = std::sqrt(nb2);
    if (grad) *grad = Image(a.width, a.height, a.channels);
    if (na < 1e-12 || nb < 1e-12) return 0.0;
    const double cos_sim = ab / (na * nb);
    if (grad) {
        for (std::size_t i = 0; i < a.data.size(); ++i)
            grad->data[i] = -(b.data[i] / (na * nb) - cos_sim * a.data[i] / na2);
    }
    return 1.0 - cos_sim;
}

bool known_distance(const std::string& id) {
    return id == "pyramid-l2" || id == "l2" || id == "cosine" || id == "off";
}

}  // namespace

double image_distance(const std::string& id, const Image& a, const Image& b, Image* grad) {
    if (!a.same_shape(b)) throw std::invalid_argument("image distance needs equal shapes");
    if (id == "off") {
        if (grad) *grad = Image(a.width, a.height, a.channels);
        return 0.0;
    }
    if (id == "l2") return level_l2(a, b, grad, 1.0);
    if (id == "pyramid-l2") return pyramid_l2(a, b, grad);
    if (id == "cosine") return cosine_distance(a, b, grad);
    throw ConfigError("unknown image distance: " + id);
}

void validate_loss(const LossConfig& cfg) {
    if (!known_distance(cfg.structural_distance))
        throw ConfigError("unknown structural distance: " + cfg.structural_distance);
    if (!known_distance(cfg.semantic_distance))
        throw ConfigError("unknown semantic distance: " + cfg.semantic_distance);
    if (cfg.structural_distance == "off" && cfg.semantic_distance == "off")
        throw ConfigError("at least one image distance must be enabled");
}

LossTerms image_loss(const Image& rendered, const Image& target, const LossConfig& cfg,
                     Image* grad) {
    validate_loss(cfg);
    if (!rendered.same_shape(target))
        throw std::invalid_argument("image_loss needs equal shapes");
    LossTerms terms;
    if (grad) *grad = Image(rendered.width, rendered.height, rendered.channels);
    Image term_grad;
    if (cfg.structural_distance != "off") {
        terms.structural = image_distance(cfg.structural_distance, rendered, target,
                                          grad ? &term_grad : nullptr);
        if (grad)
            for (std::size_t i = 0; i < grad->data.size(); ++i)
                grad->data[i] += cfg.weight_structural * term_grad.data[i];
    }
    if (cfg.semantic_distance != "off") {
        terms.semantic = image_distance(cfg.semantic_distance, rendered, target,
                                        grad ? &term_grad : nullptr);
        if (grad)
            for (std::size_t i = 0; i < grad->data.size(); ++i)
                grad->data[i] += cfg.weight_semantic * term_grad.data[i];
    }
    terms.total = cfg.weight_structural * terms.structural +
                  cfg.weight_semantic * terms.semantic;
    return terms;
}

// ---- Adam ----------------------------------------------------------------

void adam_step(AdamState& state, std::vector<double>& params,
               const std::vector<double>& grads, double lr, const AdamParams& hp) {
    if (params.size() != grads.size())
        throw std::invalid_argument("adam_step parameter/gradient size mismatch");
    if (state.m.empty()) {
        state.m.assign(params.size(), 0.0);
        state.v.assign(params.size(), 0.0);
    }
    if (state.m.size() != params.size())
        throw std::invalid_argument("adam_step state shaped for different parameters");
    ++state.step;
    const double bc1 = 1.0 - std::pow(hp.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(hp.beta2, static_cast<double>(state.step));
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double g = grads[i];
        state.m[i] = hp.beta1 * state.m[i] + (1.0 - hp.beta1) * g;
        state.v[i] = hp.beta2 * state.v[i] + (1.0 - hp.beta2) * g * g;
        const double mhat = state.m[i] / bc1;
        const double vhat = state.v[i] / bc2;
        params[i] -= lr * mhat / (std::sqrt(vhat) + hp.eps);
    }
}

// ---- parameter flattening ------------------------------------------------

namespace {

struct FlatScene {
    std::vector<std::size_t> point_offset;  // per path, into points/3
    std::vector<double> points;             // xyz per path point
    std::vector<double> colors;             // rgba per path
    std::vector<double> widths;             // per path
};

FlatScene gather(const Scene3DVG& scene) {
    FlatScene flat;
    std::size_t off = 0;
    for (const Path3D& path : scene.paths) {
        flat.point_offset.push_back(off);
        for (const Vec3& p : path.points) {
            flat.points.insert(flat.points.end(), {p.x, p.y, p.z});
            ++off;
        }
        flat.colors.insert(flat.colors.end(), path.color.begin(), path.color.end());
        flat.widths.push_back(path.stroke_width);
    }
    return flat;
}

void scatter(const FlatScene& flat, Scene3DVG& scene) {
    for (std::size_t pi = 0; pi < scene.paths.size(); ++pi) {
        Path3D& path = scene.paths[pi];
        const std::size_t off = flat.point_offset[pi];
        for (std::size_t i = 0; i < path.points.size(); ++i) {
            path.points[i] = {flat.points[3 * (off + i)], flat.points[3 * (off + i) + 1],
                              flat.points[3 * (off + i) + 2]};
        }
        for (int c = 0; c < 4; ++c) path.color[c] = flat.colors[4 * pi + c];
        path.stroke_width = flat.widths[pi];
    }
}

std::vector<double> flatten_net(const NetParams& p) {
    std::vector<double> out;
    for (const auto* v : {&p.w1, &p.b1, &p.w2, &p.b2, &p.w3, &p.b3})
        out.insert(out.end(), v->begin(), v->end());
    return out;
}

void unflatten_net(const std::vector<double>& flat, NetParams& p) {
    std::size_t off = 0;
    for (auto* v : {&p.w1, &p.b1, &p.w2, &p.b2, &p.w3, &p.b3}) {
        std::copy(flat.begin() + off, flat.begin() + off + v->size(), v->begin());
        off += v->size();
    }
}

// Gradient of the projected normalized coordinates w.r.t. the 3D point.
struct ProjJac {
    Vec3 d_dx, d_dy;
};

ProjJac projection_jacobian(const Vec3& P, const Camera& cam, const CameraBasis& basis) {
    const Vec3 rel = P - cam.position;
    const double xc = dot(rel, basis.right);
    const double yc = dot(rel, basis.up);
    const double zc = dot(rel, basis.forward);
    const double f = focal_length(cam);
    ProjJac jac;
    jac.d_dx = (f / zc) * basis.right - (f * xc / (zc * zc)) * basis.forward;
    jac.d_dy = (f / zc) * basis.up - (f * yc / (zc * zc)) * basis.forward;
    return jac;
}

struct ViewImportance {
    std::vector<double> importance;                       // per flat curve
    std::vector<std::vector<ImportanceNet::Tape>> tapes;  // per flat curve
    std::set<int> non_important;
};

ViewImportance view_importance(const ImportanceNet& net, const Scene3DVG& scene,
                               const Camera& cam, const VisibilityConfig& vis) {
    ViewImportance out;
    const std::size_t nc = scene.curve_count();
    out.importance.resize(nc, 0.0);
    out.tapes.resize(nc);
    for (std::size_t ci = 0; ci < nc; ++ci) {
        const std::vector<Vec3> pts = sample_points(scene.curve(ci), vis.k_points);
        double mean = 0.0;
        out.tapes[ci].resize(pts.size());
        for (std::size_t s = 0; s < pts.size(); ++s)
            mean += net.importance_tape(pts[s], cam, out.tapes[ci][s]);
        mean /= static_cast<double>(pts.size());
        out.importance[ci] = mean;
        if (mean < vis.tau_alpha) out.non_important.insert(static_cast<int>(ci));
    }
    return out;
}

}  // namespace

// ---- fitting -------------------------------------------------------------

FitResult fit(const Scene3DVG& init, GuidanceSource& guidance,
              const ScheduleConfig& schedule, const FitConfig& cfg,
              const CheckpointFn& checkpoint) {
    validate_schedule(schedule);
    validate_loss(cfg.loss);
    if (cfg.total_steps < 1 || cfg.batch_cameras < 1)
        throw ConfigError("fit needs total_steps >= 1 and batch_cameras >= 1");
    if (init.paths.empty()) throw ConfigError("fit needs a non-empty initial scene");

    Rng t_rng(derive_seed(cfg.seed, "t"));
    Rng cam_rng(derive_seed(cfg.seed, "cam"));
    ImportanceNet net(derive_seed(cfg.seed, "net"));

    Scene3DVG scene = init;
    FlatScene flat = gather(scene);
    std::vector<double> net_params = flatten_net(net.params());

    AdamState st_points, st_colors, st_widths, st_net;
    std::vector<LogRecord> log;
    double visible_fraction = 1.0;

    const std::size_t n_paths = scene.paths.size();
    const std::size_t n_curves = scene.curve_count();
    std::vector<int> curve_base(n_paths, 0);
    for (std::size_t p = 1; p < n_paths; ++p)
        curve_base[p] = curve_base[p - 1] + scene.paths[p - 1].curve_count();

    for (int step = 0; step < cfg.total_steps; ++step) {
        const int t_drawn = anneal_timestep(step, schedule, t_rng);
        std::vector<GuidanceSample> batch =
            guidance.batch(step, t_drawn, cfg.batch_cameras, cam_rng);
        if (batch.empty()) throw RunError("guidance returned an empty batch");
        const double inv_b = 1.0 / static_cast<double>(batch.size());

        std::vector<double> g_points(flat.points.size(), 0.0);
        std::vector<double> g_colors(flat.colors.size(), 0.0);
        std::vector<double> g_widths(flat.widths.size(), 0.0);
        NetParams g_net = net.zero_grads();

        double loss_total = 0.0, loss_structural = 0.0, loss_semantic = 0.0;
        double importance_sum = 0.0;
        std::size_t importance_count = 0;
        const bool vote_step = cfg.train_visibility && cfg.vote_every > 0 &&
                               step % cfg.vote_every == 0;
        std::size_t votes_visible = 0, votes_total = 0;

        for (const GuidanceSample& sample : batch) {
            const Camera& cam = sample.camera;
            const CameraBasis basis = camera_basis(cam);

            ViewImportance vi;
            std::vector<OpacityState> ops;
            if (cfg.train_visibility) {
                vi = view_importance(net, scene, cam, cfg.visibility);
                ops = resolve_opacities(scene, vi.importance, vi.non_important, {},
                                        VisibilityMode::Train, cfg.visibility);
                for (double im : vi.importance) importance_sum += im;
                importance_count += vi.importance.size();
            } else {
                ops.assign(n_paths, OpacityState::fixed_high());
            }

            if (vote_step) {
                for (std::size_t ci = 0; ci < n_curves; ++ci) {
                    const VoteResult vote = antipodal_vote(
                        scene.curve(ci), cam, sample.depth_front, sample.depth_back,
                        cfg.visibility);
                    votes_visible += vote.visible ? 1 : 0;
                    ++votes_total;
                }
            }

            std::vector<double> op_values(n_paths, 1.0);
            for (std::size_t p = 0; p < n_paths; ++p) op_values[p] = ops[p].value;

            std::vector<int> skipped;
            Scene2D s2 = project_scene(scene, cam, op_values, &skipped);
            Canvas canvas{cam.width, cam.height, {1.0, 1.0, 1.0}};
            Rasterizer raster(std::move(s2), canvas);
            const Image& img4 = raster.forward();
            const Image rendered = take_channels(img4, 3);

            Image grad3;
            const LossTerms terms = image_loss(rendered, sample.image, cfg.loss, &grad3);
            loss_total += inv_b * terms.total;
            loss_structural += inv_b * terms.structural;
            loss_semantic += inv_b * terms.semantic;

            Image grad4(cam.width, cam.height, 4, 0.0);
            for (int y = 0; y < cam.height; ++y)
                for (int x = 0; x < cam.width; ++x)
                    for (int c = 0; c < 3; ++c)
                        grad4.at(x, y, c) = inv_b * grad3.at(x, y, c);
            const ParamGrads grads2d = raster.backward(grad4);

            std::vector<double> d_opacity(n_paths, 0.0);
            const Scene2D& scene2d = raster.scene();
            for (std::size_t e = 0; e < scene2d.elements.size(); ++e) {
                const ElementGrads& eg = grads2d[e];
                const int pi = std::visit([](const auto& el) { return el.path_index; },
                                          scene2d.elements[e]);
                const Path3D& path = scene.paths[pi];
                const std::size_t off = flat.point_offset[pi];
                for (std::size_t i = 0; i < eg.d_points.size(); ++i) {
                    const Vec2 g2 = eg.d_points[i];
                    if (g2.x == 0.0 && g2.y == 0.0) continue;
                    const ProjJac jac = projection_jacobian(path.points[i], cam, basis);
                    const Vec3 g3 = g2.x * jac.d_dx + g2.y * jac.d_dy;
                    g_points[3 * (off + i)] += g3.x;
                    g_points[3 * (off + i) + 1] += g3.y;
                    g_points[3 * (off + i) + 2] += g3.z;
                }
                for (int c = 0; c < 4; ++c) g_colors[4 * pi + c] += eg.d_color[c];
                g_widths[pi] += eg.d_width;
                d_opacity[pi] += eg.d_opacity;
            }

            if (cfg.train_visibility) {
                for (std::size_t pi = 0; pi < n_paths; ++pi) {
                    if (ops[pi].mode != OpacityState::Mode::Trained) continue;
                    if (d_opacity[pi] == 0.0) continue;
                    const Path3D& path = scene.paths[pi];
                    const int nc = path.curve_count();
                    const int k = cfg.visibility.k_points;
                    const double d_per_sample = d_opacity[pi] / (nc * k);
                    for (int cj = 0; cj < nc; ++cj) {
                        const int ci = curve_base[pi] + cj;
                        for (int s = 0; s < k; ++s) {
                            Vec3 d_point{0.0, 0.0, 0.0};
                            net.backward(vi.tapes[ci][s], d_per_sample, g_net, &d_point);
                            const double ts = static_cast<double>(s) / (k - 1);
                            const std::array<double, 4> bw = bernstein_weights(ts);
                            for (int j = 0; j < 4; ++j) {
                                const std::size_t local =
                                    path.kind == PathKind::Iconography
                                        ? (3 * cj + j) % 12
                                        : static_cast<std::size_t>(j);
                                const std::size_t base = 3 * (flat.point_offset[pi] + local);
                                g_points[base] += bw[j] * d_point.x;
                                g_points[base + 1] += bw[j] * d_point.y;
                                g_points[base + 2] += bw[j] * d_point.z;
                            }
                        }
                    }
                }
            }
        }
        // The image gradients already carry 1/B; the opacity chain inherited
        // it through d_opacity, so g_net needs no extra scaling here.

        if (vote_step && votes_total > 0)
            visible_fraction = static_cast<double>(votes_visible) /
                               static_cast<double>(votes_total);

        adam_step(st_points, flat.points, g_points, cfg.adam.lr_points, cfg.adam);
        if (cfg.train_colors) {
            adam_step(st_colors, flat.colors, g_colors, cfg.adam.lr_color, cfg.adam);
            for (double& c : flat.colors) c = std::clamp(c, 0.0, 1.0);
        }
        if (cfg.train_widths) {
            adam_step(st_widths, flat.widths, g_widths, cfg.adam.lr_width, cfg.adam);
            for (double& w : flat.widths) w = std::max(w, 0.05);
        }
        if (cfg.train_visibility) {
            adam_step(st_net, net_params, flatten_net(g_net), cfg.adam.lr_net, cfg.adam);
            unflatten_net(net_params, net.params());
        }
        scatter(flat, scene);

        const int t_used = batch.front().t;
        if (cfg.log_every > 0 && (step % cfg.log_every == 0 || step == cfg.total_steps - 1)) {
            LogRecord rec;
            rec.step = step;
            rec.loss_total = loss_total;
            rec.loss_structural = loss_structural;
            rec.loss_semantic = loss_semantic;
            rec.t = t_used;
            rec.cfg_scale = cfg_scale(t_used, schedule);
            rec.mean_importance =
                importance_count > 0
                    ? importance_sum / static_cast<double>(importance_count)
                    : 1.0;
            rec.visible_fraction = visible_fraction;
            log.push_back(rec);
        }
        if (checkpoint && cfg.checkpoint_every > 0 &&
            ((step + 1) % cfg.checkpoint_every == 0 || step == cfg.total_steps - 1))
            checkpoint(step, scene, net);
    }

    return FitResult{std::move(scene), std::move(net), std::move(log)};
}

std::string log_to_jsonl(const std::vector<LogRecord>& log) {
    std::string out;
    for (const LogRecord& rec : log) {
        json j;
        j["step"] = rec.step;
        j["loss_total"] = rec.loss_total;
        j["loss_per_term"] = {{"structural", rec.loss_structural},
                              {"semantic", rec.loss_semantic}};
        j["t"] = rec.t;
        j["cfg_scale"] = rec.cfg_scale;
        j["mean_importance"] = rec.mean_importance;
        j["visible_fraction"] = rec.visible_fraction;
        out += j.dump();
        out += '\n';
    }
    return out;
}

// ---- evaluation ----------------------------------------------------------

Image render_inference_view(const Scene3DVG& scene, const ImportanceNet& net,
                            const Camera& cam, const VisibilityConfig& vis,
                            const DepthProvider& depths) {
    const ImportanceFilterResult filter = curve_importance_filter(net, scene, cam, vis);
    std::vector<bool> votes;
    if (depths) {
        const auto [front, back] = depths(cam);
        votes.resize(scene.curve_count());
        for (std::size_t ci = 0; ci < scene.curve_count(); ++ci)
            votes[ci] = antipodal_vote(scene.curve(ci), cam, front, back, vis).visible;
    }
    const std::vector<OpacityState> ops =
        resolve_opacities(scene, filter.importance, filter.non_important, votes,
                          VisibilityMode::Inference, vis);
    std::vector<double> op_values(scene.paths.size(), 1.0);
    for (std::size_t p = 0; p < scene.paths.size(); ++p) op_values[p] = ops[p].value;
    std::vector<int> skipped;
    Scene2D s2 = project_scene(scene, cam, op_values, &skipped);
    Rasterizer raster(std::move(s2), Canvas{cam.width, cam.height, {1.0, 1.0, 1.0}});
    return take_channels(raster.forward(), 3);
}

double adjacent_view_consistency(const Scene3DVG& scene, const ImportanceNet& net,
                                 const std::vector<Camera>& ring,
                                 const std::string& distance,
                                 const VisibilityConfig& vis,
                                 const DepthProvider& depths) {
    if (ring.size() < 3)
        throw std::invalid_argument("adjacent_view_consistency needs at least 3 cameras");
    std::vector<Image> views;
    views.reserve(ring.size());
    for (const Camera& cam : ring)
        views.push_back(render_inference_view(scene, net, cam, vis, depths));
    double sum = 0.0;
    for (std::size_t i = 0; i < views.size(); ++i) {
        const std::size_t j = (i + 1) % views.size();
        sum += image_distance(distance, views[i], views[j], nullptr);
    }
    return sum / static_cast<double>(views.size());
}

double chamfer_distance(const Scene3DVG& a, const Scene3DVG& b, int samples_per_curve) {
    std::vector<Vec3> pa, pb;
    for (std::size_t ci = 0; ci < a.curve_count(); ++ci) {
        const auto pts = sample_points(a.curve(ci), samples_per_curve);
        pa.insert(pa.end(), pts.begin(), pts.end());
    }
    for (std::size_t ci = 0; ci < b.curve_count(); ++ci) {
        const auto pts = sample_points(b.curve(ci), samples_per_curve);
        pb.insert(pb.end(), pts.begin(), pts.end());
    }
    if (pa.empty() || pb.empty())
        throw std::invalid_argument("chamfer_distance needs non-empty scenes");
    const auto directed = [](const std::vector<Vec3>& from, const std::vector<Vec3>& to) {
        double total = 0.0;
        for (const Vec3& p : from) {
            double best = std::numeric_limits<double>::max();
            for (const Vec3& q : to) {
                const Vec3 d = p - q;
                best = std::min(best, dot(d, d));
            }
            total += std::sqrt(best);
        }
        return total / static_cast<double>(from.size());
    };
    return 0.5 * (directed(pa, pb) + directed(pb, pa));
}

}  // namespace c3vg
