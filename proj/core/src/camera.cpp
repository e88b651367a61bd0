#include "curve3dvg/camera.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace c3vg {

static constexpr double kDegToRad = std::numbers::pi / 180.0;

CameraBasis camera_basis(const Camera& cam) {
    if (!(cam.fov_deg > 0.0 && cam.fov_deg < 180.0))
        throw std::invalid_argument("camera fov_deg outside (0, 180)");
    const Vec3 d = cam.look_at - cam.position;
    const double dn = d.norm();
    if (dn <= 0.0)
        throw std::invalid_argument("camera position equals look_at");
    const Vec3 forward = (1.0 / dn) * d;
    const Vec3 r = cross(forward, cam.up);
    const double rn = r.norm();
    if (rn <= 1e-9)
        throw std::invalid_argument("camera up parallel to view direction");
    const Vec3 right = (1.0 / rn) * r;
    return {right, cross(right, forward), forward};
}

double focal_length(const Camera& cam) {
    return 1.0 / std::tan(0.5 * cam.fov_deg * kDegToRad);
}

Camera antipodal_camera(const Camera& cam) {
    Camera back = cam;
    back.position = 2.0 * cam.look_at - cam.position;
    return back;
}

bool cameras_equal(const Camera& a, const Camera& b, double tol) {
    return (a.position - b.position).norm() <= tol &&
           (a.look_at - b.look_at).norm() <= tol &&
           (a.up - b.up).norm() <= tol &&
           std::abs(a.fov_deg - b.fov_deg) <= tol && a.width == b.width &&
           a.height == b.height;
}

static void check_range(double lo, double hi, const char* name) {
    if (lo > hi)
        throw std::invalid_argument(std::string("camera sampler range lo > hi: ") + name);
}

Camera sample_camera(Rng& rng, const CameraSamplerConfig& config) {
    check_range(config.radius_min, config.radius_max, "radius");
    check_range(config.azimuth_min_deg, config.azimuth_max_deg, "azimuth");
    check_range(config.elevation_min_deg, config.elevation_max_deg, "elevation");
    check_range(config.fov_min_deg, config.fov_max_deg, "fov");

    const double radius = rng.uniform(config.radius_min, config.radius_max);
    const double azimuth =
        rng.uniform(config.azimuth_min_deg, config.azimuth_max_deg) * kDegToRad;
    const double elevation =
        rng.uniform(config.elevation_min_deg, config.elevation_max_deg) * kDegToRad;
    const double fov = rng.uniform(config.fov_min_deg, config.fov_max_deg);

    Camera cam;
    cam.position = {radius * std::sin(elevation) * std::cos(azimuth),
                    radius * std::sin(elevation) * std::sin(azimuth),
                    radius * std::cos(elevation)};
    cam.look_at = {0.0, 0.0, 0.0};
    cam.up = {0.0, 0.0, 1.0};
    cam.fov_deg = fov;
    cam.width = config.image_width;
    cam.height = config.image_height;
    return cam;
}

std::vector<Camera> ring_cameras(int k, const CameraSamplerConfig& config) {
    const double radius = 0.5 * (config.radius_min + config.radius_max);
    const double elevation =
        0.5 * (config.elevation_min_deg + config.elevation_max_deg) * kDegToRad;
    const double fov = 0.5 * (config.fov_min_deg + config.fov_max_deg);

    std::vector<Camera> out;
    out.reserve(k);
    for (int i = 0; i < k; ++i) {
        const double azimuth = 2.0 * std::numbers::pi * double(i) / double(k);
        Camera cam;
        cam.position = {radius * std::sin(elevation) * std::cos(azimuth),
                        radius * std::sin(elevation) * std::sin(azimuth),
                        radius * std::cos(elevation)};
        cam.look_at = {0.0, 0.0, 0.0};
        cam.up = {0.0, 0.0, 1.0};
        cam.fov_deg = fov;
        cam.width = config.image_width;
        cam.height = config.image_height;
        out.push_back(cam);
    }
    return out;
}

}  // namespace c3vg
