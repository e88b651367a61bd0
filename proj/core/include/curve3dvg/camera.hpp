#pragma once

#include "curve3dvg/geometry.hpp"
#include "curve3dvg/rng.hpp"

namespace c3vg {

// Perspective camera. The derived basis looks down +forward with x along
// +right and y along +up_cam; fov_deg is the full field of view across the
// shorter image axis, so normalized image coordinates span [-1,1] there.
struct Camera {
    Vec3 position{0.0, -4.0, 0.0};
    Vec3 look_at{0.0, 0.0, 0.0};
    Vec3 up{0.0, 0.0, 1.0};
    double fov_deg = 27.0;
    int width = 512;
    int height = 512;
};

struct CameraBasis {
    Vec3 right;
    Vec3 up;
    Vec3 forward;
};

// Orthonormal view basis. Throws std::invalid_argument when position equals
// look_at, up is (near) parallel to the view direction, or fov is outside
// (0, 180).
CameraBasis camera_basis(const Camera& cam);

// f such that a direction at fov/2 off axis maps to |d_xy| = 1.
double focal_length(const Camera& cam);

// Camera position reflected through the look-at target; same up, same
// intrinsics. Defines the "back" view used by depth voting.
Camera antipodal_camera(const Camera& cam);

bool cameras_equal(const Camera& a, const Camera& b, double tol = 1e-9);

// Pose sampling ranges. Elevation is the polar angle measured from the +z
// axis (0 = straight above the scene), azimuth rotates about +z.
struct CameraSamplerConfig {
    double radius_min = 3.5;
    double radius_max = 5.0;
    double azimuth_min_deg = -180.0;
    double azimuth_max_deg = 180.0;
    double elevation_min_deg = 45.0;
    double elevation_max_deg = 105.0;
    double fov_min_deg = 18.0;
    double fov_max_deg = 36.0;
    int image_width = 512;
    int image_height = 512;
};

// Uniform draw from the configured ranges; look_at = origin, up = world +z.
// Throws std::invalid_argument when any range has lo > hi.
Camera sample_camera(Rng& rng, const CameraSamplerConfig& config);

// k cameras at equal azimuth spacing using the midpoints of the sampler
// ranges (radius 4.25, elevation 75 deg, fov 27 deg).
std::vector<Camera> ring_cameras(int k, const CameraSamplerConfig& config = {});

}  // namespace c3vg
