#include <doctest.h>

#include <cmath>
#include <numbers>
#include <string>

#include "curve3dvg/camera.hpp"
#include "curve3dvg/errors.hpp"
#include "curve3dvg/project.hpp"
#include "curve3dvg/rng.hpp"
#include "support/test_support.hpp"

using namespace c3vg;

namespace {

Camera z_axis_cam(double distance = 4.0) {
    Camera cam;
    cam.position = {0.0, 0.0, -distance};
    cam.look_at = {0.0, 0.0, 0.0};
    cam.up = {0.0, 1.0, 0.0};
    return cam;
}

BezierCurve3D random_curve(Rng& rng, double spread, const Vec3& center = {0, 0, 0}) {
    BezierCurve3D c;
    for (auto& p : c.points)
        p = center + Vec3{rng.uniform(-spread, spread), rng.uniform(-spread, spread),
                          rng.uniform(-spread, spread)};
    return c;
}

}  // namespace

TEST_CASE("project_point maps known geometry exactly") {
    const Camera cam = z_axis_cam();
    // A point on the optical axis projects to the image center; its depth is
    // the distance along the view axis.
    const ProjectedPoint center = project_point(cam, Vec3{0, 0, 0});
    CHECK(center.d_xy.x == doctest::Approx(0.0));
    CHECK(center.d_xy.y == doctest::Approx(0.0));
    CHECK(center.d_z == doctest::Approx(4.0));

    // Looking from -z toward +z with up = +y, the camera's right axis
    // (forward x up) points along world -x. A point at the fov/2 boundary on
    // world -x therefore lands at normalized x = 1.
    const double half_angle = 0.5 * cam.fov_deg * std::numbers::pi / 180.0;
    const ProjectedPoint pe =
        project_point(cam, Vec3{-4.0 * std::tan(half_angle), 0.0, 0.0});
    CHECK(pe.d_xy.x == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(pe.d_xy.y == doctest::Approx(0.0));
    CHECK(pe.d_z == doctest::Approx(4.0));

    // Similar triangles: depth 5, lateral offset 0.5 along camera-right,
    // f = 1 at fov 90.
    Camera wide = cam;
    wide.fov_deg = 90.0;
    wide.position = {0.0, 0.0, -5.0};
    const ProjectedPoint tri = project_point(wide, Vec3{-0.5, 0.0, 0.0});
    CHECK(tri.d_xy.x == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(tri.d_z == doctest::Approx(5.0));
}

TEST_CASE("depth sign follows the view axis") {
    const Camera cam = z_axis_cam();
    CHECK(project_point(cam, Vec3{0.3, -0.2, 1.0}).d_z == doctest::Approx(5.0));
    // Moving the camera instead of the point changes depth, not the image
    // position, when the shift is along the axis.
    Camera nearer = cam;
    nearer.position = {0.0, 0.0, -2.0};
    CHECK(project_point(nearer, Vec3{0, 0, 0}).d_z == doctest::Approx(2.0));
}

TEST_CASE("points behind or at the camera near plane throw BehindCameraError") {
    const Camera cam = z_axis_cam();
    CHECK_THROWS_AS(project_point(cam, Vec3{0, 0, -4.5}), BehindCameraError);
    CHECK_THROWS_AS(project_point(cam, Vec3{0, 0, -4.0}), BehindCameraError);
    CHECK_THROWS_AS(project_point(cam, Vec3{0, 0, -4.0 + 0.5 * kNearEpsilon}),
                    BehindCameraError);
    CHECK_NOTHROW(project_point(cam, Vec3{0, 0, -3.99}));

    BezierCurve3D c;
    c.points = {Vec3{0, 0, 0}, Vec3{0.1, 0, 0}, Vec3{0, 0, -4.2}, Vec3{0.2, 0, 0}};
    try {
        project_curve(cam, c);
        FAIL("expected BehindCameraError");
    } catch (const BehindCameraError& e) {
        CHECK(e.control_point_index == 2);
        CHECK(std::string(e.what()).find("control point 2") != std::string::npos);
    }
}

TEST_CASE("rational bezier equals the projection of the 3D curve pointwise") {
    // The exactness identity: projecting eval_curve3d(t) agrees with
    // evaluating the projected rational curve at the same t, because the
    // rational weights are the control-point depths.
    Rng rng(123);
    const Camera cam = z_axis_cam();
    for (int trial = 0; trial < 20; ++trial) {
        const BezierCurve3D c = random_curve(rng, 0.6);
        const RationalBezier2D r = project_curve(cam, c);
        for (int i = 0; i <= 32; ++i) {
            const double t = i / 32.0;
            const Vec2 direct = project_point(cam, eval_curve3d(c, t)).d_xy;
            const Vec2 rational = rational_eval(r, t);
            CHECK(rational.x == doctest::Approx(direct.x).epsilon(1e-10));
            CHECK(rational.y == doctest::Approx(direct.y).epsilon(1e-10));
        }
    }
}

TEST_CASE("rational evaluation matches an independent de Casteljau oracle") {
    Rng rng(321);
    const Camera cam = z_axis_cam();
    for (int trial = 0; trial < 10; ++trial) {
        const BezierCurve3D c = random_curve(rng, 0.6);
        const RationalBezier2D r = project_curve(cam, c);
        for (double t : {0.0, 0.2, 0.5, 0.8, 1.0}) {
            const Vec2 ours = rational_eval(r, t);
            const Vec2 oracle = testsupport::decasteljau_rational(r, t);
            CHECK(ours.x == doctest::Approx(oracle.x).epsilon(1e-12));
            CHECK(ours.y == doctest::Approx(oracle.y).epsilon(1e-12));
        }
    }
}

TEST_CASE("rational_eval rejects parameters outside the unit interval") {
    const Camera cam = z_axis_cam();
    Rng rng(5);
    const RationalBezier2D r = project_curve(cam, random_curve(rng, 0.3));
    CHECK_THROWS_AS(rational_eval(r, -0.01), std::domain_error);
    CHECK_THROWS_AS(rational_eval(r, 1.01), std::domain_error);
}

TEST_CASE("approx_cubic keeps the projected control points") {
    Rng rng(55);
    const Camera cam = z_axis_cam();
    const BezierCurve3D c = random_curve(rng, 0.5);
    const RationalBezier2D r = project_curve(cam, c);
    const Cubic2D approx = approx_cubic(r);
    for (int i = 0; i < 4; ++i) {
        CHECK(approx.points[i].x == doctest::Approx(r.control[i].d_xy.x));
        CHECK(approx.points[i].y == doctest::Approx(r.control[i].d_xy.y));
    }
    // Endpoints of a Bezier are its outer control points, so dropping the
    // rational weights is exact at t = 0 and t = 1.
    CHECK(eval_cubic2d(approx, 0.0).x ==
          doctest::Approx(rational_eval(r, 0.0).x).epsilon(1e-12));
    CHECK(eval_cubic2d(approx, 1.0).y ==
          doctest::Approx(rational_eval(r, 1.0).y).epsilon(1e-12));
}

TEST_CASE("approx_cubic is exact when all depths are equal") {
    // Control points in a plane orthogonal to the view axis share one depth;
    // equal weights make the rational curve an ordinary cubic.
    const Camera cam = z_axis_cam();
    BezierCurve3D c;
    c.points = {Vec3{-0.5, 0.1, 0.0}, Vec3{-0.2, 0.7, 0.0}, Vec3{0.3, -0.6, 0.0},
                Vec3{0.5, 0.2, 0.0}};
    CHECK(projection_error(cam, c, 128) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("projection error is small in the far-field regime") {
    // Control points in a radius-0.5 ball seen from distance 5: the depth
    // spread is small relative to the mean depth, so the weight-free cubic
    // tracks the rational projection closely.
    Rng rng(77);
    const Camera cam = z_axis_cam(5.0);
    for (int trial = 0; trial < 25; ++trial) {
        BezierCurve3D c;
        for (auto& p : c.points) {
            do {
                p = {rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5),
                     rng.uniform(-0.5, 0.5)};
            } while (p.norm() > 0.5);
        }
        CHECK(projection_error(cam, c, 64) < 2e-2);
    }
}

TEST_CASE("projection error grows in the near field") {
    // Deep curve close to the camera: strong perspective on the inner control
    // points makes the weight-free cubic visibly wrong.
    const Camera cam = z_axis_cam(1.2);
    BezierCurve3D c;
    c.points = {Vec3{-0.4, 0.0, -0.9}, Vec3{-0.2, 0.5, 0.8}, Vec3{0.2, -0.5, -0.9},
                Vec3{0.4, 0.0, 0.8}};
    CHECK(projection_error(cam, c, 64) > 5e-2);
}

TEST_CASE("projection_error needs a dense enough sampling") {
    const Camera cam = z_axis_cam();
    Rng rng(88);
    const BezierCurve3D c = random_curve(rng, 0.3);
    CHECK_THROWS_AS(projection_error(cam, c, 15), std::invalid_argument);
    CHECK_NOTHROW(projection_error(cam, c, 16));
}
