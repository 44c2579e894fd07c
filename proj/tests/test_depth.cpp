#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "platoon/depth.hpp"

using namespace platoon;
using namespace platoon::depth;
using perception::RelativeDepthMap;

namespace {

RelativeDepthMap grid(int w, int h, std::vector<double> values)
{
    RelativeDepthMap m;
    m.width = w;
    m.height = h;
    m.values = std::move(values);
    m.ref_row = h - 1;
    m.ref_col = w / 2;
    return m;
}

// D11 = (x1, y1), D21 = (x1+1, y1), D12 = (x1, y1+1), D22 = (x1+1, y1+1).
RelativeDepthMap two_by_two(double d11, double d21, double d12, double d22)
{
    return grid(2, 2, {d11, d21, d12, d22});
}

}  // namespace

TEST_CASE("calibrate examples")
{
    CHECK(calibrate(3.3, {1.2, 3.3}) == doctest::Approx(1.2));
    CHECK(calibrate(2.0, {1.0, 4.0}) == 0.5);
    for (double k : {0.1, 1.7, 42.0})
        CHECK(calibrate(2.0 * k, {1.0, 4.0 * k}) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK_THROWS_AS(calibrate(0.0, {1.0, 1.0}), InvalidInput);
    CHECK_THROWS_AS(calibrate(1.0, {-1.0, 1.0}), InvalidInput);
    CHECK_THROWS_AS(calibrate(1.0, {1.0, 0.0}), InvalidInput);
}

TEST_CASE("calibrate is linear in the relative value")
{
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.01, 10);
    for (int i = 0; i < 500; ++i) {
        const CalibrationAnchor a{u(rng), u(rng)};
        const double x = u(rng), y = u(rng);
        CHECK(calibrate(x + y, a) == doctest::Approx(calibrate(x, a) + calibrate(y, a)).epsilon(1e-12));
    }
}

TEST_CASE("bilinear examples")
{
    const auto m = two_by_two(1, 2, 3, 4);
    CHECK(bilinear_depth(m, {0.0, 0.0}) == 1.0);
    CHECK(bilinear_depth(m, {0.5, 0.5}) == 2.5);
    CHECK(bilinear_depth(m, {0.25, 0.75}) == 2.75);
    // Exactly on the last column/row there is no full neighbourhood.
    CHECK_THROWS_AS(bilinear_depth(m, {1.0, 0.0}), InvalidInput);
    CHECK_THROWS_AS(bilinear_depth(m, {0.0, -0.1}), InvalidInput);
}

TEST_CASE("bilinear is bounded by the neighbours and exact on affine fields")
{
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> v(0.1, 10), f(0.0, 1.0), coef(-3, 3);
    for (int i = 0; i < 1000; ++i) {
        const double d[4] = {v(rng), v(rng), v(rng), v(rng)};
        const auto m = two_by_two(d[0], d[1], d[2], d[3]);
        const double dx = std::min(f(rng), 0.999999), dy = std::min(f(rng), 0.999999);
        const double out = bilinear_depth(m, {dx, dy});
        CHECK(out >= *std::min_element(d, d + 4) - 1e-12);
        CHECK(out <= *std::max_element(d, d + 4) + 1e-12);
    }
    for (int i = 0; i < 200; ++i) {
        const double a = 20 + coef(rng), b = coef(rng), c = coef(rng);
        std::vector<double> vals(6 * 5);
        for (int r = 0; r < 5; ++r)
            for (int col = 0; col < 6; ++col) vals[r * 6 + col] = a + b * r + c * col;
        const auto m = grid(6, 5, vals);
        const double x = f(rng) * 4.99, y = f(rng) * 3.99;
        CHECK(bilinear_depth(m, {x, y}) == doctest::Approx(a + b * y + c * x).epsilon(1e-12));
    }
}

TEST_CASE("depth_at_centroid composes lookup and calibration")
{
    perception::CameraModel cam;
    cam.width = 8;
    cam.height = 6;
    // Map at the camera resolution: map coordinates equal image coordinates.
    std::vector<double> vals(8 * 6, 2.4);
    auto m = grid(8, 6, vals);
    m.values[2 * 8 + 3] = 1.2;
    const CalibrationAnchor anchor{1.0, 1.2};
    CHECK(depth_at_centroid(m, anchor, 3.0, 2.0, cam).value() == doctest::Approx(1.0));
    // Fractional position inside a constant region.
    CHECK(depth_at_centroid(m, anchor, 5.3, 3.6, cam).value() == doctest::Approx(2.0));
    CHECK_FALSE(depth_at_centroid(m, anchor, 7.5, 2.0, cam).has_value());
    CHECK_FALSE(depth_at_centroid(m, anchor, -1.0, 2.0, cam).has_value());

    // Resolution mismatch: image 16x12 onto the 8x6 map halves the coordinates.
    cam.width = 16;
    cam.height = 12;
    const auto q = to_map_coordinates(6.0, 4.0, cam, m);
    CHECK(q.x_sub == doctest::Approx(3.0));
    CHECK(q.y_sub == doctest::Approx(2.0));
}

TEST_CASE("pure-scale map recovers metric depth for any frame scale")
{
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> uk(0.5, 2.0);
    perception::CameraModel cam;
    cam.width = 10;
    cam.height = 10;
    for (int i = 0; i < 100; ++i) {
        const double k = uk(rng);
        // Entity at true 2.0 m everywhere except the anchor row at 1.0 m.
        std::vector<double> vals(100, k * 2.0);
        for (int c = 0; c < 10; ++c) vals[90 + c] = k * 1.0;
        const auto m = grid(10, 10, vals);
        const auto d = depth_at_centroid(m, anchor_from_map(m), 4.4, 3.7, cam);
        REQUIRE(d.has_value());
        CHECK(std::abs(*d - 2.0) < 1e-9);
    }
}

TEST_CASE("depth_at_track reads the filtered centroid")
{
    perception::CameraModel cam;
    cam.width = 8;
    cam.height = 6;
    auto m = grid(8, 6, std::vector<double>(48, 3.0));
    tracker::Track t;
    t.kf.mean.setZero();
    t.kf.mean(tracker::kXc) = 4.5;
    t.kf.mean(tracker::kYc) = 2.5;
    t.kf.mean(tracker::kS) = 4.0;
    t.kf.mean(tracker::kA) = 1.0;
    CHECK(depth_at_track(m, {1.5, 3.0}, t, cam).value() == doctest::Approx(1.5));
    t.kf.mean(tracker::kXc) = 100.0;
    CHECK_FALSE(depth_at_track(m, {1.5, 3.0}, t, cam).has_value());
}
