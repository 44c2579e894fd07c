#include "platoon/depth.hpp"

#include <cmath>

namespace platoon::depth {

void CalibrationAnchor::validate() const
{
    if (!(ref_depth > 0.0) || !(ref_relative > 0.0) || !std::isfinite(ref_depth) ||
        !std::isfinite(ref_relative)) {
        throw InvalidInput("calibration anchor values must be positive and finite");
    }
}

double calibrate(double relative, const CalibrationAnchor& anchor)
{
    anchor.validate();
    if (!(relative > 0.0) || !std::isfinite(relative))
        throw InvalidInput("calibrate: relative depth must be positive and finite");
    return relative * anchor.ref_depth / anchor.ref_relative;
}

namespace {

bool has_neighbourhood(const perception::RelativeDepthMap& map, DepthQuery q)
{
    return q.x_sub >= 0.0 && q.y_sub >= 0.0 && std::floor(q.x_sub) + 1.0 <= map.width - 1 &&
           std::floor(q.y_sub) + 1.0 <= map.height - 1;
}

}  // namespace

double bilinear_depth(const perception::RelativeDepthMap& map, DepthQuery q)
{
    if (!has_neighbourhood(map, q)) throw InvalidInput("bilinear_depth: query outside depth map");

    const int x1 = static_cast<int>(std::floor(q.x_sub));
    const int y1 = static_cast<int>(std::floor(q.y_sub));
    const double dx = q.x_sub - x1;
    const double dy = q.y_sub - y1;

    // D_ij: i indexes columns, j rows.
    const double d11 = map.at(y1, x1);
    const double d21 = map.at(y1, x1 + 1);
    const double d12 = map.at(y1 + 1, x1);
    const double d22 = map.at(y1 + 1, x1 + 1);
    return (1.0 - dx) * (1.0 - dy) * d11 + dx * (1.0 - dy) * d21 + (1.0 - dx) * dy * d12 +
           dx * dy * d22;
}

CalibrationAnchor anchor_from_map(const perception::RelativeDepthMap& map)
{
    return {map.ref_true_depth, map.ref_value()};
}

DepthQuery to_map_coordinates(double x_c, double y_c, const perception::CameraModel& camera,
                              const perception::RelativeDepthMap& map)
{
    return {x_c * map.width / camera.width, y_c * map.height / camera.height};
}

std::optional<double> depth_at_centroid(const perception::RelativeDepthMap& map,
                                        const CalibrationAnchor& anchor, double x_c, double y_c,
                                        const perception::CameraModel& camera)
{
    if (!std::isfinite(x_c) || !std::isfinite(y_c)) return std::nullopt;
    const DepthQuery q = to_map_coordinates(x_c, y_c, camera, map);
    if (!has_neighbourhood(map, q)) return std::nullopt;
    const double relative = bilinear_depth(map, q);
    if (!(relative > 0.0)) return std::nullopt;
    return calibrate(relative, anchor);
}

std::optional<double> depth_at_track(const perception::RelativeDepthMap& map,
                                     const CalibrationAnchor& anchor, const tracker::Track& track,
                                     const perception::CameraModel& camera)
{
    return depth_at_centroid(map, anchor, track.kf.mean(tracker::kXc), track.kf.mean(tracker::kYc),
                             camera);
}

}  // namespace platoon::depth
