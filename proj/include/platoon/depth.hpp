#pragma once

// Relative-to-metric depth recovery and sub-pixel lookup.

#include <optional>

#include "platoon/perception.hpp"
#include "platoon/tracker.hpp"

namespace platoon::depth {

// Known metric depth of a reference point and the relative value the depth
// network assigned to it in the same frame.
struct CalibrationAnchor {
    double ref_depth;     // metres
    double ref_relative;  // relative units

    void validate() const;
};

// Fractional (col, row) position in depth-map pixels.
struct DepthQuery {
    double x_sub;
    double y_sub;
};

// D_act = D_rel * D_ref / D_rel_ref
double calibrate(double relative, const CalibrationAnchor& anchor);

// Bilinear blend of the 2x2 neighbourhood whose top-left pixel is
// (floor(x_sub), floor(y_sub)). Throws InvalidInput if the neighbourhood is
// not fully inside the map.
double bilinear_depth(const perception::RelativeDepthMap& map, DepthQuery query);

// Anchor taken from the map's own reference pixel.
CalibrationAnchor anchor_from_map(const perception::RelativeDepthMap& map);

// Image-pixel centroid -> depth-map coordinates by uniform scaling.
DepthQuery to_map_coordinates(double x_c, double y_c, const perception::CameraModel& camera,
                              const perception::RelativeDepthMap& map);

// Metric depth at an image-pixel centroid; nullopt when the centroid has no
// full neighbourhood in the map.
std::optional<double> depth_at_centroid(const perception::RelativeDepthMap& map,
                                        const CalibrationAnchor& anchor, double x_c, double y_c,
                                        const perception::CameraModel& camera);

// depth_at_centroid at the track's filtered centroid.
std::optional<double> depth_at_track(const perception::RelativeDepthMap& map,
                                     const CalibrationAnchor& anchor, const tracker::Track& track,
                                     const perception::CameraModel& camera);

}  // namespace platoon::depth
