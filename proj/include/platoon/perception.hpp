#pragma once

// Synthetic stand-in for camera + detector + embedding network + relative
// depth network. Everything is computed from a ground-truth WorldSnapshot.

#include <cstdint>
#include <string_view>
#include <vector>

#include "platoon/common.hpp"
#include "platoon/world.hpp"

namespace platoon::perception {

enum class ClassLabel { LeaderMarker, Obstacle };

std::string_view to_string(ClassLabel label);
ClassLabel parse_class_label(std::string_view text);

// Centroid column/row in image pixels, area in px^2, aspect ratio w/h.
struct BBox {
    double x_c = 0.0;
    double y_c = 0.0;
    double s = 1.0;
    double a = 1.0;

    double width() const;
    double height() const;
    bool operator==(const BBox&) const = default;
};

struct Detection {
    BBox bbox;
    ClassLabel class_label = ClassLabel::LeaderMarker;
    double confidence = 1.0;
    Embedding embedding;

    bool operator==(const Detection&) const = default;
};

struct CameraModel {
    int width = 640;
    int height = 480;
    double hfov = 1.0471975511965976;  // 60 deg
    double mount_height = 0.075;       // m, level with the marker centre by default
    double near_clip = 0.05;           // m

    double focal_px() const;
    void validate() const;
};

struct DetectionNoise {
    double pixel_sigma = 1.0;      // px, on centroid and extent
    double embedding_sigma = 0.05; // per component before renormalisation
};

// Scale-ambiguous depth grid, row-major.
struct RelativeDepthMap {
    int width = 0;
    int height = 0;
    std::vector<double> values;
    int ref_row = 0;
    int ref_col = 0;
    double ref_true_depth = 1.0;  // metres at the reference pixel

    double at(int row, int col) const;
    double ref_value() const { return at(ref_row, ref_col); }
};

struct DepthRenderOptions {
    int width = 64;
    int height = 48;
    double background_depth = 5.0;  // m
    double ref_depth = 1.0;         // m, the floor anchor seen in the bottom row
    // Additive offset applied after scaling. Non-zero values break the
    // ratio calibration and exist only for stress testing.
    double shift = 0.0;

    void validate() const;
};

// Geometry of one entity as seen from the observer, before noise.
struct Projection {
    AgentId id;
    ClassLabel class_label;
    double range;    // m, Euclidean
    double forward;  // m, along the optical axis
    BBox bbox;
};

// Entities in the field of view, nearest first, with occlusion applied:
// an entity is dropped when its column interval overlaps that of any nearer
// entity in view. Scripted blackouts are not applied here.
std::vector<Projection> project_visible(const world::WorldSnapshot& snapshot,
                                        std::string_view observer, const CameraModel& camera);

// One Detection per visible, unoccluded, non-blacked-out entity.
std::vector<Detection> render_detections(const world::WorldSnapshot& snapshot,
                                         std::string_view observer, const CameraModel& camera,
                                         const DetectionNoise& noise, std::uint64_t noise_seed);

// Pixels covered by an entity hold k * range, the rest k * background; the
// bottom row is the reference anchor at k * ref_depth.
RelativeDepthMap render_depth(const world::WorldSnapshot& snapshot, std::string_view observer,
                              const CameraModel& camera, const DepthRenderOptions& options,
                              double frame_scale);

// Per-frame unknown scale in [0.5, 2.0].
double draw_frame_scale(std::uint64_t seed);

}  // namespace platoon::perception
