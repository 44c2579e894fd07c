#include "platoon/perception.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "platoon/kernels.hpp"

namespace platoon::perception {

std::string_view to_string(ClassLabel label)
{
    return label == ClassLabel::LeaderMarker ? "leader_marker" : "obstacle";
}

ClassLabel parse_class_label(std::string_view text)
{
    if (text == "leader_marker") return ClassLabel::LeaderMarker;
    if (text == "obstacle") return ClassLabel::Obstacle;
    throw InvalidInput("unknown class label: " + std::string(text));
}

double BBox::width() const { return std::sqrt(s * a); }
double BBox::height() const { return std::sqrt(s / a); }

double CameraModel::focal_px() const
{
    return (width / 2.0) / std::tan(hfov / 2.0);
}

void CameraModel::validate() const
{
    if (width <= 0 || height <= 0) throw InvalidInput("camera: width and height must be positive");
    if (!(hfov > 0.0 && hfov < std::numbers::pi)) throw InvalidInput("camera: hfov must lie in (0, pi)");
    if (!(near_clip > 0.0)) throw InvalidInput("camera: near_clip must be positive");
}

double RelativeDepthMap::at(int row, int col) const
{
    if (row < 0 || row >= height || col < 0 || col >= width)
        throw InvalidInput("depth map index out of bounds");
    return values[static_cast<std::size_t>(row) * width + col];
}

void DepthRenderOptions::validate() const
{
    if (width < 2 || height < 3) throw InvalidInput("depth map must be at least 2x3");
    if (!(background_depth > 0.0) || !(ref_depth > 0.0))
        throw InvalidInput("depth map depths must be positive");
}

namespace {

ClassLabel label_for(world::Role role)
{
    return role == world::Role::Obstacle ? ClassLabel::Obstacle : ClassLabel::LeaderMarker;
}

// Geometry of every entity in front of the camera, nearest first, no FOV or
// occlusion filtering.
std::vector<Projection> project_all(const world::WorldSnapshot& snapshot,
                                    std::string_view observer, const CameraModel& camera)
{
    camera.validate();
    const world::AgentState* self = snapshot.find(observer);
    if (!self) throw InvalidInput("unknown observer: " + std::string(observer));

    const double f = camera.focal_px();
    const double ct = std::cos(self->pose.theta);
    const double st = std::sin(self->pose.theta);

    std::vector<Projection> out;
    for (const auto& agent : snapshot.agents) {
        if (agent.id == self->id) continue;
        const double dx = agent.pose.x - self->pose.x;
        const double dy = agent.pose.y - self->pose.y;
        const double forward = dx * ct + dy * st;
        const double left = -dx * st + dy * ct;
        if (!(forward > camera.near_clip)) continue;

        const double w_px = f * agent.footprint.width / forward;
        const double h_px = f * agent.footprint.height / forward;
        BBox box;
        box.x_c = camera.width / 2.0 - f * left / forward;
        box.y_c = camera.height / 2.0 +
                  f * (camera.mount_height - agent.footprint.height / 2.0) / forward;
        box.s = w_px * h_px;
        box.a = w_px / h_px;
        out.push_back({agent.id, label_for(agent.role), std::hypot(dx, dy), forward, box});
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const Projection& a, const Projection& b) { return a.range < b.range; });
    return out;
}

bool in_image(const BBox& b, const CameraModel& camera)
{
    return b.x_c >= 0.0 && b.x_c < camera.width && b.y_c >= 0.0 && b.y_c < camera.height;
}

bool columns_overlap(const BBox& a, const BBox& b)
{
    const double a_lo = a.x_c - a.width() / 2.0, a_hi = a.x_c + a.width() / 2.0;
    const double b_lo = b.x_c - b.width() / 2.0, b_hi = b.x_c + b.width() / 2.0;
    return a_lo < b_hi && b_lo < a_hi;
}

}  // namespace

std::vector<Projection> project_visible(const world::WorldSnapshot& snapshot,
                                        std::string_view observer, const CameraModel& camera)
{
    std::vector<Projection> in_view;
    for (auto& p : project_all(snapshot, observer, camera)) {
        if (in_image(p.bbox, camera)) in_view.push_back(std::move(p));
    }
    std::vector<Projection> visible;
    for (std::size_t i = 0; i < in_view.size(); ++i) {
        bool occluded = false;
        for (std::size_t j = 0; j < i && !occluded; ++j) {
            occluded = in_view[j].range < in_view[i].range &&
                       columns_overlap(in_view[j].bbox, in_view[i].bbox);
        }
        if (!occluded) visible.push_back(in_view[i]);
    }
    return visible;
}

std::vector<Detection> render_detections(const world::WorldSnapshot& snapshot,
                                         std::string_view observer, const CameraModel& camera,
                                         const DetectionNoise& noise, std::uint64_t noise_seed)
{
    std::mt19937_64 rng(noise_seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    std::vector<Detection> out;
    for (const auto& p : project_visible(snapshot, observer, camera)) {
        if (snapshot.blacked_out(observer, p.id)) continue;
        const world::AgentState* truth = snapshot.find(p.id);

        double x_c = p.bbox.x_c + noise.pixel_sigma * gauss(rng);
        double y_c = p.bbox.y_c + noise.pixel_sigma * gauss(rng);
        double w = p.bbox.width() + noise.pixel_sigma * gauss(rng);
        double h = p.bbox.height() + noise.pixel_sigma * gauss(rng);
        w = std::max(w, 1.0);
        h = std::max(h, 1.0);
        x_c = std::clamp(x_c, 0.0, camera.width - 1.0);
        y_c = std::clamp(y_c, 0.0, camera.height - 1.0);

        Detection det;
        det.bbox = {x_c, y_c, w * h, w / h};
        det.class_label = p.class_label;
        det.confidence =
            std::clamp(0.5 + 0.5 * std::sqrt(det.bbox.s / (0.01 * camera.width * camera.height)),
                       0.0, 1.0);

        det.embedding = truth->marker_embedding;
        double norm = 0.0;
        for (auto& v : det.embedding) {
            v += noise.embedding_sigma * gauss(rng);
            norm += v * v;
        }
        norm = std::sqrt(norm);
        for (auto& v : det.embedding) v /= norm;
        out.push_back(std::move(det));
    }
    return out;
}

RelativeDepthMap render_depth(const world::WorldSnapshot& snapshot, std::string_view observer,
                              const CameraModel& camera, const DepthRenderOptions& options,
                              double frame_scale)
{
    options.validate();
    if (!(frame_scale > 0.0)) throw InvalidInput("render_depth: frame scale must be positive");

    std::vector<kernels::Footprint> footprints;
    for (const auto& p : project_all(snapshot, observer, camera)) {
        const double hw = p.bbox.width() / 2.0, hh = p.bbox.height() / 2.0;
        footprints.push_back({p.bbox.x_c - hw, p.bbox.x_c + hw, p.bbox.y_c - hh, p.bbox.y_c + hh,
                              frame_scale * p.range + options.shift});
    }

    RelativeDepthMap map;
    map.width = options.width;
    map.height = options.height;
    map.values.resize(static_cast<std::size_t>(options.width) * options.height);
    map.ref_row = options.height - 1;
    map.ref_col = options.width / 2;
    map.ref_true_depth = options.ref_depth;

    const kernels::RasterSpec spec{options.width,
                                   options.height,
                                   static_cast<double>(camera.width) / options.width,
                                   static_cast<double>(camera.height) / options.height,
                                   frame_scale * options.background_depth + options.shift,
                                   options.height - 1};
    kernels::parallel::rasterize(spec, footprints, map.values);

    const double anchor = frame_scale * options.ref_depth + options.shift;
    std::fill(map.values.end() - options.width, map.values.end(), anchor);
    return map;
}

double draw_frame_scale(std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    return std::uniform_real_distribution<double>(0.5, 2.0)(rng);
}

}  // namespace platoon::perception
