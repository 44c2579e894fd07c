#include "platoon/planner.hpp"

#include <algorithm>
#include <cmath>

#include <spdlog/spdlog.h>

namespace platoon::planner {

std::string_view to_string(PlanKind v)
{
    switch (v) {
    case PlanKind::Follow: return "follow";
    case PlanKind::StopAndProceed: return "stop_and_proceed";
    case PlanKind::Idle: return "idle";
    }
    return "?";
}

std::string_view to_string(FleetState v)
{
    return v == FleetState::Run ? "RUN" : "STOP";
}

PlanKind parse_plan_kind(std::string_view text)
{
    if (text == "follow") return PlanKind::Follow;
    if (text == "stop_and_proceed") return PlanKind::StopAndProceed;
    if (text == "idle") return PlanKind::Idle;
    throw InvalidInput("unknown plan kind: " + std::string(text));
}

FleetState parse_fleet_state(std::string_view text)
{
    if (text == "RUN") return FleetState::Run;
    if (text == "STOP") return FleetState::Stop;
    throw InvalidInput("unknown fleet state: " + std::string(text));
}

void PlannerConfig::validate() const
{
    if (!(desired_range > 0.0)) throw InvalidInput("planner: desired_range must be positive");
    if (linear_threshold < 0.0 || angular_threshold < 0.0)
        throw InvalidInput("planner: thresholds must be non-negative");
    if (depth_hold_ticks < 0) throw InvalidInput("planner: depth_hold_ticks must be >= 0");
}

TargetClass classify_target(const TrackReport& track)
{
    return track.class_label == perception::ClassLabel::LeaderMarker ? TargetClass::Leader
                                                                     : TargetClass::Obstacle;
}

double bearing_from_centroid(double x_c, const perception::CameraModel& camera)
{
    if (!(x_c >= 0.0 && x_c <= camera.width))
        throw InvalidInput("bearing_from_centroid: centroid outside image");
    return std::atan((x_c - camera.width / 2.0) / camera.focal_px());
}

PlanKind decide_plan_kind(latch::LatchMode latch_mode, FleetState fleet, bool obstacle_in_frame,
                          bool leader_available)
{
    if (latch_mode == latch::LatchMode::Disengaged) return PlanKind::Idle;
    if (obstacle_in_frame || fleet == FleetState::Stop) return PlanKind::StopAndProceed;
    if (leader_available) return PlanKind::Follow;
    return PlanKind::Idle;
}

namespace {

// Previous target if it is still a live leader track, otherwise the freshly
// seen leader track with the most hits (lowest id on ties).
const TrackReport* pick_leader(std::span<const TrackReport> tracks, std::optional<TrackId> previous)
{
    if (previous) {
        for (const auto& t : tracks) {
            if (t.track_id == *previous && classify_target(t) == TargetClass::Leader) return &t;
        }
    }
    const TrackReport* best = nullptr;
    for (const auto& t : tracks) {
        if (classify_target(t) != TargetClass::Leader || !t.in_frame()) continue;
        if (!best || t.hits > best->hits) best = &t;
    }
    return best;
}

}  // namespace

PlanOutput plan_step(const PlanInput& in, const PlannerState& prev, const PlannerConfig& cfg,
                     const perception::CameraModel& camera)
{
    PlanOutput out;
    out.state = prev;

    const bool obstacle_in_frame = std::any_of(in.tracks.begin(), in.tracks.end(), [](const auto& t) {
        return classify_target(t) == TargetClass::Obstacle && t.in_frame();
    });
    const TrackReport* leader = pick_leader(in.tracks, prev.plan.target_track_id);

    Plan plan;
    plan.desired_range = cfg.desired_range;
    plan.kind = decide_plan_kind(in.latch_mode, in.fleet_state, obstacle_in_frame, leader != nullptr);
    // The target survives a stop so Follow resumes on the same identity.
    plan.target_track_id = leader ? std::optional<TrackId>(leader->track_id) : std::nullopt;

    if (leader && leader->in_frame()) {
        for (const auto& r : in.depth) {
            if (r.track_id == leader->track_id && std::isfinite(r.range) && r.range > 0.0) {
                out.state.held_range = r.range;
                out.state.held_range_tick = in.tick;
            }
        }
    }
    if (leader && prev.plan.target_track_id && *prev.plan.target_track_id != leader->track_id &&
        out.state.held_range_tick != in.tick) {
        out.state.held_range.reset();  // a held range belongs to the old target
    }

    if (plan.kind == PlanKind::Follow) {
        out.setpoint = {true, cfg.desired_range, 0.0};
        const bool range_fresh = out.state.held_range &&
                                 in.tick - out.state.held_range_tick <= cfg.depth_hold_ticks;
        const double x_c = leader->bbox.x_c;
        if (range_fresh && x_c >= 0.0 && x_c <= camera.width) {
            out.deviations = {*out.state.held_range - cfg.desired_range,
                              bearing_from_centroid(x_c, camera), true};
            out.converged = std::abs(out.deviations.linear_dev) <= cfg.linear_threshold &&
                            std::abs(out.deviations.angular_dev) <= cfg.angular_threshold;
        }
    }

    out.transitioned = plan.kind != prev.plan.kind || plan.target_track_id != prev.plan.target_track_id;
    plan.created_tick = out.transitioned ? in.tick : prev.plan.created_tick;
    if (out.transitioned) {
        spdlog::debug("plan {} -> {} at tick {}", to_string(prev.plan.kind), to_string(plan.kind),
                      in.tick);
    }
    out.state.plan = plan;
    return out;
}

}  // namespace platoon::planner
