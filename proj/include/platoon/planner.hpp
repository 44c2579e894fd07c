#pragma once

// Dynamic planner: picks Follow / StopAndProceed / Idle from the tracked
// scene and the fleet state, and turns the followed track into range and
// bearing deviations for the controller.

#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "platoon/common.hpp"
#include "platoon/latch.hpp"
#include "platoon/perception.hpp"

namespace platoon::planner {

enum class PlanKind { Follow, StopAndProceed, Idle };
enum class FleetState { Run, Stop };
enum class TargetClass { Leader, Obstacle };

std::string_view to_string(PlanKind v);
std::string_view to_string(FleetState v);
PlanKind parse_plan_kind(std::string_view text);
FleetState parse_fleet_state(std::string_view text);

// What the planner needs to know about a track; produced server-side from the
// full tracker state.
struct TrackReport {
    TrackId track_id = 0;
    perception::ClassLabel class_label = perception::ClassLabel::LeaderMarker;
    perception::BBox bbox;
    double vx = 0.0, vy = 0.0, vs = 0.0;
    int frames_since_update = 0;
    int hits = 1;

    bool in_frame() const { return frames_since_update == 0; }
    bool operator==(const TrackReport&) const = default;
};

struct DepthReading {
    TrackId track_id;
    double range;  // metres

    bool operator==(const DepthReading&) const = default;
};

struct Plan {
    PlanKind kind = PlanKind::Idle;
    std::optional<TrackId> target_track_id;
    double desired_range = 0.30;
    Tick created_tick = 0;

    bool operator==(const Plan&) const = default;
};

struct Deviations {
    double linear_dev = 0.0;   // measured range - desired range (m)
    double angular_dev = 0.0;  // target bearing, right of centre positive (rad)
    bool known = false;
};

struct Setpoint {
    bool active = false;  // inactive means "command zero velocity"
    double range = 0.0;
    double bearing = 0.0;
};

struct PlannerConfig {
    double desired_range = 0.30;
    double linear_threshold = 0.05;   // m, convergence report only
    double angular_threshold = 0.05;  // rad
    int depth_hold_ticks = 10;        // T_depth

    void validate() const;
};

// Planner memory carried between ticks.
struct PlannerState {
    Plan plan;
    std::optional<double> held_range;
    Tick held_range_tick = 0;
};

struct PlanInput {
    std::span<const TrackReport> tracks;
    std::span<const DepthReading> depth;
    FleetState fleet_state = FleetState::Run;
    latch::LatchMode latch_mode = latch::LatchMode::Disengaged;
    Tick tick = 0;
};

struct PlanOutput {
    PlannerState state;
    Deviations deviations;
    Setpoint setpoint;
    bool transitioned = false;  // plan kind or target changed this tick
    bool converged = false;     // both deviations inside the thresholds
};

TargetClass classify_target(const TrackReport& track);

// atan((x_c - width/2) / focal_px). Throws InvalidInput outside [0, width].
double bearing_from_centroid(double x_c, const perception::CameraModel& camera);

// Plan kind as a pure function of the inputs that decide it.
PlanKind decide_plan_kind(latch::LatchMode latch_mode, FleetState fleet, bool obstacle_in_frame,
                          bool leader_available);

PlanOutput plan_step(const PlanInput& input, const PlannerState& prev, const PlannerConfig& cfg,
                     const perception::CameraModel& camera);

}  // namespace platoon::planner
