#pragma once

// Scenario files: agents, leader script, obstacle and occlusion schedules,
// latch commands, network and noise settings. JSON, see docs/scenario-format.md.

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "platoon/comms/network.hpp"
#include "platoon/controller.hpp"
#include "platoon/latch.hpp"
#include "platoon/perception.hpp"
#include "platoon/planner.hpp"
#include "platoon/tracker.hpp"
#include "platoon/world.hpp"

namespace platoon::harness {

struct Waypoint {
    double x = 0.0;
    double y = 0.0;
};

struct AgentSpec {
    AgentId id;
    world::Role role = world::Role::Follower;
    world::Pose2D pose;
    world::Footprint footprint;
    std::optional<AgentId> follows;  // followers: agent whose range is logged
    std::vector<Waypoint> waypoints; // leader only
    double cruise_speed = 0.2;       // leader only, m/s
};

struct ObstacleSpec {
    AgentId id;
    Tick spawn_tick = 0;
    std::optional<Tick> remove_tick;
    std::optional<world::Pose2D> pose;
    // Alternatively placed at `fraction` of the way from `between.first` to
    // `between.second`, evaluated at spawn time.
    std::optional<std::pair<AgentId, AgentId>> between;
    double fraction = 0.5;
    world::Footprint footprint{0.25, 0.2};
};

// `observer` cannot detect `target` for ticks in [start, end).
struct OcclusionSpec {
    AgentId observer;
    AgentId target;
    Tick start = 0;
    Tick end = 0;
};

struct LatchCommandSpec {
    Tick tick = 0;
    AgentId agent;
    latch::CommandVerb verb = latch::CommandVerb::Engage;
    latch::CommandOrigin origin = latch::CommandOrigin::Operator;
};

struct ResolveSpec {
    Tick tick = 0;
    AgentId agent;
};

enum class LinkKind { StatusUplink, StatusDownlink, PerceptionUplink, PerceptionDownlink };

std::string_view to_string(LinkKind k);
LinkKind parse_link_kind(std::string_view text);

// Every follower's `link` drops all traffic for ticks in [start, end).
struct OutageSpec {
    LinkKind link = LinkKind::StatusDownlink;
    Tick start = 0;
    Tick end = 0;
};

struct NetworkSpec {
    comms::LinkConfig status_uplink{1, 0, 0.0, true};
    comms::LinkConfig status_downlink{0, 0, 0.0, true};
    comms::LinkConfig perception_uplink{0, 0, 0.0, true};
    comms::LinkConfig perception_downlink{0, 0, 0.0, true};
    int poll_period = 2;
    bool auto_resolve = true;
    std::vector<OutageSpec> outages;

    // Worst-case ticks from a report reaching the server until every poller
    // holds the new state.
    int stop_bound() const
    {
        return status_uplink.max_latency() + status_downlink.max_latency() + poll_period;
    }
};

struct NoiseSpec {
    perception::DetectionNoise detection;
    double imu_sigma = 0.01;  // rad
};

struct Scenario {
    std::string name;
    Tick duration_ticks = 0;
    double dt = 0.05;
    std::uint64_t seed = 0;
    std::size_t embedding_dim = 16;

    std::vector<AgentSpec> agents;
    std::vector<ObstacleSpec> obstacles;
    std::vector<OcclusionSpec> occlusions;
    std::vector<LatchCommandSpec> latch_commands;
    std::vector<ResolveSpec> resolve_commands;
    NetworkSpec network;
    NoiseSpec noise;

    world::ActuatorLimits limits;
    perception::CameraModel camera;
    perception::DepthRenderOptions depth;
    tracker::TrackerConfig tracker;
    latch::EvidenceWindows windows;
    latch::FaultThresholds faults;
    planner::PlannerConfig planner;
    controller::ControllerGains controller;
    double leader_heading_gain = 2.0;  // 1/s
    double waypoint_tolerance = 0.05;  // m

    const AgentSpec* find_agent(std::string_view id) const;
    const AgentSpec& leader() const;
};

// Every offending field, one message per line.
class ValidationError : public InvalidInput {
public:
    explicit ValidationError(std::vector<std::string> problems);
    const std::vector<std::string>& problems() const { return problems_; }

private:
    std::vector<std::string> problems_;
};

// Throws ValidationError listing every malformed or inconsistent field.
Scenario parse_scenario(std::string_view json_text);
Scenario load_scenario(const std::filesystem::path& path);
// Cross-field checks on an already built scenario; empty when valid.
std::vector<std::string> validate(const Scenario& s);

}  // namespace platoon::harness
