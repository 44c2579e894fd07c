#pragma once

// Protocol messages exchanged between agents, the leader's status server and
// the perception server. Every message has a canonical JSON encoding with a
// fixed field order; see docs/wire-format.md.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "platoon/common.hpp"
#include "platoon/latch.hpp"
#include "platoon/perception.hpp"
#include "platoon/planner.hpp"
#include "platoon/tracker.hpp"
#include "platoon/world.hpp"

namespace platoon::comms {

struct StatusUpdate {
    AgentId agent_id;
    Tick tick = 0;
    world::Pose2D pose;  // heading from the IMU
    latch::LatchMode latch_mode = latch::LatchMode::Disengaged;
    planner::PlanKind plan_kind = planner::PlanKind::Idle;
    bool obstacle_seen = false;

    bool operator==(const StatusUpdate&) const = default;
};

struct StatusAck {
    bool accepted = true;
    bool stale = false;

    bool operator==(const StatusAck&) const = default;
};

struct StopCause {
    AgentId agent_id;
    Tick tick = 0;

    bool operator==(const StopCause&) const = default;
};

struct SystemState {
    planner::FleetState fleet_state = planner::FleetState::Run;
    std::optional<StopCause> cause;
    std::uint64_t version = 0;

    bool operator==(const SystemState&) const = default;
};

struct PollRequest {
    AgentId agent_id;
    Tick tick = 0;

    bool operator==(const PollRequest&) const = default;
};

// System state plus any latch commands queued for the polling agent.
struct PollResponse {
    SystemState state;
    std::vector<latch::LatchCommand> commands;

    bool operator==(const PollResponse&) const = default;
};

struct LatchCommandMessage {
    AgentId target;
    latch::LatchCommand command;

    bool operator==(const LatchCommandMessage&) const = default;
};

struct CommandAck {
    bool accepted = true;

    bool operator==(const CommandAck&) const = default;
};

struct ResolveStopRequest {
    AgentId agent_id;
    Tick tick = 0;

    bool operator==(const ResolveStopRequest&) const = default;
};

struct PerceptionRequest {
    AgentId agent_id;
    Tick tick = 0;  // snapshot handle

    bool operator==(const PerceptionRequest&) const = default;
};

struct PerceptionResult {
    AgentId agent_id;
    Tick tick = 0;
    std::uint64_t tracker_version = 0;
    std::vector<perception::Detection> detections;
    std::vector<planner::TrackReport> tracks;
    std::vector<planner::DepthReading> depth;
    std::vector<tracker::TrackEvent> events;

    bool operator==(const PerceptionResult&) const = default;
};

struct ErrorBody {
    std::string error;

    bool operator==(const ErrorBody&) const = default;
};

planner::TrackReport to_report(const tracker::Track& track, double s_floor);

// Canonical encoding. decode_* throw InvalidInput on malformed bodies.
std::string encode(const StatusUpdate& m);
std::string encode(const StatusAck& m);
std::string encode(const SystemState& m);
std::string encode(const PollRequest& m);
std::string encode(const PollResponse& m);
std::string encode(const LatchCommandMessage& m);
std::string encode(const CommandAck& m);
std::string encode(const ResolveStopRequest& m);
std::string encode(const PerceptionRequest& m);
std::string encode(const PerceptionResult& m);
std::string encode(const ErrorBody& m);

template <class T>
T decode(std::string_view body);

}  // namespace platoon::comms
