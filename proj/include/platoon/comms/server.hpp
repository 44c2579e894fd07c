#pragma once

// Server side of the coordination protocol: the leader's status server, the
// central perception server and a dispatcher mapping endpoints to both.
// All public operations lock an internal mutex, so concurrent callers see
// them in a single total order.

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "platoon/comms/messages.hpp"
#include "platoon/perception.hpp"
#include "platoon/tracker.hpp"
#include "platoon/world.hpp"

namespace platoon::comms {

enum class RejectKind { NotFound, Conflict };

class Rejected : public std::runtime_error {
public:
    Rejected(RejectKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    RejectKind kind() const { return kind_; }

private:
    RejectKind kind_;
};

struct StatusServerConfig {
    AgentId leader_id;
    // A later obstacle_seen = false from the reporting agent clears its report.
    bool auto_resolve = true;
};

class StatusServer {
public:
    explicit StatusServer(StatusServerConfig cfg);

    void register_agent(const AgentId& id);

    // Last-writer-wins by tick; older ticks are acknowledged as stale.
    StatusAck submit_status(const StatusUpdate& update);
    // Current state plus the agent's queued latch commands (drained).
    PollResponse poll(const PollRequest& req);
    SystemState system_state() const;
    CommandAck enqueue_command(const LatchCommandMessage& msg);
    SystemState resolve_stop(const ResolveStopRequest& req);

    std::optional<StatusUpdate> latest(const AgentId& id) const;
    // Agents with an unresolved obstacle report and the tick of that report.
    std::map<AgentId, Tick> unresolved() const;

private:
    void require_registered(const AgentId& id) const;
    void refresh_state();

    StatusServerConfig cfg_;
    mutable std::mutex mu_;
    std::map<AgentId, std::optional<StatusUpdate>> latest_;
    std::map<AgentId, std::vector<latch::LatchCommand>> inbox_;
    std::map<AgentId, Tick> reports_;
    SystemState state_;
};

struct PerceptionServerConfig {
    perception::CameraModel camera;
    perception::DetectionNoise noise;
    perception::DepthRenderOptions depth;
    tracker::TrackerConfig tracker;
    std::uint64_t seed = 0;
    std::size_t snapshot_capacity = 64;
};

// Runs perception, tracking and depth recovery per agent on request. Tracker
// state lives here, one tracker per registered agent.
class PerceptionServer {
public:
    explicit PerceptionServer(PerceptionServerConfig cfg);

    void register_agent(const AgentId& id);
    // Keeps the most recent `snapshot_capacity` snapshots.
    void publish(world::WorldSnapshot snapshot);

    // A repeat of the last served tick returns the cached result; older ticks
    // and unknown snapshots are rejected.
    PerceptionResult request(const PerceptionRequest& req);

    const PerceptionServerConfig& config() const { return cfg_; }
    // Tracks of one agent's tracker (copy, taken under the lock).
    std::vector<tracker::Track> tracks(const AgentId& id) const;

private:
    struct AgentSlot {
        tracker::Tracker tracker;
        std::optional<PerceptionResult> last;
    };

    PerceptionServerConfig cfg_;
    mutable std::mutex mu_;
    std::map<Tick, world::WorldSnapshot> snapshots_;
    std::map<AgentId, std::unique_ptr<AgentSlot>> agents_;
};

// Depth readings for the tracks updated this frame, via the batched kernel.
std::vector<planner::DepthReading> track_depths(const perception::RelativeDepthMap& map,
                                                const std::vector<tracker::Track>& tracks,
                                                const perception::CameraModel& camera);

namespace endpoint {
inline constexpr std::string_view kStatus = "/status";
inline constexpr std::string_view kSystemState = "/system-state";
inline constexpr std::string_view kPerception = "/perception";
inline constexpr std::string_view kLatchCommand = "/latch-command";
inline constexpr std::string_view kResolveStop = "/resolve-stop";
}  // namespace endpoint

struct Response {
    int status = 200;  // HTTP semantics: 200, 400, 404, 409
    std::string body;

    bool ok() const { return status == 200; }
};

// Endpoint dispatcher shared by the in-process transport and the HTTP server.
// /system-state takes a PollRequest body.
class CoordinationService {
public:
    CoordinationService(StatusServer& status, PerceptionServer& perception);

    Response handle(std::string_view path, std::string_view body);

    StatusServer& status() { return status_; }
    PerceptionServer& perception() { return perception_; }

private:
    StatusServer& status_;
    PerceptionServer& perception_;
};

}  // namespace platoon::comms
