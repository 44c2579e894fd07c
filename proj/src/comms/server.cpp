#include "platoon/comms/server.hpp"

#include <cmath>

#include <spdlog/spdlog.h>

#include "platoon/depth.hpp"
#include "platoon/kernels.hpp"

namespace platoon::comms {

StatusServer::StatusServer(StatusServerConfig cfg) : cfg_(std::move(cfg)) {}

void StatusServer::register_agent(const AgentId& id)
{
    std::lock_guard lock(mu_);
    latest_.try_emplace(id);
    inbox_.try_emplace(id);
}

void StatusServer::require_registered(const AgentId& id) const
{
    if (!latest_.contains(id)) throw Rejected(RejectKind::NotFound, "unknown agent: " + id);
}

// Called whenever the set of open reports changed; every such change is a
// new state version.
void StatusServer::refresh_state()
{
    SystemState next;
    next.version = state_.version + 1;
    if (!reports_.empty()) {
        next.fleet_state = planner::FleetState::Stop;
        const std::pair<const AgentId, Tick>* newest = nullptr;
        for (const auto& r : reports_)
            if (!newest || r.second >= newest->second) newest = &r;
        next.cause = StopCause{newest->first, newest->second};
    }
    state_ = next;
}

StatusAck StatusServer::submit_status(const StatusUpdate& update)
{
    std::lock_guard lock(mu_);
    require_registered(update.agent_id);
    auto& slot = latest_[update.agent_id];
    if (slot && update.tick < slot->tick) return {true, true};
    slot = update;

    auto open = reports_.find(update.agent_id);
    if (update.obstacle_seen && open == reports_.end()) {
        reports_.emplace(update.agent_id, update.tick);
        refresh_state();
    } else if (!update.obstacle_seen && open != reports_.end() && cfg_.auto_resolve) {
        reports_.erase(open);
        refresh_state();
    }
    return {true, false};
}

PollResponse StatusServer::poll(const PollRequest& req)
{
    std::lock_guard lock(mu_);
    require_registered(req.agent_id);
    PollResponse out{state_, {}};
    out.commands.swap(inbox_[req.agent_id]);
    return out;
}

SystemState StatusServer::system_state() const
{
    std::lock_guard lock(mu_);
    return state_;
}

CommandAck StatusServer::enqueue_command(const LatchCommandMessage& msg)
{
    std::lock_guard lock(mu_);
    require_registered(msg.target);
    if (msg.target == cfg_.leader_id)
        throw Rejected(RejectKind::Conflict, "the leader has no latch");
    if (!latch::authenticate(msg.command, cfg_.leader_id))
        throw Rejected(RejectKind::Conflict, "command sender does not match its origin");
    inbox_[msg.target].push_back(msg.command);
    return {true};
}

SystemState StatusServer::resolve_stop(const ResolveStopRequest& req)
{
    std::lock_guard lock(mu_);
    auto open = reports_.find(req.agent_id);
    if (open == reports_.end())
        throw Rejected(RejectKind::Conflict, "no unresolved report from " + req.agent_id);
    reports_.erase(open);
    refresh_state();
    return state_;
}

std::optional<StatusUpdate> StatusServer::latest(const AgentId& id) const
{
    std::lock_guard lock(mu_);
    auto it = latest_.find(id);
    return it == latest_.end() ? std::nullopt : it->second;
}

std::map<AgentId, Tick> StatusServer::unresolved() const
{
    std::lock_guard lock(mu_);
    return reports_;
}

PerceptionServer::PerceptionServer(PerceptionServerConfig cfg) : cfg_(std::move(cfg))
{
    cfg_.camera.validate();
    cfg_.depth.validate();
    cfg_.tracker.validate();
    if (cfg_.snapshot_capacity == 0) throw InvalidInput("perception server: capacity must be > 0");
}

void PerceptionServer::register_agent(const AgentId& id)
{
    std::lock_guard lock(mu_);
    if (!agents_.contains(id))
        agents_.emplace(id, std::make_unique<AgentSlot>(AgentSlot{tracker::Tracker(cfg_.tracker), {}}));
}

void PerceptionServer::publish(world::WorldSnapshot snapshot)
{
    std::lock_guard lock(mu_);
    const Tick t = snapshot.tick;
    snapshots_.insert_or_assign(t, std::move(snapshot));
    while (snapshots_.size() > cfg_.snapshot_capacity) snapshots_.erase(snapshots_.begin());
}

std::vector<planner::DepthReading> track_depths(const perception::RelativeDepthMap& map,
                                                const std::vector<tracker::Track>& tracks,
                                                const perception::CameraModel& camera)
{
    std::vector<kernels::GridQuery> queries;
    std::vector<TrackId> ids;
    for (const auto& t : tracks) {
        if (t.frames_since_update != 0) continue;
        const auto q = depth::to_map_coordinates(t.kf.mean(tracker::kXc), t.kf.mean(tracker::kYc),
                                                 camera, map);
        queries.push_back({q.x_sub, q.y_sub});
        ids.push_back(t.track_id);
    }
    std::vector<double> rel(queries.size());
    kernels::parallel::bilinear_batch(map.values, map.width, map.height, queries, rel);

    std::vector<planner::DepthReading> out;
    const auto anchor = depth::anchor_from_map(map);
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (!std::isfinite(rel[i]) || !(rel[i] > 0.0)) continue;
        out.push_back({ids[i], depth::calibrate(rel[i], anchor)});
    }
    return out;
}

PerceptionResult PerceptionServer::request(const PerceptionRequest& req)
{
    std::lock_guard lock(mu_);
    auto slot_it = agents_.find(req.agent_id);
    if (slot_it == agents_.end()) throw Rejected(RejectKind::NotFound, "unknown agent: " + req.agent_id);
    auto& slot = *slot_it->second;

    if (slot.last) {
        if (req.tick == slot.last->tick) return *slot.last;
        if (req.tick < slot.last->tick)
            throw Rejected(RejectKind::Conflict, "frame older than the last served frame");
    }
    auto snap_it = snapshots_.find(req.tick);
    if (snap_it == snapshots_.end())
        throw Rejected(RejectKind::NotFound, "unknown snapshot: " + std::to_string(req.tick));
    const auto& snap = snap_it->second;

    const std::uint64_t frame_seed =
        mix_seed(mix_seed(cfg_.seed, stable_hash(req.agent_id)), static_cast<std::uint64_t>(req.tick));

    PerceptionResult r;
    r.agent_id = req.agent_id;
    r.tick = req.tick;
    r.detections = perception::render_detections(snap, req.agent_id, cfg_.camera, cfg_.noise, frame_seed);
    r.events = slot.tracker.step(r.detections);
    r.tracker_version = slot.tracker.version();
    for (const auto& t : slot.tracker.tracks()) r.tracks.push_back(to_report(t, cfg_.tracker.s_floor));

    const double k = perception::draw_frame_scale(mix_seed(frame_seed, 0x64657074ULL));
    const auto map = perception::render_depth(snap, req.agent_id, cfg_.camera, cfg_.depth, k);
    r.depth = track_depths(map, slot.tracker.tracks(), cfg_.camera);

    slot.last = r;
    return r;
}

std::vector<tracker::Track> PerceptionServer::tracks(const AgentId& id) const
{
    std::lock_guard lock(mu_);
    auto it = agents_.find(id);
    if (it == agents_.end()) return {};
    return it->second->tracker.tracks();
}

CoordinationService::CoordinationService(StatusServer& status, PerceptionServer& perception)
    : status_(status), perception_(perception)
{
}

Response CoordinationService::handle(std::string_view path, std::string_view body)
{
    try {
        if (path == endpoint::kStatus)
            return {200, encode(status_.submit_status(decode<StatusUpdate>(body)))};
        if (path == endpoint::kSystemState)
            return {200, encode(status_.poll(decode<PollRequest>(body)))};
        if (path == endpoint::kPerception)
            return {200, encode(perception_.request(decode<PerceptionRequest>(body)))};
        if (path == endpoint::kLatchCommand)
            return {200, encode(status_.enqueue_command(decode<LatchCommandMessage>(body)))};
        if (path == endpoint::kResolveStop)
            return {200, encode(status_.resolve_stop(decode<ResolveStopRequest>(body)))};
        return {404, encode(ErrorBody{"unknown endpoint: " + std::string(path)})};
    } catch (const Rejected& e) {
        return {e.kind() == RejectKind::NotFound ? 404 : 409, encode(ErrorBody{e.what()})};
    } catch (const InvalidInput& e) {
        spdlog::debug("bad request on {}: {}", path, e.what());
        return {400, encode(ErrorBody{e.what()})};
    }
}

}  // namespace platoon::comms
