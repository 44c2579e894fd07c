#include "platoon/comms/messages.hpp"

#include <type_traits>

#include <nlohmann/json.hpp>

namespace platoon::comms {

using json = nlohmann::ordered_json;

namespace {

// Field access that turns library exceptions into InvalidInput naming the field.
template <class T>
T field(const json& j, const char* name)
{
    if (!j.is_object()) throw InvalidInput("wire: expected an object");
    auto it = j.find(name);
    if (it == j.end()) throw InvalidInput(std::string("wire: missing field '") + name + "'");
    // The library would silently truncate 1.5 to an integer.
    if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
        if (!it->is_number_integer() || (std::is_unsigned_v<T> && !it->is_number_unsigned()))
            throw InvalidInput(std::string("wire: bad type for field '") + name + "'");
    }
    try {
        return it->get<T>();
    } catch (const json::exception&) {
        throw InvalidInput(std::string("wire: bad type for field '") + name + "'");
    }
}

const json& array_field(const json& j, const char* name)
{
    if (!j.is_object() || !j.contains(name) || !j.at(name).is_array())
        throw InvalidInput(std::string("wire: field '") + name + "' must be an array");
    return j.at(name);
}

json parse(std::string_view body)
{
    try {
        return json::parse(body);
    } catch (const json::parse_error& e) {
        throw InvalidInput(std::string("wire: ") + e.what());
    }
}

json pose_json(const world::Pose2D& p) { return json{{"x", p.x}, {"y", p.y}, {"theta", p.theta}}; }

world::Pose2D pose_from(const json& j)
{
    return {field<double>(j, "x"), field<double>(j, "y"), field<double>(j, "theta")};
}

json bbox_json(const perception::BBox& b)
{
    return json{{"x_c", b.x_c}, {"y_c", b.y_c}, {"s", b.s}, {"a", b.a}};
}

perception::BBox bbox_from(const json& j)
{
    return {field<double>(j, "x_c"), field<double>(j, "y_c"), field<double>(j, "s"),
            field<double>(j, "a")};
}

json state_json(const SystemState& s)
{
    json j;
    j["fleet_state"] = planner::to_string(s.fleet_state);
    if (s.cause)
        j["cause"] = json{{"agent_id", s.cause->agent_id}, {"tick", s.cause->tick}};
    else
        j["cause"] = nullptr;
    j["version"] = s.version;
    return j;
}

SystemState state_from(const json& j)
{
    SystemState s;
    s.fleet_state = planner::parse_fleet_state(field<std::string>(j, "fleet_state"));
    if (!j.contains("cause")) throw InvalidInput("wire: missing field 'cause'");
    const auto& c = j.at("cause");
    if (!c.is_null()) s.cause = StopCause{field<std::string>(c, "agent_id"), field<Tick>(c, "tick")};
    s.version = field<std::uint64_t>(j, "version");
    return s;
}

json command_json(const latch::LatchCommand& c)
{
    return json{{"verb", latch::to_string(c.verb)},
                {"origin", latch::to_string(c.origin)},
                {"issued", c.issued},
                {"sender", c.sender}};
}

latch::LatchCommand command_from(const json& j)
{
    return {latch::parse_command_verb(field<std::string>(j, "verb")),
            latch::parse_command_origin(field<std::string>(j, "origin")), field<Tick>(j, "issued"),
            field<std::string>(j, "sender")};
}

}  // namespace

planner::TrackReport to_report(const tracker::Track& track, double s_floor)
{
    planner::TrackReport r;
    r.track_id = track.track_id;
    r.class_label = track.class_label;
    r.bbox = track.bbox(s_floor);
    r.vx = track.kf.mean(tracker::kVx);
    r.vy = track.kf.mean(tracker::kVy);
    r.vs = track.kf.mean(tracker::kVs);
    r.frames_since_update = track.frames_since_update;
    r.hits = track.hits;
    return r;
}

std::string encode(const StatusUpdate& m)
{
    return json{{"agent_id", m.agent_id},
                {"tick", m.tick},
                {"pose", pose_json(m.pose)},
                {"latch_mode", latch::to_string(m.latch_mode)},
                {"plan_kind", planner::to_string(m.plan_kind)},
                {"obstacle_seen", m.obstacle_seen}}
        .dump();
}

std::string encode(const StatusAck& m)
{
    return json{{"accepted", m.accepted}, {"stale", m.stale}}.dump();
}

std::string encode(const SystemState& m) { return state_json(m).dump(); }

std::string encode(const PollRequest& m)
{
    return json{{"agent_id", m.agent_id}, {"tick", m.tick}}.dump();
}

std::string encode(const PollResponse& m)
{
    json cmds = json::array();
    for (const auto& c : m.commands) cmds.push_back(command_json(c));
    return json{{"state", state_json(m.state)}, {"commands", cmds}}.dump();
}

std::string encode(const LatchCommandMessage& m)
{
    return json{{"target", m.target}, {"command", command_json(m.command)}}.dump();
}

std::string encode(const CommandAck& m) { return json{{"accepted", m.accepted}}.dump(); }

std::string encode(const ResolveStopRequest& m)
{
    return json{{"agent_id", m.agent_id}, {"tick", m.tick}}.dump();
}

std::string encode(const PerceptionRequest& m)
{
    return json{{"agent_id", m.agent_id}, {"tick", m.tick}}.dump();
}

std::string encode(const PerceptionResult& m)
{
    json dets = json::array();
    for (const auto& d : m.detections)
        dets.push_back(json{{"bbox", bbox_json(d.bbox)},
                            {"class_label", perception::to_string(d.class_label)},
                            {"confidence", d.confidence},
                            {"embedding", d.embedding}});
    json tracks = json::array();
    for (const auto& t : m.tracks)
        tracks.push_back(json{{"track_id", t.track_id},
                              {"class_label", perception::to_string(t.class_label)},
                              {"bbox", bbox_json(t.bbox)},
                              {"vx", t.vx},
                              {"vy", t.vy},
                              {"vs", t.vs},
                              {"frames_since_update", t.frames_since_update},
                              {"hits", t.hits}});
    json depth = json::array();
    for (const auto& d : m.depth) depth.push_back(json{{"track_id", d.track_id}, {"range", d.range}});
    json events = json::array();
    for (const auto& e : m.events)
        events.push_back(json{{"kind", tracker::to_string(e.kind)}, {"track_id", e.track_id}});
    return json{{"agent_id", m.agent_id},
                {"tick", m.tick},
                {"tracker_version", m.tracker_version},
                {"detections", dets},
                {"tracks", tracks},
                {"depth", depth},
                {"events", events}}
        .dump();
}

std::string encode(const ErrorBody& m) { return json{{"error", m.error}}.dump(); }

template <>
StatusUpdate decode<StatusUpdate>(std::string_view body)
{
    const auto j = parse(body);
    return {field<std::string>(j, "agent_id"),
            field<Tick>(j, "tick"),
            pose_from(field<json>(j, "pose")),
            latch::parse_latch_mode(field<std::string>(j, "latch_mode")),
            planner::parse_plan_kind(field<std::string>(j, "plan_kind")),
            field<bool>(j, "obstacle_seen")};
}

template <>
StatusAck decode<StatusAck>(std::string_view body)
{
    const auto j = parse(body);
    return {field<bool>(j, "accepted"), field<bool>(j, "stale")};
}

template <>
SystemState decode<SystemState>(std::string_view body)
{
    return state_from(parse(body));
}

template <>
PollRequest decode<PollRequest>(std::string_view body)
{
    const auto j = parse(body);
    return {field<std::string>(j, "agent_id"), field<Tick>(j, "tick")};
}

template <>
PollResponse decode<PollResponse>(std::string_view body)
{
    const auto j = parse(body);
    if (!j.is_object() || !j.contains("state")) throw InvalidInput("wire: missing field 'state'");
    PollResponse r;
    r.state = state_from(j.at("state"));
    for (const auto& c : array_field(j, "commands")) r.commands.push_back(command_from(c));
    return r;
}

template <>
LatchCommandMessage decode<LatchCommandMessage>(std::string_view body)
{
    const auto j = parse(body);
    if (!j.is_object() || !j.contains("command")) throw InvalidInput("wire: missing field 'command'");
    return {field<std::string>(j, "target"), command_from(j.at("command"))};
}

template <>
CommandAck decode<CommandAck>(std::string_view body)
{
    return {field<bool>(parse(body), "accepted")};
}

template <>
ResolveStopRequest decode<ResolveStopRequest>(std::string_view body)
{
    const auto j = parse(body);
    return {field<std::string>(j, "agent_id"), field<Tick>(j, "tick")};
}

template <>
PerceptionRequest decode<PerceptionRequest>(std::string_view body)
{
    const auto j = parse(body);
    return {field<std::string>(j, "agent_id"), field<Tick>(j, "tick")};
}

template <>
PerceptionResult decode<PerceptionResult>(std::string_view body)
{
    const auto j = parse(body);
    PerceptionResult r;
    r.agent_id = field<std::string>(j, "agent_id");
    r.tick = field<Tick>(j, "tick");
    r.tracker_version = field<std::uint64_t>(j, "tracker_version");
    for (const auto& d : array_field(j, "detections")) {
        perception::Detection det;
        if (!d.contains("bbox")) throw InvalidInput("wire: detection missing 'bbox'");
        det.bbox = bbox_from(d.at("bbox"));
        det.class_label = perception::parse_class_label(field<std::string>(d, "class_label"));
        det.confidence = field<double>(d, "confidence");
        det.embedding = field<Embedding>(d, "embedding");
        r.detections.push_back(std::move(det));
    }
    for (const auto& t : array_field(j, "tracks")) {
        planner::TrackReport rep;
        rep.track_id = field<TrackId>(t, "track_id");
        rep.class_label = perception::parse_class_label(field<std::string>(t, "class_label"));
        if (!t.contains("bbox")) throw InvalidInput("wire: track missing 'bbox'");
        rep.bbox = bbox_from(t.at("bbox"));
        rep.vx = field<double>(t, "vx");
        rep.vy = field<double>(t, "vy");
        rep.vs = field<double>(t, "vs");
        rep.frames_since_update = field<int>(t, "frames_since_update");
        rep.hits = field<int>(t, "hits");
        r.tracks.push_back(rep);
    }
    for (const auto& d : array_field(j, "depth"))
        r.depth.push_back({field<TrackId>(d, "track_id"), field<double>(d, "range")});
    for (const auto& e : array_field(j, "events"))
        r.events.push_back({tracker::parse_track_event_kind(field<std::string>(e, "kind")),
                            field<TrackId>(e, "track_id")});
    return r;
}

template <>
ErrorBody decode<ErrorBody>(std::string_view body)
{
    return {field<std::string>(parse(body), "error")};
}

}  // namespace platoon::comms
