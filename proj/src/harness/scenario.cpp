#include "platoon/harness/scenario.hpp"

#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <type_traits>

#include <nlohmann/json.hpp>

namespace platoon::harness {

using json = nlohmann::json;

namespace {

std::string join_lines(const std::vector<std::string>& v)
{
    std::string out = "invalid scenario:";
    for (const auto& s : v) out += "\n  " + s;
    return out;
}

// Reads fields while collecting every problem instead of stopping at the first.
class Reader {
public:
    std::vector<std::string> errors;

    void fail(const std::string& path, const std::string& what) { errors.push_back(path + ": " + what); }

    template <class T>
    bool get(const json& obj, const std::string& path, const char* key, T& out, bool required)
    {
        const std::string at = path.empty() ? key : path + "." + key;
        if (!obj.is_object() || !obj.contains(key)) {
            if (required) fail(at, "missing");
            return false;
        }
        if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
            const json& v = obj.at(key);
            if (!v.is_number_integer() || (std::is_unsigned_v<T> && !v.is_number_unsigned())) {
                fail(at, "wrong type");
                return false;
            }
        }
        try {
            out = obj.at(key).get<T>();
            return true;
        } catch (const json::exception&) {
            fail(at, "wrong type");
            return false;
        }
    }

    template <class T>
    void opt(const json& obj, const std::string& path, const char* key, T& out)
    {
        get(obj, path, key, out, false);
    }

    template <class T>
    void req(const json& obj, const std::string& path, const char* key, T& out)
    {
        get(obj, path, key, out, true);
    }

    // String field turned into an enum by `parse`.
    template <class E, class Parse>
    void enumeration(const json& obj, const std::string& path, const char* key, E& out, bool required,
                     Parse parse)
    {
        std::string text;
        if (!get(obj, path, key, text, required)) return;
        try {
            out = parse(text);
        } catch (const InvalidInput& e) {
            fail(path + "." + key, e.what());
        }
    }

    const json* child(const json& obj, const char* key)
    {
        if (!obj.is_object() || !obj.contains(key)) return nullptr;
        return &obj.at(key);
    }

    const json* array(const json& obj, const std::string& path, const char* key)
    {
        const json* a = child(obj, key);
        if (a && !a->is_array()) {
            fail(path.empty() ? key : path + "." + key, "must be an array");
            return nullptr;
        }
        return a;
    }

    world::Pose2D pose(const json& obj, const std::string& path, const char* key, bool required)
    {
        world::Pose2D p;
        const json* j = child(obj, key);
        const std::string at = path + "." + key;
        if (!j) {
            if (required) fail(at, "missing");
            return p;
        }
        req(*j, at, "x", p.x);
        req(*j, at, "y", p.y);
        double theta_deg = 0.0;
        opt(*j, at, "theta_deg", theta_deg);
        p.theta = theta_deg * std::numbers::pi / 180.0;
        return p;
    }

    world::Footprint footprint(const json& obj, const std::string& path, world::Footprint fp)
    {
        if (const json* j = child(obj, "footprint")) {
            opt(*j, path + ".footprint", "width", fp.width);
            opt(*j, path + ".footprint", "height", fp.height);
        }
        return fp;
    }

    comms::LinkConfig link(const json& obj, const std::string& path, const char* key,
                           comms::LinkConfig cfg)
    {
        if (const json* j = child(obj, key)) {
            const std::string at = path + "." + key;
            opt(*j, at, "latency", cfg.latency);
            opt(*j, at, "jitter", cfg.jitter);
            opt(*j, at, "drop", cfg.drop_probability);
            opt(*j, at, "fifo", cfg.fifo);
        }
        return cfg;
    }
};

void parse_config(Reader& r, const json& root, Scenario& s)
{
    if (const json* j = r.child(root, "camera")) {
        r.opt(*j, "camera", "width", s.camera.width);
        r.opt(*j, "camera", "height", s.camera.height);
        double hfov_deg = s.camera.hfov * 180.0 / std::numbers::pi;
        r.opt(*j, "camera", "hfov_deg", hfov_deg);
        s.camera.hfov = hfov_deg * std::numbers::pi / 180.0;
        r.opt(*j, "camera", "mount_height", s.camera.mount_height);
        r.opt(*j, "camera", "near_clip", s.camera.near_clip);
    }
    if (const json* j = r.child(root, "depth")) {
        r.opt(*j, "depth", "width", s.depth.width);
        r.opt(*j, "depth", "height", s.depth.height);
        r.opt(*j, "depth", "background", s.depth.background_depth);
        r.opt(*j, "depth", "ref_depth", s.depth.ref_depth);
        r.opt(*j, "depth", "shift", s.depth.shift);
    }
    if (const json* j = r.child(root, "tracker")) {
        r.opt(*j, "tracker", "match_threshold", s.tracker.match_threshold);
        r.opt(*j, "tracker", "max_age", s.tracker.max_age);
        r.opt(*j, "tracker", "s_floor", s.tracker.s_floor);
    }
    if (const json* j = r.child(root, "latch")) {
        r.opt(*j, "latch", "t_recog", s.windows.recognition);
        r.opt(*j, "latch", "t_comms", s.windows.comms);
        r.opt(*j, "latch", "t_depth", s.windows.depth);
        r.opt(*j, "latch", "t_track", s.faults.track_lost);
        r.opt(*j, "latch", "t_fail", s.faults.comms_lost);
        r.opt(*j, "latch", "t_depth_fail", s.faults.depth_invalid);
    }
    if (const json* j = r.child(root, "planner")) {
        r.opt(*j, "planner", "desired_range", s.planner.desired_range);
        r.opt(*j, "planner", "linear_threshold", s.planner.linear_threshold);
        r.opt(*j, "planner", "angular_threshold", s.planner.angular_threshold);
        r.opt(*j, "planner", "depth_hold_ticks", s.planner.depth_hold_ticks);
    }
    if (const json* j = r.child(root, "controller")) {
        r.opt(*j, "controller", "k_lin", s.controller.k_lin);
        r.opt(*j, "controller", "k_ang", s.controller.k_ang);
        r.opt(*j, "controller", "deadband_lin", s.controller.deadband_lin);
        r.opt(*j, "controller", "deadband_ang", s.controller.deadband_ang);
        r.opt(*j, "controller", "angular_slew", s.controller.angular_slew);
    }
    if (const json* j = r.child(root, "limits")) {
        r.opt(*j, "limits", "v_max", s.limits.v_max);
        r.opt(*j, "limits", "w_max", s.limits.w_max);
    }
    if (const json* j = r.child(root, "leader")) {
        r.opt(*j, "leader", "heading_gain", s.leader_heading_gain);
        r.opt(*j, "leader", "waypoint_tolerance", s.waypoint_tolerance);
    }
    if (const json* j = r.child(root, "noise")) {
        r.opt(*j, "noise", "embedding_sigma", s.noise.detection.embedding_sigma);
        r.opt(*j, "noise", "pixel_sigma", s.noise.detection.pixel_sigma);
        r.opt(*j, "noise", "imu_sigma", s.noise.imu_sigma);
    }
    if (const json* j = r.child(root, "network")) {
        auto& n = s.network;
        n.status_uplink = r.link(*j, "network", "status_uplink", n.status_uplink);
        n.status_downlink = r.link(*j, "network", "status_downlink", n.status_downlink);
        n.perception_uplink = r.link(*j, "network", "perception_uplink", n.perception_uplink);
        n.perception_downlink = r.link(*j, "network", "perception_downlink", n.perception_downlink);
        r.opt(*j, "network", "poll_period", n.poll_period);
        r.opt(*j, "network", "auto_resolve", n.auto_resolve);
        if (const json* outs = r.array(*j, "network", "outages")) {
            for (std::size_t i = 0; i < outs->size(); ++i) {
                const std::string at = "network.outages[" + std::to_string(i) + "]";
                OutageSpec o;
                r.enumeration(outs->at(i), at, "link", o.link, true, parse_link_kind);
                r.req(outs->at(i), at, "start", o.start);
                r.req(outs->at(i), at, "end", o.end);
                n.outages.push_back(o);
            }
        }
    }
}

template <class F>
void check(std::vector<std::string>& out, const std::string& what, F&& f)
{
    try {
        f();
    } catch (const InvalidInput& e) {
        out.push_back(what + ": " + e.what());
    }
}

}  // namespace

std::string_view to_string(LinkKind k)
{
    switch (k) {
    case LinkKind::StatusUplink: return "status_uplink";
    case LinkKind::StatusDownlink: return "status_downlink";
    case LinkKind::PerceptionUplink: return "perception_uplink";
    case LinkKind::PerceptionDownlink: return "perception_downlink";
    }
    return "?";
}

LinkKind parse_link_kind(std::string_view text)
{
    for (auto k : {LinkKind::StatusUplink, LinkKind::StatusDownlink, LinkKind::PerceptionUplink,
                   LinkKind::PerceptionDownlink})
        if (to_string(k) == text) return k;
    throw InvalidInput("unknown link: " + std::string(text));
}

ValidationError::ValidationError(std::vector<std::string> problems)
    : InvalidInput(join_lines(problems)), problems_(std::move(problems))
{
}

const AgentSpec* Scenario::find_agent(std::string_view id) const
{
    for (const auto& a : agents)
        if (a.id == id) return &a;
    return nullptr;
}

const AgentSpec& Scenario::leader() const
{
    for (const auto& a : agents)
        if (a.role == world::Role::Leader) return a;
    throw InvalidInput("scenario has no leader");
}

Scenario parse_scenario(std::string_view json_text)
{
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ValidationError({std::string("json: ") + e.what()});
    }
    if (!root.is_object()) throw ValidationError({"<root>: must be an object"});

    Reader r;
    Scenario s;
    r.req(root, "", "name", s.name);
    r.req(root, "", "duration_ticks", s.duration_ticks);
    r.opt(root, "", "dt", s.dt);
    r.opt(root, "", "seed", s.seed);
    r.opt(root, "", "embedding_dim", s.embedding_dim);

    if (const json* agents = r.array(root, "", "agents")) {
        for (std::size_t i = 0; i < agents->size(); ++i) {
            const json& a = agents->at(i);
            const std::string at = "agents[" + std::to_string(i) + "]";
            AgentSpec spec;
            r.req(a, at, "id", spec.id);
            r.enumeration(a, at, "role", spec.role, true, world::parse_role);
            spec.pose = r.pose(a, at, "pose", true);
            spec.footprint = r.footprint(a, at, spec.footprint);
            std::string follows;
            if (r.get(a, at, "follows", follows, false)) spec.follows = follows;
            r.opt(a, at, "cruise_speed", spec.cruise_speed);
            if (const json* wps = r.array(a, at, "waypoints")) {
                for (std::size_t k = 0; k < wps->size(); ++k) {
                    const std::string wat = at + ".waypoints[" + std::to_string(k) + "]";
                    Waypoint w;
                    r.req(wps->at(k), wat, "x", w.x);
                    r.req(wps->at(k), wat, "y", w.y);
                    spec.waypoints.push_back(w);
                }
            }
            s.agents.push_back(std::move(spec));
        }
    } else {
        r.fail("agents", "missing");
    }

    if (const json* obs = r.array(root, "", "obstacles")) {
        for (std::size_t i = 0; i < obs->size(); ++i) {
            const json& o = obs->at(i);
            const std::string at = "obstacles[" + std::to_string(i) + "]";
            ObstacleSpec spec;
            r.req(o, at, "id", spec.id);
            r.req(o, at, "spawn_tick", spec.spawn_tick);
            Tick remove = 0;
            if (r.get(o, at, "remove_tick", remove, false)) spec.remove_tick = remove;
            if (r.child(o, "pose")) spec.pose = r.pose(o, at, "pose", true);
            std::vector<std::string> between;
            if (r.get(o, at, "between", between, false)) {
                if (between.size() != 2)
                    r.fail(at + ".between", "needs exactly two agent ids");
                else
                    spec.between = std::make_pair(between[0], between[1]);
            }
            r.opt(o, at, "fraction", spec.fraction);
            spec.footprint = r.footprint(o, at, spec.footprint);
            s.obstacles.push_back(std::move(spec));
        }
    }

    if (const json* occ = r.array(root, "", "occlusions")) {
        for (std::size_t i = 0; i < occ->size(); ++i) {
            const std::string at = "occlusions[" + std::to_string(i) + "]";
            OcclusionSpec spec;
            r.req(occ->at(i), at, "observer", spec.observer);
            r.req(occ->at(i), at, "target", spec.target);
            r.req(occ->at(i), at, "start", spec.start);
            r.req(occ->at(i), at, "end", spec.end);
            s.occlusions.push_back(std::move(spec));
        }
    }

    if (const json* cmds = r.array(root, "", "latch_commands")) {
        for (std::size_t i = 0; i < cmds->size(); ++i) {
            const std::string at = "latch_commands[" + std::to_string(i) + "]";
            LatchCommandSpec spec;
            r.req(cmds->at(i), at, "tick", spec.tick);
            r.req(cmds->at(i), at, "agent", spec.agent);
            r.enumeration(cmds->at(i), at, "verb", spec.verb, true, latch::parse_command_verb);
            r.enumeration(cmds->at(i), at, "origin", spec.origin, false, latch::parse_command_origin);
            s.latch_commands.push_back(std::move(spec));
        }
    }

    if (const json* res = r.array(root, "", "resolve_commands")) {
        for (std::size_t i = 0; i < res->size(); ++i) {
            const std::string at = "resolve_commands[" + std::to_string(i) + "]";
            ResolveSpec spec;
            r.req(res->at(i), at, "tick", spec.tick);
            r.req(res->at(i), at, "agent", spec.agent);
            s.resolve_commands.push_back(std::move(spec));
        }
    }

    parse_config(r, root, s);
    s.tracker.dt = s.dt;

    if (!r.errors.empty()) throw ValidationError(std::move(r.errors));
    auto problems = validate(s);
    if (!problems.empty()) throw ValidationError(std::move(problems));
    return s;
}

Scenario load_scenario(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ValidationError({path.string() + ": cannot open"});
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

std::vector<std::string> validate(const Scenario& s)
{
    std::vector<std::string> out;
    const Tick n = s.duration_ticks;
    auto plain = [](const std::string& v) {
        return !v.empty() && v.find_first_of(" \t\r\n,|") == std::string::npos;
    };
    if (!plain(s.name)) out.emplace_back("name: must be non-empty without spaces, commas or '|'");
    if (n <= 0) out.emplace_back("duration_ticks: must be positive");
    if (!(s.dt > 0.0)) out.emplace_back("dt: must be positive");
    if (s.embedding_dim < 2) out.emplace_back("embedding_dim: must be >= 2");

    std::set<AgentId> ids;
    int leaders = 0;
    for (std::size_t i = 0; i < s.agents.size(); ++i) {
        const auto& a = s.agents[i];
        const std::string at = "agents[" + std::to_string(i) + "]";
        if (!plain(a.id) || a.id == kOperatorId) out.push_back(at + ".id: reserved, empty or has separators");
        if (!ids.insert(a.id).second) out.push_back(at + ".id: duplicate '" + a.id + "'");
        if (a.role == world::Role::Obstacle) out.push_back(at + ".role: obstacles belong in 'obstacles'");
        if (a.role == world::Role::Leader) {
            ++leaders;
            if (a.follows) out.push_back(at + ".follows: the leader follows nobody");
            if (!(a.cruise_speed >= 0.0)) out.push_back(at + ".cruise_speed: must be >= 0");
        }
        if (!(a.footprint.width > 0.0 && a.footprint.height > 0.0))
            out.push_back(at + ".footprint: must be positive");
    }
    if (leaders != 1) out.emplace_back("agents: exactly one leader required");
    for (std::size_t i = 0; i < s.agents.size(); ++i) {
        const auto& a = s.agents[i];
        const std::string at = "agents[" + std::to_string(i) + "]";
        if (a.role != world::Role::Follower) continue;
        if (!a.follows)
            out.push_back(at + ".follows: required for followers");
        else if (*a.follows == a.id || !s.find_agent(*a.follows))
            out.push_back(at + ".follows: unknown agent '" + *a.follows + "'");
        if (!a.waypoints.empty()) out.push_back(at + ".waypoints: only the leader has waypoints");
    }

    for (std::size_t i = 0; i < s.obstacles.size(); ++i) {
        const auto& o = s.obstacles[i];
        const std::string at = "obstacles[" + std::to_string(i) + "]";
        if (!plain(o.id) || !ids.insert(o.id).second) out.push_back(at + ".id: empty, duplicate or has separators");
        if (o.spawn_tick < 0 || o.spawn_tick >= n) out.push_back(at + ".spawn_tick: outside the run");
        if (o.remove_tick && (*o.remove_tick <= o.spawn_tick || *o.remove_tick >= n))
            out.push_back(at + ".remove_tick: must lie in (spawn_tick, duration_ticks)");
        if (o.pose.has_value() == o.between.has_value())
            out.push_back(at + ": give exactly one of 'pose' or 'between'");
        if (o.between) {
            for (const auto& id : {o.between->first, o.between->second})
                if (!s.find_agent(id)) out.push_back(at + ".between: unknown agent '" + id + "'");
        }
        if (!(o.fraction >= 0.0 && o.fraction <= 1.0)) out.push_back(at + ".fraction: must be in [0, 1]");
        if (!(o.footprint.width > 0.0 && o.footprint.height > 0.0))
            out.push_back(at + ".footprint: must be positive");
    }

    for (std::size_t i = 0; i < s.occlusions.size(); ++i) {
        const auto& o = s.occlusions[i];
        const std::string at = "occlusions[" + std::to_string(i) + "]";
        if (!s.find_agent(o.observer)) out.push_back(at + ".observer: unknown agent");
        if (!ids.contains(o.target)) out.push_back(at + ".target: unknown entity");
        if (o.start < 0 || o.start >= n) out.push_back(at + ".start: outside the run");
        if (o.end <= o.start || o.end > n) out.push_back(at + ".end: must lie in (start, duration_ticks]");
    }

    for (std::size_t i = 0; i < s.latch_commands.size(); ++i) {
        const auto& c = s.latch_commands[i];
        const std::string at = "latch_commands[" + std::to_string(i) + "]";
        if (c.tick < 0 || c.tick >= n) out.push_back(at + ".tick: outside the run");
        const auto* a = s.find_agent(c.agent);
        if (!a || a->role != world::Role::Follower) out.push_back(at + ".agent: not a follower");
    }

    for (std::size_t i = 0; i < s.resolve_commands.size(); ++i) {
        const auto& c = s.resolve_commands[i];
        const std::string at = "resolve_commands[" + std::to_string(i) + "]";
        if (c.tick < 0 || c.tick >= n) out.push_back(at + ".tick: outside the run");
        if (!s.find_agent(c.agent)) out.push_back(at + ".agent: unknown agent");
    }

    check(out, "network.status_uplink", [&] { s.network.status_uplink.validate(); });
    check(out, "network.status_downlink", [&] { s.network.status_downlink.validate(); });
    check(out, "network.perception_uplink", [&] { s.network.perception_uplink.validate(); });
    check(out, "network.perception_downlink", [&] { s.network.perception_downlink.validate(); });
    if (s.network.poll_period < 1) out.emplace_back("network.poll_period: must be >= 1");
    for (std::size_t i = 0; i < s.network.outages.size(); ++i) {
        const auto& o = s.network.outages[i];
        if (o.start < 0 || o.start >= n || o.end <= o.start || o.end > n)
            out.push_back("network.outages[" + std::to_string(i) + "]: window outside the run");
    }

    if (!(s.noise.detection.embedding_sigma >= 0.0)) out.emplace_back("noise.embedding_sigma: must be >= 0");
    if (!(s.noise.detection.pixel_sigma >= 0.0)) out.emplace_back("noise.pixel_sigma: must be >= 0");
    if (!(s.noise.imu_sigma >= 0.0)) out.emplace_back("noise.imu_sigma: must be >= 0");

    check(out, "camera", [&] { s.camera.validate(); });
    check(out, "depth", [&] { s.depth.validate(); });
    check(out, "tracker", [&] { s.tracker.validate(); });
    check(out, "planner", [&] { s.planner.validate(); });
    check(out, "controller", [&] { s.controller.validate(); });
    if (!(s.limits.v_max > 0.0 && s.limits.w_max > 0.0)) out.emplace_back("limits: must be positive");
    if (s.windows.recognition < 0 || s.windows.comms < 0 || s.windows.depth < 0)
        out.emplace_back("latch: windows must be >= 0");
    if (s.faults.track_lost < 0 || s.faults.comms_lost < 0 || s.faults.depth_invalid < 0)
        out.emplace_back("latch: fault thresholds must be >= 0");
    if (!(s.leader_heading_gain > 0.0)) out.emplace_back("leader.heading_gain: must be positive");
    if (!(s.waypoint_tolerance > 0.0)) out.emplace_back("leader.waypoint_tolerance: must be positive");
    return out;
}

}  // namespace platoon::harness
