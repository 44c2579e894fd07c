#include "platoon/harness/runner.hpp"

#include <cmath>
#include <fstream>
#include <memory>

#include <spdlog/spdlog.h>

#include "platoon/comms/messages.hpp"
#include "platoon/comms/network.hpp"
#include "platoon/comms/server.hpp"
#include "platoon/comms/transport.hpp"
#include "platoon/tracker.hpp"

namespace platoon::harness {

namespace {

using comms::endpoint::kLatchCommand;
using comms::endpoint::kPerception;
using comms::endpoint::kResolveStop;
using comms::endpoint::kStatus;
using comms::endpoint::kSystemState;

struct FollowerRuntime {
    const AgentSpec* spec;
    comms::VirtualLink status_up;
    comms::VirtualLink status_down;
    comms::VirtualLink perception_up;
    comms::VirtualLink perception_down;
    latch::Latch latch;
    controller::Controller ctrl;
    planner::PlannerState plan;
    latch::Evidence evidence;
    std::optional<comms::PerceptionResult> result;  // newest received
    bool result_fresh = false;                        // arrived this tick
    comms::SystemState observed;
    std::vector<latch::LatchCommand> inbox;
};

std::string join_events(const std::vector<latch::LatchEvent>& events)
{
    std::string out;
    for (const auto& e : events) {
        if (!out.empty()) out += '|';
        out += std::string(latch::to_string(e.kind)) + ":" + latch::to_string(e.reason);
        if (!e.failed_conditions.empty()) {
            out += '[';
            for (std::size_t i = 0; i < e.failed_conditions.size(); ++i)
                out += (i ? ";" : "") + e.failed_conditions[i];
            out += ']';
        }
    }
    return out;
}

class Runner {
public:
    Runner(const Scenario& s, const RunOptions& opt)
        : s_(s),
          seed_(opt.seed.value_or(s.seed)),
          world_(s.dt, s.limits, s.noise.imu_sigma, mix_seed(seed_, 1)),
          status_({s.leader().id, s.network.auto_resolve}),
          perception_(perception_config(s, seed_)),
          service_(status_, perception_)
    {
        if (opt.transport == TransportKind::Http) {
            http_server_ = std::make_unique<comms::HttpServer>(service_);
            const int port = http_server_->start("127.0.0.1", 0);
            transport_ = std::make_unique<comms::HttpTransport>("127.0.0.1", port);
        } else {
            transport_ = std::make_unique<comms::InProcessTransport>(service_);
        }

        const auto embeddings =
            distinct_embeddings(s.agents.size() + s.obstacles.size(), s.embedding_dim, mix_seed(seed_, 2));
        for (std::size_t i = 0; i < s.agents.size(); ++i) {
            const auto& a = s.agents[i];
            world::AgentState st;
            st.id = a.id;
            st.role = a.role;
            st.pose = a.pose;
            st.footprint = a.footprint;
            st.marker_embedding = embeddings[i];
            world_.add(std::move(st));
            status_.register_agent(a.id);
            if (a.role == world::Role::Leader) continue;
            perception_.register_agent(a.id);
            const std::uint64_t ls = mix_seed(seed_, stable_hash(a.id));
            followers_.push_back(FollowerRuntime{
                &a,
                comms::VirtualLink(s.network.status_uplink, mix_seed(ls, 10)),
                comms::VirtualLink(s.network.status_downlink, mix_seed(ls, 11)),
                comms::VirtualLink(s.network.perception_uplink, mix_seed(ls, 12)),
                comms::VirtualLink(s.network.perception_downlink, mix_seed(ls, 13)),
                latch::Latch(s.faults),
                controller::Controller(s.controller, s.limits, s.dt),
                {}, {}, std::nullopt, false, {}, {}});
        }
        for (std::size_t i = 0; i < s.obstacles.size(); ++i)
            obstacle_embeddings_.push_back(embeddings[s.agents.size() + i]);

        header_.scenario = s.name;
        header_.seed = seed_;
        header_.stop_bound = s.network.stop_bound();
        header_.t_track = s.faults.track_lost;
        header_.t_fail = s.faults.comms_lost;
        header_.t_depth_fail = s.faults.depth_invalid;
        header_.desired_range = s.planner.desired_range;
    }

    ~Runner()
    {
        if (http_server_) http_server_->stop();
    }

    RunResult run()
    {
        for (Tick t = 0; t < s_.duration_ticks; ++t) tick(t);
        RunResult r;
        r.header = header_;
        r.rows = std::move(rows_);
        auto verdict = check_log(ParsedLog{r.header, r.rows});
        r.metrics = std::move(verdict.metrics);
        r.violations = std::move(verdict.violations);
        return r;
    }

private:
    static comms::PerceptionServerConfig perception_config(const Scenario& s, std::uint64_t seed)
    {
        comms::PerceptionServerConfig c;
        c.camera = s.camera;
        c.noise = s.noise.detection;
        c.depth = s.depth;
        c.tracker = s.tracker;
        c.seed = mix_seed(seed, 3);
        return c;
    }

    void apply_schedule(Tick t)
    {
        for (std::size_t i = 0; i < s_.obstacles.size(); ++i) {
            const auto& o = s_.obstacles[i];
            if (o.spawn_tick == t) {
                world::AgentState st;
                st.id = o.id;
                st.role = world::Role::Obstacle;
                st.footprint = o.footprint;
                st.marker_embedding = obstacle_embeddings_[i];
                if (o.pose) {
                    st.pose = *o.pose;
                } else {
                    const auto& a = world_.find(o.between->first)->pose;
                    const auto& b = world_.find(o.between->second)->pose;
                    st.pose = {a.x + o.fraction * (b.x - a.x), a.y + o.fraction * (b.y - a.y),
                               std::atan2(b.y - a.y, b.x - a.x)};
                }
                world_.add(std::move(st));
                spdlog::debug("tick {}: obstacle {} spawned", t, o.id);
            }
            if (o.remove_tick && *o.remove_tick == t) {
                world_.remove(o.id);
                spdlog::debug("tick {}: obstacle {} removed", t, o.id);
            }
        }

        std::vector<world::Blackout> blackouts;
        for (const auto& o : s_.occlusions)
            if (t >= o.start && t < o.end) blackouts.push_back({o.observer, o.target});
        world_.set_blackouts(std::move(blackouts));

        for (auto& f : followers_) {
            auto apply = [&](LinkKind kind, comms::VirtualLink& link, const comms::LinkConfig& base) {
                bool down = false;
                for (const auto& o : s_.network.outages)
                    down = down || (o.link == kind && t >= o.start && t < o.end);
                link.set_drop_probability(down ? 1.0 : base.drop_probability);
            };
            apply(LinkKind::StatusUplink, f.status_up, s_.network.status_uplink);
            apply(LinkKind::StatusDownlink, f.status_down, s_.network.status_downlink);
            apply(LinkKind::PerceptionUplink, f.perception_up, s_.network.perception_uplink);
            apply(LinkKind::PerceptionDownlink, f.perception_down, s_.network.perception_downlink);
        }

        for (const auto& c : s_.latch_commands) {
            if (c.tick != t) continue;
            comms::LatchCommandMessage msg;
            msg.target = c.agent;
            msg.command = {c.verb, c.origin, t,
                           c.origin == latch::CommandOrigin::Leader ? s_.leader().id
                                                                     : AgentId(kOperatorId)};
            const auto res = transport_->call(kLatchCommand, comms::encode(msg));
            if (!res.ok()) spdlog::warn("tick {}: latch command for {} refused: {}", t, c.agent, res.body);
        }
        for (const auto& c : s_.resolve_commands) {
            if (c.tick != t) continue;
            const auto res = transport_->call(kResolveStop, comms::encode(comms::ResolveStopRequest{c.agent, t}));
            if (!res.ok()) spdlog::warn("tick {}: resolve for {} refused: {}", t, c.agent, res.body);
        }
    }

    void serve(comms::VirtualLink& up, comms::VirtualLink& down, Tick t)
    {
        for (auto& env : up.receive(t)) {
            const auto res = transport_->call(env.endpoint, env.body);
            down.send(env.endpoint, res.body, t, res.status);
        }
    }

    void receive(FollowerRuntime& f, Tick t)
    {
        f.result_fresh = false;
        for (auto& env : f.perception_down.receive(t)) {
            if (env.status != 200) continue;
            auto r = comms::decode<comms::PerceptionResult>(env.body);
            if (f.result && r.tick <= f.result->tick) continue;
            f.evidence.perception_ok = t;
            const bool leader_live = std::any_of(r.tracks.begin(), r.tracks.end(), [](const auto& tr) {
                return tr.class_label == perception::ClassLabel::LeaderMarker && tr.in_frame();
            });
            if (leader_live) f.evidence.leader_seen = r.tick;
            if (!r.depth.empty()) f.evidence.depth_ok = r.tick;
            f.result = std::move(r);
            f.result_fresh = true;
        }
        for (auto& env : f.status_down.receive(t)) {
            if (env.status != 200 || env.endpoint != kSystemState) continue;
            auto poll = comms::decode<comms::PollResponse>(env.body);
            f.evidence.comms_ok = t;
            if (poll.state.version >= f.observed.version) f.observed = poll.state;
            for (auto& c : poll.commands) f.inbox.push_back(std::move(c));
        }
    }

    std::pair<AgentId, world::VelocityCommand> decide(FollowerRuntime& f, const world::WorldSnapshot& snap,
                                                       Tick t, LogRow& row)
    {
        const auto cond = latch::conditions_from_evidence(f.evidence, t, s_.windows);
        const bool engage_cmd = std::any_of(f.inbox.begin(), f.inbox.end(), [](const auto& c) {
            return c.verb == latch::CommandVerb::Engage;
        });
        const auto lr = f.latch.step(f.inbox, cond, t);
        f.inbox.clear();

        static const std::vector<planner::TrackReport> kNoTracks;
        static const std::vector<planner::DepthReading> kNoDepth;
        const auto& tracks = f.result ? f.result->tracks : kNoTracks;
        const auto& depth = f.result && f.result_fresh ? f.result->depth : kNoDepth;
        planner::PlanInput in{tracks, depth, f.observed.fleet_state, f.latch.state().mode, t};
        const auto po = planner::plan_step(in, f.plan, s_.planner, s_.camera);
        f.plan = po.state;
        const auto cmd = f.ctrl.step(po.deviations, f.latch.state().mode, t);

        const bool obstacle = std::any_of(tracks.begin(), tracks.end(), [](const auto& tr) {
            return tr.class_label == perception::ClassLabel::Obstacle && tr.in_frame();
        });
        const auto* self = snap.find(f.spec->id);
        comms::StatusUpdate update{f.spec->id,
                                   t,
                                   {self->pose.x, self->pose.y, self->imu_heading},
                                   f.latch.state().mode,
                                   f.plan.plan.kind,
                                   obstacle};
        f.status_up.send(std::string(kStatus), comms::encode(update), t);

        row.latch = latch::to_string(f.latch.state().mode);
        row.latch_reason = latch::to_string(f.latch.state().reason);
        row.latch_event = join_events(lr.events);
        row.engage_cmd = engage_cmd ? 1 : 0;
        row.leader_recognized = cond.leader_recognized;
        row.comms_healthy = cond.comms_healthy;
        row.depth_valid = cond.depth_valid;
        row.plan = planner::to_string(f.plan.plan.kind);
        row.target_track = f.plan.plan.target_track_id;
        row.obstacle_in_frame = obstacle;
        row.fleet_observed = planner::to_string(f.observed.fleet_state);
        row.observed_version = f.observed.version;
        if (const auto* target = snap.find(*f.spec->follows))
            row.range_true = world::euclidean_range(self->pose, target->pose);
        if (po.deviations.known) {
            row.range_measured = po.deviations.linear_dev + s_.planner.desired_range;
            row.linear_dev = po.deviations.linear_dev;
            row.angular_dev = po.deviations.angular_dev;
        }
        row.cmd_linear = cmd.linear;
        row.cmd_angular = cmd.angular;
        if (f.result_fresh) {
            for (const auto& e : f.result->events) {
                if (e.kind == tracker::TrackEventKind::Created) ++row.tracks_created;
                if (e.kind == tracker::TrackEventKind::Removed) ++row.tracks_removed;
            }
        }
        return {f.spec->id, cmd};
    }

    world::VelocityCommand leader_command(const world::AgentState& self, planner::FleetState fleet, Tick t)
    {
        world::VelocityCommand cmd{0.0, 0.0, t};
        if (fleet == planner::FleetState::Stop) return cmd;
        const auto& spec = s_.leader();
        while (waypoint_ < spec.waypoints.size()) {
            const auto& w = spec.waypoints[waypoint_];
            const double dx = w.x - self.pose.x;
            const double dy = w.y - self.pose.y;
            if (std::hypot(dx, dy) > s_.waypoint_tolerance) {
                const double err = world::normalize_angle(std::atan2(dy, dx) - self.pose.theta);
                cmd.linear = spec.cruise_speed;
                cmd.angular = std::clamp(s_.leader_heading_gain * err, -s_.limits.w_max, s_.limits.w_max);
                break;
            }
            ++waypoint_;
        }
        return cmd;
    }

    void tick(Tick t)
    {
        apply_schedule(t);
        const auto snap = world_.snapshot();
        perception_.publish(snap);

        for (auto& f : followers_) {
            f.perception_up.send(std::string(kPerception), comms::encode(comms::PerceptionRequest{f.spec->id, t}), t);
            if (t % s_.network.poll_period == 0)
                f.status_up.send(std::string(kSystemState), comms::encode(comms::PollRequest{f.spec->id, t}), t);
        }
        for (auto& f : followers_) {
            serve(f.perception_up, f.perception_down, t);
            serve(f.status_up, f.status_down, t);
        }
        for (auto& f : followers_) receive(f, t);

        std::vector<std::pair<AgentId, world::VelocityCommand>> commands;
        std::vector<LogRow> follower_rows;
        for (auto& f : followers_) {
            LogRow row;
            commands.push_back(decide(f, snap, t, row));
            follower_rows.push_back(std::move(row));
        }

        const auto server = status_.system_state();
        const int unresolved = static_cast<int>(status_.unresolved().size());
        const auto& leader_spec = s_.leader();
        const auto* leader = snap.find(leader_spec.id);
        const auto leader_cmd = leader_command(*leader, server.fleet_state, t);
        commands.emplace_back(leader_spec.id, leader_cmd);

        std::size_t fi = 0;
        for (const auto& spec : s_.agents) {
            const auto* st = snap.find(spec.id);
            LogRow row;
            if (spec.role == world::Role::Follower) {
                row = std::move(follower_rows[fi++]);
            } else {
                row.cmd_linear = leader_cmd.linear;
                row.cmd_angular = leader_cmd.angular;
                row.fleet_observed = planner::to_string(server.fleet_state);
                row.observed_version = server.version;
            }
            row.tick = t;
            row.agent = spec.id;
            row.role = world::to_string(spec.role);
            row.x = st->pose.x;
            row.y = st->pose.y;
            row.theta = st->pose.theta;
            row.imu_heading = st->imu_heading;
            row.v = st->linear_vel;
            row.omega = st->angular_vel;
            row.fleet_server = planner::to_string(server.fleet_state);
            row.server_version = server.version;
            row.unresolved = unresolved;
            rows_.push_back(std::move(row));
        }

        world_.step(commands);
    }

    const Scenario& s_;
    std::uint64_t seed_;
    world::World world_;
    comms::StatusServer status_;
    comms::PerceptionServer perception_;
    comms::CoordinationService service_;
    std::unique_ptr<comms::HttpServer> http_server_;
    std::unique_ptr<comms::Transport> transport_;
    std::vector<FollowerRuntime> followers_;
    std::vector<Embedding> obstacle_embeddings_;
    std::size_t waypoint_ = 0;
    LogHeader header_;
    std::vector<LogRow> rows_;
};

}  // namespace

std::string_view to_string(TransportKind k) { return k == TransportKind::Http ? "http" : "sim"; }

TransportKind parse_transport(std::string_view text)
{
    if (text == "sim") return TransportKind::Sim;
    if (text == "http") return TransportKind::Http;
    throw InvalidInput("unknown transport: " + std::string(text));
}

std::vector<Embedding> distinct_embeddings(std::size_t count, std::size_t dim, std::uint64_t seed,
                                           double max_abs_cos)
{
    std::mt19937_64 rng(seed);
    std::vector<Embedding> out;
    constexpr int kMaxDraws = 10000;
    for (std::size_t i = 0; i < count; ++i) {
        for (int attempt = 0;; ++attempt) {
            if (attempt == kMaxDraws) throw InvalidInput("cannot draw distinct embeddings; raise embedding_dim");
            auto e = world::random_unit_embedding(dim, rng);
            const bool distinct = std::all_of(out.begin(), out.end(), [&](const Embedding& o) {
                return std::abs(tracker::cosine_similarity(e, o)) <= max_abs_cos;
            });
            if (distinct) {
                out.push_back(std::move(e));
                break;
            }
        }
    }
    return out;
}

RunResult run(const Scenario& scenario, const RunOptions& options)
{
    Runner runner(scenario, options);
    return runner.run();
}

void write_outputs(const RunResult& result, TransportKind transport, const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    {
        std::ofstream csv(dir / "log.csv", std::ios::binary);
        write_log(csv, result.header, result.rows);
        if (!csv) throw std::runtime_error("cannot write " + (dir / "log.csv").string());
    }
    nlohmann::ordered_json summary;
    summary["scenario"] = result.header.scenario;
    summary["seed"] = result.header.seed;
    summary["transport"] = to_string(transport);
    summary["stop_bound"] = result.header.stop_bound;
    summary["metrics"] = to_json(result.metrics);
    nlohmann::ordered_json violations = nlohmann::ordered_json::array();
    for (const auto& v : result.violations)
        violations.push_back({{"tick", v.tick}, {"agent", v.agent}, {"invariant", v.invariant}, {"detail", v.detail}});
    summary["violations"] = std::move(violations);
    summary["passed"] = result.ok();
    std::ofstream out(dir / "summary.json", std::ios::binary);
    out << summary.dump(2) << '\n';
    if (!out) throw std::runtime_error("cannot write " + (dir / "summary.json").string());
}

}  // namespace platoon::harness
