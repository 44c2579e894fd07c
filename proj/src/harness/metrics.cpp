#include "platoon/harness/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

namespace platoon::harness {

namespace {

// Rows grouped per agent, in tick order, keeping first-seen agent order.
struct ByAgent {
    std::vector<AgentId> order;
    std::map<AgentId, std::vector<const LogRow*>> rows;
};

ByAgent group(const std::vector<LogRow>& rows)
{
    ByAgent g;
    for (const auto& r : rows) {
        auto [it, inserted] = g.rows.try_emplace(r.agent);
        if (inserted) g.order.push_back(r.agent);
        it->second.push_back(&r);
    }
    for (auto& [_, v] : g.rows)
        std::stable_sort(v.begin(), v.end(), [](auto* a, auto* b) { return a->tick < b->tick; });
    return g;
}

// Server state per tick (identical on every row of a tick).
struct ServerTick {
    std::string fleet;
    std::uint64_t version = 0;
};

std::map<Tick, ServerTick> server_timeline(const std::vector<LogRow>& rows)
{
    std::map<Tick, ServerTick> out;
    for (const auto& r : rows) out.try_emplace(r.tick, ServerTick{r.fleet_server, r.server_version});
    return out;
}

// (onset tick, version) of every new STOP version.
std::vector<std::pair<Tick, std::uint64_t>> stop_onsets(const std::map<Tick, ServerTick>& timeline)
{
    std::vector<std::pair<Tick, std::uint64_t>> out;
    std::uint64_t prev = 0;
    bool first = true;
    for (const auto& [t, s] : timeline) {
        if (s.fleet == "STOP" && (first || s.version > prev)) out.emplace_back(t, s.version);
        prev = s.version;
        first = false;
    }
    return out;
}

bool has_engage_event(std::string_view events)
{
    while (!events.empty()) {
        const auto bar = events.find('|');
        if (events.substr(0, bar).starts_with("engaged:")) return true;
        if (bar == std::string_view::npos) break;
        events.remove_prefix(bar + 1);
    }
    return false;
}

bool zero_command(const LogRow& r) { return r.cmd_linear == 0.0 && r.cmd_angular == 0.0; }

}  // namespace

const FollowerMetrics* RunMetrics::follower(std::string_view id) const
{
    for (const auto& f : followers)
        if (f.agent == id) return &f;
    return nullptr;
}

RunMetrics compute_metrics(const LogHeader& header, const std::vector<LogRow>& rows)
{
    RunMetrics m;
    const auto g = group(rows);
    const auto timeline = server_timeline(rows);
    m.ticks = timeline.empty() ? 0 : timeline.rbegin()->first + 1;

    double total_err = 0.0;
    int total_ticks = 0;
    for (const auto& id : g.order) {
        const auto& rs = g.rows.at(id);
        if (rs.empty() || !rs.front()->is_follower()) continue;
        FollowerMetrics f;
        f.agent = id;
        double sum = 0.0;
        std::optional<TrackId> last_target;
        for (const auto* r : rs) {
            if (r->plan == "follow" && r->range_true) {
                const double err = std::abs(*r->range_true - header.desired_range);
                sum += err;
                f.max_abs_error = std::max(f.max_abs_error, err);
                ++f.follow_ticks;
            }
            if (r->target_track) {
                if (last_target && *last_target != *r->target_track) ++f.id_switches;
                last_target = r->target_track;
            }
            if (r->range_true) f.min_range = std::min(f.min_range.value_or(*r->range_true), *r->range_true);
            f.tracks_created += r->tracks_created;
            f.tracks_removed += r->tracks_removed;
            if (!r->latch_event.empty()) m.latch_events.push_back({r->tick, id, r->latch_event});
        }
        for (auto it = rs.rbegin(); it != rs.rend(); ++it) {
            const auto* r = *it;
            if (!r->range_true || std::abs(*r->range_true - header.desired_range) > kConvergenceTolerance)
                break;
            f.convergence_tick = r->tick;
        }
        if (f.follow_ticks > 0) f.mean_abs_error = sum / f.follow_ticks;
        total_err += sum;
        total_ticks += f.follow_ticks;
        m.max_abs_error = std::max(m.max_abs_error, f.max_abs_error);
        m.id_switches += f.id_switches;
        m.followers.push_back(std::move(f));
    }
    if (total_ticks > 0) m.mean_abs_error = total_err / total_ticks;
    std::stable_sort(m.latch_events.begin(), m.latch_events.end(),
                     [](const auto& a, const auto& b) { return a.tick < b.tick; });

    for (const auto& [onset, version] : stop_onsets(timeline)) {
        for (const auto& id : g.order) {
            const auto& rs = g.rows.at(id);
            if (rs.empty() || !rs.front()->is_follower()) continue;
            StopLatency s{onset, id, std::nullopt};
            for (const auto* r : rs) {
                if (r->tick < onset) continue;
                if (r->observed_version >= version) {
                    s.latency = r->tick - onset;
                    break;
                }
            }
            m.stop_latencies.push_back(std::move(s));
        }
    }
    return m;
}

nlohmann::ordered_json to_json(const RunMetrics& m)
{
    using json = nlohmann::ordered_json;
    json j;
    j["ticks"] = m.ticks;
    j["mean_abs_error"] = m.mean_abs_error;
    j["max_abs_error"] = m.max_abs_error;
    j["id_switches"] = m.id_switches;
    json fs = json::array();
    for (const auto& f : m.followers) {
        json fj;
        fj["agent"] = f.agent;
        fj["follow_ticks"] = f.follow_ticks;
        fj["mean_abs_error"] = f.mean_abs_error;
        fj["max_abs_error"] = f.max_abs_error;
        fj["id_switches"] = f.id_switches;
        fj["convergence_tick"] = f.convergence_tick ? json(*f.convergence_tick) : json(nullptr);
        fj["min_range"] = f.min_range ? json(*f.min_range) : json(nullptr);
        fj["tracks_created"] = f.tracks_created;
        fj["tracks_removed"] = f.tracks_removed;
        fs.push_back(std::move(fj));
    }
    j["followers"] = std::move(fs);
    json stops = json::array();
    for (const auto& s : m.stop_latencies)
        stops.push_back(json{{"onset", s.onset},
                             {"agent", s.agent},
                             {"latency", s.latency ? json(*s.latency) : json(nullptr)}});
    j["stop_latencies"] = std::move(stops);
    json events = json::array();
    for (const auto& e : m.latch_events)
        events.push_back(json{{"tick", e.tick}, {"agent", e.agent}, {"event", e.event}});
    j["latch_events"] = std::move(events);
    return j;
}

Verdict check_log(const ParsedLog& log)
{
    Verdict v;
    v.metrics = compute_metrics(log.header, log.rows);
    auto flag = [&v](const LogRow& r, const char* inv, std::string detail) {
        v.violations.push_back({r.tick, r.agent, inv, std::move(detail)});
    };

    for (const auto& r : log.rows) {
        if ((r.unresolved > 0) != (r.fleet_server == "STOP"))
            flag(r, "stop-dominance", "server fleet state disagrees with open reports");
    }

    const auto g = group(log.rows);
    for (const auto& id : g.order) {
        const auto& rs = g.rows.at(id);
        if (rs.empty() || !rs.front()->is_follower()) continue;

        std::string prev_mode = "disengaged";
        std::optional<std::uint64_t> prev_version;
        int run_leader = 0, run_comms = 0, run_depth = 0;
        for (const auto* r : rs) {
            run_leader = r->leader_recognized ? 0 : run_leader + 1;
            run_comms = r->comms_healthy ? 0 : run_comms + 1;
            run_depth = r->depth_valid ? 0 : run_depth + 1;
            const bool engaged = r->latch == "engaged";
            const bool all_ok = r->leader_recognized && r->comms_healthy && r->depth_valid;

            if (engaged && prev_mode != "engaged" && !(r->engage_cmd && all_ok))
                flag(*r, "latch-safety", "engaged without an Engage command and a valid trigger set");
            if (has_engage_event(r->latch_event) && !(r->engage_cmd && all_ok))
                flag(*r, "latch-safety", "engage event without a command and a valid trigger set");

            if (engaged) {
                if (run_leader > log.header.t_track + 1)
                    flag(*r, "fault-response", "still engaged after sustained track loss");
                if (run_comms > log.header.t_fail + 1)
                    flag(*r, "fault-response", "still engaged after sustained comms loss");
                if (run_depth > log.header.t_depth_fail + 1)
                    flag(*r, "fault-response", "still engaged after sustained depth loss");
            } else if (!zero_command(*r)) {
                flag(*r, "disengaged-zero-command", "non-zero command while disengaged");
            }

            if (r->fleet_observed == "STOP") {
                if (r->plan == "follow") flag(*r, "stop-dominance", "following while STOP is observed");
                if (!zero_command(*r)) flag(*r, "stop-dominance", "moving while STOP is observed");
            }
            if (prev_version && r->observed_version < *prev_version)
                flag(*r, "version-monotone", "observed version went backwards");
            prev_version = r->observed_version;
            prev_mode = r->latch;
        }
    }

    const auto timeline = server_timeline(log.rows);
    const Tick last_tick = timeline.empty() ? 0 : timeline.rbegin()->first;
    for (const auto& s : v.metrics.stop_latencies) {
        if (s.latency && *s.latency <= log.header.stop_bound) continue;
        const Tick deadline = s.onset + log.header.stop_bound;
        if (!s.latency && deadline > last_tick) continue;  // run ended first
        // Only followers engaged throughout the window are bound by it.
        bool engaged_throughout = true;
        const LogRow* at_deadline = nullptr;
        for (const auto* r : g.rows.at(s.agent)) {
            if (r->tick < s.onset || r->tick > deadline) continue;
            if (r->latch != "engaged") engaged_throughout = false;
            at_deadline = r;
        }
        if (engaged_throughout && at_deadline)
            flag(*at_deadline, "stop-propagation",
                 "STOP from tick " + std::to_string(s.onset) + " not observed within " +
                     std::to_string(log.header.stop_bound) + " ticks");
    }

    std::stable_sort(v.violations.begin(), v.violations.end(),
                     [](const auto& a, const auto& b) { return a.tick < b.tick; });
    return v;
}

Verdict replay_check(const std::filesystem::path& csv)
{
    std::ifstream in(csv);
    if (!in) throw InvalidInput("cannot open " + csv.string());
    return check_log(read_log(in));
}

}  // namespace platoon::harness
