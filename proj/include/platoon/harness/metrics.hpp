#pragma once

// Run metrics and cross-module invariant checks, both computed from the
// per-tick log only so they can be recomputed offline.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "platoon/harness/log.hpp"

namespace platoon::harness {

inline constexpr double kConvergenceTolerance = 0.05;  // m around the desired range

struct StopLatency {
    Tick onset = 0;  // tick the server entered the new STOP version
    AgentId agent;
    // Ticks until the agent held that version or a later one; nullopt when
    // it never did (disengaged, or the run ended first).
    std::optional<Tick> latency;

    bool operator==(const StopLatency&) const = default;
};

struct LatchEventRecord {
    Tick tick = 0;
    AgentId agent;
    std::string event;

    bool operator==(const LatchEventRecord&) const = default;
};

struct FollowerMetrics {
    AgentId agent;
    int follow_ticks = 0;
    double mean_abs_error = 0.0;  // |range_true - desired| over Follow ticks
    double max_abs_error = 0.0;
    int id_switches = 0;          // target_track changed from one id to another
    // First tick from which the range stays within the tolerance until the end.
    std::optional<Tick> convergence_tick;
    std::optional<double> min_range;
    int tracks_created = 0;
    int tracks_removed = 0;

    bool operator==(const FollowerMetrics&) const = default;
};

struct RunMetrics {
    Tick ticks = 0;
    std::vector<FollowerMetrics> followers;
    double mean_abs_error = 0.0;
    double max_abs_error = 0.0;
    int id_switches = 0;
    std::vector<StopLatency> stop_latencies;
    std::vector<LatchEventRecord> latch_events;

    const FollowerMetrics* follower(std::string_view id) const;
    bool operator==(const RunMetrics&) const = default;
};

RunMetrics compute_metrics(const LogHeader& header, const std::vector<LogRow>& rows);

nlohmann::ordered_json to_json(const RunMetrics& m);

struct Violation {
    Tick tick = 0;
    AgentId agent;
    std::string invariant;  // latch-safety, fault-response, stop-dominance, ...
    std::string detail;
};

struct Verdict {
    std::vector<Violation> violations;
    RunMetrics metrics;

    bool ok() const { return violations.empty(); }
};

Verdict check_log(const ParsedLog& log);
Verdict replay_check(const std::filesystem::path& csv);

}  // namespace platoon::harness
