#pragma once

// Per-tick CSV log. First line is a `#` header carrying the run parameters
// replay checks need; then a column header; then one row per (tick, agent).
// Empty cells mean "not applicable" (leader rows, unknown deviations).

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "platoon/common.hpp"

namespace platoon::harness {

struct LogHeader {
    std::string scenario;
    std::uint64_t seed = 0;
    int stop_bound = 0;        // ticks
    int t_track = 0;           // fault thresholds
    int t_fail = 0;
    int t_depth_fail = 0;
    double desired_range = 0.30;

    bool operator==(const LogHeader&) const = default;
};

struct LogRow {
    Tick tick = 0;
    AgentId agent;
    std::string role;
    double x = 0.0, y = 0.0, theta = 0.0, imu_heading = 0.0;
    double v = 0.0, omega = 0.0;  // command applied this tick

    // Follower columns; empty for the leader.
    std::string latch;         // engaged / disengaged
    std::string latch_reason;  // reason of the last transition
    std::string latch_event;   // events this tick, '|'-separated, e.g. engaged:operator
    int engage_cmd = 0;        // an Engage command was applied this tick
    int leader_recognized = 0;
    int comms_healthy = 0;
    int depth_valid = 0;
    std::string plan;
    std::optional<TrackId> target_track;
    int obstacle_in_frame = 0;
    std::string fleet_observed;
    std::uint64_t observed_version = 0;

    std::string fleet_server;
    std::uint64_t server_version = 0;
    int unresolved = 0;  // open obstacle reports at the server

    std::optional<double> range_true;      // to the followed agent
    std::optional<double> range_measured;  // range the planner used
    std::optional<double> linear_dev;
    std::optional<double> angular_dev;
    double cmd_linear = 0.0;
    double cmd_angular = 0.0;
    int tracks_created = 0;
    int tracks_removed = 0;

    bool is_follower() const { return role == "follower"; }
    bool operator==(const LogRow&) const = default;
};

const std::vector<std::string>& log_columns();

void write_log(std::ostream& out, const LogHeader& header, const std::vector<LogRow>& rows);

struct ParsedLog {
    LogHeader header;
    std::vector<LogRow> rows;
};

// Throws InvalidInput with the line number on malformed input.
ParsedLog read_log(std::istream& in);

// Shortest text that parses back to the same double.
std::string format_double(double v);

}  // namespace platoon::harness
