#pragma once

// Scenario runner: wires world, perception server, per-follower latch,
// planner and controller, and the virtual network into one tick loop.
//
// Per tick t:
//   1. scheduled events (obstacles, occlusions, latch / resolve commands)
//   2. snapshot published to the perception server
//   3. followers send a perception request for t, and a poll every P ticks
//   4. the server handles every uplink message due at t, in follower order
//   5. followers take delivered responses, run latch -> planner -> controller
//      and send a status update
//   6. the leader follows its waypoints unless the fleet is stopped
//   7. one log row per agent, then the world advances

#include <filesystem>
#include <optional>

#include "platoon/harness/log.hpp"
#include "platoon/harness/metrics.hpp"
#include "platoon/harness/scenario.hpp"

namespace platoon::harness {

enum class TransportKind { Sim, Http };

std::string_view to_string(TransportKind k);
TransportKind parse_transport(std::string_view text);

struct RunOptions {
    std::optional<std::uint64_t> seed;  // overrides the scenario seed
    TransportKind transport = TransportKind::Sim;
};

struct RunResult {
    LogHeader header;
    std::vector<LogRow> rows;
    RunMetrics metrics;
    std::vector<Violation> violations;

    bool ok() const { return violations.empty(); }
};

RunResult run(const Scenario& scenario, const RunOptions& options = {});

// Writes log.csv and summary.json into `dir` (created if needed).
void write_outputs(const RunResult& result, TransportKind transport, const std::filesystem::path& dir);

// Marker embeddings for `count` entities: unit vectors, pairwise |cos| <= max_abs_cos.
std::vector<Embedding> distinct_embeddings(std::size_t count, std::size_t dim, std::uint64_t seed,
                                           double max_abs_cos = 0.3);

}  // namespace platoon::harness
