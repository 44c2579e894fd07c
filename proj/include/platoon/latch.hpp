#pragma once

// Software latch: gated engagement of a follower's autonomous mode.
//
// Disengaged -> Engaged only on an Engage command while every trigger
// condition holds. Engaged -> Disengaged on a Disengage command from either
// origin, or when a sustained fault fires (fail-safe). A fail-safe lands in
// Disengaged; re-engaging needs a fresh Engage command.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "platoon/common.hpp"

namespace platoon::latch {

enum class LatchMode { Disengaged, Engaged };
enum class FaultKind { TrackLost, CommsLost, DepthInvalid };
enum class ReasonKind { Startup, OperatorCommand, LeaderCommand, FailSafe };
enum class CommandVerb { Engage, Disengage };
enum class CommandOrigin { Operator, Leader };

std::string_view to_string(LatchMode v);
std::string_view to_string(FaultKind v);
std::string_view to_string(CommandVerb v);
std::string_view to_string(CommandOrigin v);
LatchMode parse_latch_mode(std::string_view text);
FaultKind parse_fault_kind(std::string_view text);
CommandVerb parse_command_verb(std::string_view text);
CommandOrigin parse_command_origin(std::string_view text);

struct TransitionReason {
    ReasonKind kind = ReasonKind::Startup;
    std::optional<FaultKind> fault;  // set iff kind == FailSafe

    bool operator==(const TransitionReason&) const = default;
};

// "startup", "operator", "leader", "failsafe:track_lost", ...
std::string to_string(const TransitionReason& reason);
TransitionReason parse_reason(std::string_view text);

struct LatchState {
    LatchMode mode = LatchMode::Disengaged;
    Tick last_transition_tick = 0;
    TransitionReason reason;

    bool operator==(const LatchState&) const = default;
};

struct TriggerConditions {
    bool leader_recognized = false;
    bool comms_healthy = false;
    bool depth_valid = false;

    bool all() const { return leader_recognized && comms_healthy && depth_valid; }
    std::vector<std::string> failed() const;
    bool operator==(const TriggerConditions&) const = default;
};

struct LatchCommand {
    CommandVerb verb = CommandVerb::Engage;
    CommandOrigin origin = CommandOrigin::Operator;
    Tick issued = 0;
    AgentId sender;  // must match the origin, see authenticate()

    bool operator==(const LatchCommand&) const = default;
};

// Leader origin must come from the leader's id, operator origin from "operator".
bool authenticate(const LatchCommand& cmd, std::string_view leader_id);

// Evidence windows (ticks) turning timestamps into trigger flags.
struct EvidenceWindows {
    int recognition = 5;  // T_recog
    int comms = 20;       // T_comms
    int depth = 10;       // T_depth
};

// Last tick at which each kind of evidence was observed.
struct Evidence {
    std::optional<Tick> leader_seen;
    std::optional<Tick> comms_ok;       // last system-state poll response
    std::optional<Tick> perception_ok;  // last perception response
    std::optional<Tick> depth_ok;
};

TriggerConditions conditions_from_evidence(const Evidence& evidence, Tick now,
                                           const EvidenceWindows& windows);

// A fault fires once its flag has been false for more than the given number
// of consecutive ticks.
struct FaultThresholds {
    int track_lost = 15;    // T_track
    int comms_lost = 10;    // T_fail
    int depth_invalid = 10;
};

// First fault by priority TrackLost > CommsLost > DepthInvalid, judged on the
// trailing run of false flags in `history` (oldest first).
std::optional<FaultKind> evaluate_faults(std::span<const TriggerConditions> history,
                                         const FaultThresholds& thresholds);

enum class LatchEventKind { Engaged, Disengaged, EngageRejected };
std::string_view to_string(LatchEventKind v);

struct LatchEvent {
    LatchEventKind kind;
    Tick tick;
    TransitionReason reason;
    std::vector<std::string> failed_conditions;  // EngageRejected only
};

struct LatchStepResult {
    LatchState state;
    std::vector<LatchEvent> events;
};

// One command (or none) plus the currently firing fault (if any).
LatchStepResult latch_step(const LatchState& state, const std::optional<LatchCommand>& cmd,
                           const TriggerConditions& cond, std::optional<FaultKind> fault, Tick tick);

// Per-follower latch driven once per tick; keeps the condition history the
// fault evaluation needs.
class Latch {
public:
    explicit Latch(FaultThresholds thresholds = {});

    // Drains `commands` in order, then applies any fault. Ticks must not
    // decrease between calls.
    LatchStepResult step(std::span<const LatchCommand> commands, const TriggerConditions& cond,
                         Tick tick);

    const LatchState& state() const { return state_; }
    std::optional<FaultKind> current_fault() const;

private:
    FaultThresholds thresholds_;
    LatchState state_;
    std::vector<TriggerConditions> history_;
    std::optional<Tick> last_tick_;
};

}  // namespace platoon::latch
