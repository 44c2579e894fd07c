#include "platoon/latch.hpp"

#include <algorithm>

namespace platoon::latch {

std::string_view to_string(LatchMode v)
{
    return v == LatchMode::Engaged ? "engaged" : "disengaged";
}

std::string_view to_string(FaultKind v)
{
    switch (v) {
    case FaultKind::TrackLost: return "track_lost";
    case FaultKind::CommsLost: return "comms_lost";
    case FaultKind::DepthInvalid: return "depth_invalid";
    }
    return "?";
}

std::string_view to_string(CommandVerb v)
{
    return v == CommandVerb::Engage ? "engage" : "disengage";
}

std::string_view to_string(CommandOrigin v)
{
    return v == CommandOrigin::Operator ? "operator" : "leader";
}

std::string_view to_string(LatchEventKind v)
{
    switch (v) {
    case LatchEventKind::Engaged: return "engaged";
    case LatchEventKind::Disengaged: return "disengaged";
    case LatchEventKind::EngageRejected: return "rejected";
    }
    return "?";
}

LatchMode parse_latch_mode(std::string_view text)
{
    if (text == "engaged") return LatchMode::Engaged;
    if (text == "disengaged") return LatchMode::Disengaged;
    throw InvalidInput("unknown latch mode: " + std::string(text));
}

FaultKind parse_fault_kind(std::string_view text)
{
    if (text == "track_lost") return FaultKind::TrackLost;
    if (text == "comms_lost") return FaultKind::CommsLost;
    if (text == "depth_invalid") return FaultKind::DepthInvalid;
    throw InvalidInput("unknown fault kind: " + std::string(text));
}

CommandVerb parse_command_verb(std::string_view text)
{
    if (text == "engage") return CommandVerb::Engage;
    if (text == "disengage") return CommandVerb::Disengage;
    throw InvalidInput("unknown latch verb: " + std::string(text));
}

CommandOrigin parse_command_origin(std::string_view text)
{
    if (text == "operator") return CommandOrigin::Operator;
    if (text == "leader") return CommandOrigin::Leader;
    throw InvalidInput("unknown command origin: " + std::string(text));
}

std::string to_string(const TransitionReason& reason)
{
    switch (reason.kind) {
    case ReasonKind::Startup: return "startup";
    case ReasonKind::OperatorCommand: return "operator";
    case ReasonKind::LeaderCommand: return "leader";
    case ReasonKind::FailSafe:
        return "failsafe:" + std::string(to_string(reason.fault.value_or(FaultKind::TrackLost)));
    }
    return "?";
}

TransitionReason parse_reason(std::string_view text)
{
    if (text == "startup") return {ReasonKind::Startup, std::nullopt};
    if (text == "operator") return {ReasonKind::OperatorCommand, std::nullopt};
    if (text == "leader") return {ReasonKind::LeaderCommand, std::nullopt};
    constexpr std::string_view prefix = "failsafe:";
    if (text.starts_with(prefix))
        return {ReasonKind::FailSafe, parse_fault_kind(text.substr(prefix.size()))};
    throw InvalidInput("unknown transition reason: " + std::string(text));
}

std::vector<std::string> TriggerConditions::failed() const
{
    std::vector<std::string> out;
    if (!leader_recognized) out.emplace_back("leader_recognized");
    if (!comms_healthy) out.emplace_back("comms_healthy");
    if (!depth_valid) out.emplace_back("depth_valid");
    return out;
}

bool authenticate(const LatchCommand& cmd, std::string_view leader_id)
{
    switch (cmd.origin) {
    case CommandOrigin::Leader: return cmd.sender == leader_id;
    case CommandOrigin::Operator: return cmd.sender == kOperatorId;
    }
    return false;
}

TriggerConditions conditions_from_evidence(const Evidence& e, Tick now, const EvidenceWindows& w)
{
    auto recent = [now](const std::optional<Tick>& t, int window) {
        return t.has_value() && now - *t <= window;
    };
    TriggerConditions c;
    c.leader_recognized = recent(e.leader_seen, w.recognition);
    c.comms_healthy = recent(e.comms_ok, w.comms) && recent(e.perception_ok, w.comms);
    c.depth_valid = recent(e.depth_ok, w.depth);
    return c;
}

std::optional<FaultKind> evaluate_faults(std::span<const TriggerConditions> history,
                                         const FaultThresholds& thresholds)
{
    auto trailing_false = [&](bool TriggerConditions::*flag) {
        int run = 0;
        for (auto it = history.rbegin(); it != history.rend() && !((*it).*flag); ++it) ++run;
        return run;
    };
    if (trailing_false(&TriggerConditions::leader_recognized) > thresholds.track_lost)
        return FaultKind::TrackLost;
    if (trailing_false(&TriggerConditions::comms_healthy) > thresholds.comms_lost)
        return FaultKind::CommsLost;
    if (trailing_false(&TriggerConditions::depth_valid) > thresholds.depth_invalid)
        return FaultKind::DepthInvalid;
    return std::nullopt;
}

LatchStepResult latch_step(const LatchState& state, const std::optional<LatchCommand>& cmd,
                           const TriggerConditions& cond, std::optional<FaultKind> fault, Tick tick)
{
    LatchStepResult out{state, {}};

    auto command_reason = [](const LatchCommand& c) {
        return TransitionReason{c.origin == CommandOrigin::Leader ? ReasonKind::LeaderCommand
                                                                  : ReasonKind::OperatorCommand,
                                std::nullopt};
    };
    auto transition = [&](LatchMode mode, TransitionReason reason, LatchEventKind kind) {
        out.state = {mode, tick, reason};
        out.events.push_back({kind, tick, reason, {}});
    };

    if (state.mode == LatchMode::Disengaged) {
        if (cmd && cmd->verb == CommandVerb::Engage) {
            auto failed = cond.failed();
            if (fault) failed.push_back("fault:" + std::string(to_string(*fault)));
            if (failed.empty()) {
                transition(LatchMode::Engaged, command_reason(*cmd), LatchEventKind::Engaged);
            } else {
                out.events.push_back(
                    {LatchEventKind::EngageRejected, tick, command_reason(*cmd), std::move(failed)});
            }
        }
        return out;
    }

    if (cmd && cmd->verb == CommandVerb::Disengage) {
        transition(LatchMode::Disengaged, command_reason(*cmd), LatchEventKind::Disengaged);
    } else if (fault) {
        transition(LatchMode::Disengaged, {ReasonKind::FailSafe, fault}, LatchEventKind::Disengaged);
    }
    return out;
}

Latch::Latch(FaultThresholds thresholds) : thresholds_(thresholds) {}

std::optional<FaultKind> Latch::current_fault() const
{
    return evaluate_faults(history_, thresholds_);
}

LatchStepResult Latch::step(std::span<const LatchCommand> commands, const TriggerConditions& cond,
                            Tick tick)
{
    if (last_tick_ && tick < *last_tick_) throw InvalidInput("latch: tick went backwards");
    last_tick_ = tick;

    history_.push_back(cond);
    const std::size_t keep = static_cast<std::size_t>(
        std::max({thresholds_.track_lost, thresholds_.comms_lost, thresholds_.depth_invalid}) + 2);
    if (history_.size() > keep) history_.erase(history_.begin(), history_.end() - keep);

    const auto fault = current_fault();
    LatchStepResult total{state_, {}};
    auto apply = [&](const std::optional<LatchCommand>& cmd) {
        auto r = latch_step(total.state, cmd, cond, fault, tick);
        total.state = r.state;
        total.events.insert(total.events.end(), r.events.begin(), r.events.end());
    };
    for (const auto& c : commands) apply(c);
    apply(std::nullopt);
    state_ = total.state;
    return total;
}

}  // namespace platoon::latch
