#pragma once

#include <optional>

#include "platoon/latch.hpp"
#include "platoon/planner.hpp"
#include "platoon/world.hpp"

namespace platoon::controller {

using world::VelocityCommand;

struct ControllerGains {
    double k_lin = 5.0;         // 1/s
    double k_ang = 2.0;         // 1/s
    double deadband_lin = 0.02; // m
    double deadband_ang = 0.02; // rad
    double angular_slew = 4.0;  // rad/s^2

    void validate() const;
};

// Proportional law with deadbands:
//   linear  = clamp(k_lin * linear_dev)
//   angular = clamp(-k_ang * angular_dev)
// Zero when the latch is disengaged or the deviations are unknown.
VelocityCommand control_step(const planner::Deviations& dev, const ControllerGains& gains,
                             latch::LatchMode latch_mode, const world::ActuatorLimits& limits,
                             Tick tick);

// Limits the change of angular rate between consecutive commands to
// angular_slew * dt. Zero commands pass through unchanged.
VelocityCommand apply_slew_limit(const VelocityCommand& cmd, const VelocityCommand& previous,
                                 double angular_slew, double dt);

// control_step plus slew limiting against the previously issued command.
class Controller {
public:
    Controller(ControllerGains gains, world::ActuatorLimits limits, double dt);

    VelocityCommand step(const planner::Deviations& dev, latch::LatchMode latch_mode, Tick tick);
    const VelocityCommand& last() const { return previous_; }

private:
    ControllerGains gains_;
    world::ActuatorLimits limits_;
    double dt_;
    VelocityCommand previous_;
};

}  // namespace platoon::controller
