#include "platoon/controller.hpp"

#include <algorithm>
#include <cmath>

namespace platoon::controller {

void ControllerGains::validate() const
{
    if (!(k_lin > 0.0) || !(k_ang > 0.0)) throw InvalidInput("controller: gains must be positive");
    if (deadband_lin < 0.0 || deadband_ang < 0.0)
        throw InvalidInput("controller: deadbands must be non-negative");
    if (!(angular_slew > 0.0)) throw InvalidInput("controller: angular_slew must be positive");
}

VelocityCommand control_step(const planner::Deviations& dev, const ControllerGains& gains,
                             latch::LatchMode latch_mode, const world::ActuatorLimits& limits,
                             Tick tick)
{
    VelocityCommand cmd{0.0, 0.0, tick};
    if (latch_mode != latch::LatchMode::Engaged || !dev.known) return cmd;

    if (std::abs(dev.linear_dev) > gains.deadband_lin)
        cmd.linear = std::clamp(gains.k_lin * dev.linear_dev, -limits.v_max, limits.v_max);
    if (std::abs(dev.angular_dev) > gains.deadband_ang)
        cmd.angular = std::clamp(-gains.k_ang * dev.angular_dev, -limits.w_max, limits.w_max);
    return cmd;
}

VelocityCommand apply_slew_limit(const VelocityCommand& cmd, const VelocityCommand& previous,
                                 double angular_slew, double dt)
{
    if (cmd.is_zero()) return cmd;
    VelocityCommand out = cmd;
    const double max_change = angular_slew * dt;
    out.angular = std::clamp(cmd.angular, previous.angular - max_change,
                             previous.angular + max_change);
    return out;
}

Controller::Controller(ControllerGains gains, world::ActuatorLimits limits, double dt)
    : gains_(gains), limits_(limits), dt_(dt)
{
    gains_.validate();
    if (!(dt > 0.0)) throw InvalidInput("controller: dt must be positive");
}

VelocityCommand Controller::step(const planner::Deviations& dev, latch::LatchMode latch_mode,
                                 Tick tick)
{
    const auto raw = control_step(dev, gains_, latch_mode, limits_, tick);
    previous_ = apply_slew_limit(raw, previous_, gains_.angular_slew, dt_);
    return previous_;
}

}  // namespace platoon::controller
