#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "platoon/controller.hpp"

using namespace platoon;
using namespace platoon::controller;
using latch::LatchMode;
using planner::Deviations;

TEST_CASE("control_step examples")
{
    ControllerGains g;
    g.k_lin = 1.0;
    const world::ActuatorLimits lim;
    CHECK(control_step({0, 0, true}, g, LatchMode::Engaged, lim, 1).is_zero());

    const auto approach = control_step({0.2, 0, true}, g, LatchMode::Engaged, lim, 1);
    CHECK(approach.linear == doctest::Approx(0.2));
    CHECK(approach.angular == 0.0);
    CHECK(approach.tick == 1);

    CHECK(control_step({0.2, 0.3, true}, g, LatchMode::Disengaged, lim, 1).is_zero());
    CHECK(control_step({0.2, 0.3, false}, g, LatchMode::Engaged, lim, 1).is_zero());

    // Target to the right (positive bearing) turns clockwise.
    CHECK(control_step({0, 0.3, true}, g, LatchMode::Engaged, lim, 1).angular == doctest::Approx(-0.6));
}

TEST_CASE("deadbands zero each axis separately")
{
    const ControllerGains g;
    const auto c = control_step({0.01, 0.5, true}, g, LatchMode::Engaged, {}, 1);
    CHECK(c.linear == 0.0);
    CHECK(c.angular != 0.0);
    const auto d = control_step({0.5, -0.01, true}, g, LatchMode::Engaged, {}, 1);
    CHECK(d.linear != 0.0);
    CHECK(d.angular == 0.0);
}

TEST_CASE("limits hold and closer than the setpoint never approaches")
{
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(-3, 3), gain(0.1, 10);
    const world::ActuatorLimits lim{0.5, 2.0};
    for (int i = 0; i < 5000; ++i) {
        ControllerGains g;
        g.k_lin = gain(rng);
        g.k_ang = gain(rng);
        const Deviations dev{u(rng), u(rng) / 3, true};
        const auto c = control_step(dev, g, LatchMode::Engaged, lim, i);
        CHECK(std::abs(c.linear) <= lim.v_max);
        CHECK(std::abs(c.angular) <= lim.w_max);
        if (dev.linear_dev < 0) CHECK(c.linear <= 0.0);
    }
}

TEST_CASE("slew limit on angular rate")
{
    const VelocityCommand prev{0.1, 0.0, 0};
    const auto limited = apply_slew_limit({0.1, 1.5, 1}, prev, 4.0, 0.05);
    CHECK(limited.angular == doctest::Approx(0.2));
    CHECK(limited.linear == 0.1);
    CHECK(apply_slew_limit({0.0, 0.0, 1}, {0.3, 1.5, 0}, 4.0, 0.05).is_zero());

    Controller ctl({}, {}, 0.05);
    double last = 0.0;
    for (Tick t = 0; t < 20; ++t) {
        const auto c = ctl.step({0.2, -0.6, true}, LatchMode::Engaged, t);
        CHECK(std::abs(c.angular - last) <= 4.0 * 0.05 + 1e-12);
        last = c.angular;
    }
    CHECK(last == doctest::Approx(1.2));
    CHECK(ctl.step({0.2, -0.6, true}, LatchMode::Disengaged, 20).is_zero());
}

TEST_CASE("gain validation")
{
    ControllerGains g;
    g.k_lin = 0;
    CHECK_THROWS_AS(g.validate(), InvalidInput);
    g = {};
    g.deadband_ang = -1;
    CHECK_THROWS_AS(g.validate(), InvalidInput);
}
