#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "platoon/world.hpp"

using namespace platoon;
using namespace platoon::world;
using std::numbers::pi;

namespace {

AgentState at(Pose2D pose)
{
    AgentState s;
    s.id = "A";
    s.pose = pose;
    return s;
}

const ActuatorLimits kWide{10.0, 10.0};

}  // namespace

TEST_CASE("step_kinematics worked examples")
{
    auto a = step_kinematics(at({0, 0, 0}), {1.0, 0.0, 0}, 1.0, kWide);
    CHECK(a.pose.x == doctest::Approx(1.0));
    CHECK(a.pose.y == doctest::Approx(0.0));
    CHECK(a.pose.theta == doctest::Approx(0.0));

    auto b = step_kinematics(at({0, 0, pi / 2}), {2.0, 0.0, 0}, 0.5, kWide);
    CHECK(b.pose.x == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(std::abs(b.pose.x) < 1e-12);
    CHECK(b.pose.y == doctest::Approx(1.0));
    CHECK(b.pose.theta == doctest::Approx(pi / 2));

    // Euler step: position uses the old heading.
    auto c = step_kinematics(at({0, 0, 0}), {1.0, pi, 0}, 1.0, kWide);
    CHECK(c.pose.x == doctest::Approx(1.0));
    CHECK(c.pose.y == doctest::Approx(0.0));
    CHECK(c.pose.theta == doctest::Approx(pi));
}

TEST_CASE("commands are clamped to the actuator limits")
{
    const ActuatorLimits lim{0.5, 2.0};
    auto s = step_kinematics(at({0, 0, 0}), {3.0, -9.0, 0}, 1.0, lim);
    CHECK(s.linear_vel == doctest::Approx(0.5));
    CHECK(s.angular_vel == doctest::Approx(-2.0));
    CHECK(s.pose.x == doctest::Approx(0.5));
}

TEST_CASE("zero velocity leaves the pose unchanged")
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-10, 10);
    for (int i = 0; i < 200; ++i) {
        Pose2D p{u(rng), u(rng), normalize_angle(u(rng))};
        auto s = step_kinematics(at(p), {}, 0.05);
        CHECK(s.pose == p);
    }
}

TEST_CASE("normalize_angle")
{
    CHECK(normalize_angle(0.0) == 0.0);
    CHECK(normalize_angle(3 * pi) == doctest::Approx(pi));
    CHECK(normalize_angle(-3 * pi / 2) == doctest::Approx(pi / 2));
    CHECK(normalize_angle(-pi) == doctest::Approx(pi));
    CHECK(normalize_angle(pi) == doctest::Approx(pi));
    CHECK_THROWS_AS(normalize_angle(std::nan("")), InvalidInput);
    CHECK_THROWS_AS(normalize_angle(INFINITY), InvalidInput);

    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-100, 100);
    for (int i = 0; i < 1000; ++i) {
        const double t = u(rng);
        const double n = normalize_angle(t);
        CHECK(n > -pi);
        CHECK(n <= pi);
        CHECK(normalize_angle(n) == n);
        // Same direction as the input.
        CHECK(std::cos(n) == doctest::Approx(std::cos(t)).epsilon(1e-9));
        CHECK(std::sin(n) == doctest::Approx(std::sin(t)).epsilon(1e-9));
    }
}

TEST_CASE("random embeddings are unit norm")
{
    std::mt19937_64 rng(1);
    for (std::size_t dim : {2u, 16u, 128u}) {
        auto e = random_unit_embedding(dim, rng);
        REQUIRE(e.size() == dim);
        double n = 0;
        for (double v : e) n += v * v;
        CHECK(std::sqrt(n) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("World steps agents, advances the clock, and is seed-deterministic")
{
    auto build = [] {
        World w(0.05, {}, 0.01, 42);
        w.add(at({0, 0, 0}));
        auto b = at({1, 0, 0});
        b.id = "B";
        w.add(b);
        return w;
    };
    World w1 = build(), w2 = build();
    const std::vector<std::pair<AgentId, VelocityCommand>> cmds{{"A", {0.2, 0.1, 0}}};
    for (int i = 0; i < 20; ++i) {
        w1.step(cmds);
        w2.step(cmds);
    }
    CHECK(w1.clock().tick() == 20);
    CHECK(w1.clock().seconds() == doctest::Approx(1.0));
    const auto* a1 = w1.find("A");
    const auto* a2 = w2.find("A");
    CHECK(a1->pose == a2->pose);
    CHECK(a1->imu_heading == a2->imu_heading);
    CHECK(a1->pose.x > 0.0);
    // B received no command and stays put.
    CHECK(w1.find("B")->pose == Pose2D{1, 0, 0});

    CHECK_THROWS_AS(w1.add(at({0, 0, 0})), InvalidInput);
    CHECK(w1.remove("B"));
    CHECK_FALSE(w1.remove("B"));
    CHECK(w1.snapshot().agents.size() == 1);
}

TEST_CASE("IMU heading noise has the configured spread")
{
    World w(0.05, {}, 0.01, 3);
    w.add(at({0, 0, 0.3}));
    double sum = 0, sum2 = 0;
    const int n = 4000;
    for (int i = 0; i < n; ++i) {
        w.step({});
        const double e = normalize_angle(w.find("A")->imu_heading - 0.3);
        sum += e;
        sum2 += e * e;
    }
    const double mean = sum / n;
    const double sd = std::sqrt(sum2 / n - mean * mean);
    CHECK(std::abs(mean) < 0.001);
    CHECK(sd == doctest::Approx(0.01).epsilon(0.05));
}

TEST_CASE("snapshot blackouts")
{
    WorldSnapshot snap;
    snap.blackouts = {{"F1", "L"}};
    CHECK(snap.blacked_out("F1", "L"));
    CHECK_FALSE(snap.blacked_out("L", "F1"));
    CHECK(euclidean_range({0, 0, 0}, {3, 4, 1}) == doctest::Approx(5.0));
}
