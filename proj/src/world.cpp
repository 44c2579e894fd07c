#include "platoon/world.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <spdlog/spdlog.h>

namespace platoon::world {

std::string_view to_string(Role role)
{
    switch (role) {
    case Role::Leader: return "leader";
    case Role::Follower: return "follower";
    case Role::Obstacle: return "obstacle";
    }
    return "?";
}

Role parse_role(std::string_view text)
{
    if (text == "leader") return Role::Leader;
    if (text == "follower") return Role::Follower;
    if (text == "obstacle") return Role::Obstacle;
    throw InvalidInput("unknown role: " + std::string(text));
}

double normalize_angle(double theta)
{
    if (!std::isfinite(theta)) throw InvalidInput("normalize_angle: non-finite angle");
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double r = std::fmod(theta, two_pi);  // (-2pi, 2pi)
    if (r > std::numbers::pi) r -= two_pi;
    else if (r <= -std::numbers::pi) r += two_pi;
    return r;
}

AgentState step_kinematics(const AgentState& state, const VelocityCommand& cmd, double dt,
                           const ActuatorLimits& limits)
{
    if (!(dt > 0.0)) throw InvalidInput("step_kinematics: dt must be positive");

    const double v = std::clamp(cmd.linear, -limits.v_max, limits.v_max);
    const double w = std::clamp(cmd.angular, -limits.w_max, limits.w_max);
    if (v != cmd.linear || w != cmd.angular) {
        spdlog::debug("agent {}: command ({}, {}) clamped to ({}, {})", state.id, cmd.linear,
                      cmd.angular, v, w);
    }

    AgentState next = state;
    next.pose.x = state.pose.x + v * std::cos(state.pose.theta) * dt;
    next.pose.y = state.pose.y + v * std::sin(state.pose.theta) * dt;
    next.pose.theta = normalize_angle(state.pose.theta + w * dt);
    next.linear_vel = v;
    next.angular_vel = w;
    return next;
}

SimClock::SimClock(double dt) : dt_(dt)
{
    if (!(dt > 0.0)) throw InvalidInput("SimClock: dt must be positive");
}

const AgentState* WorldSnapshot::find(std::string_view id) const
{
    auto it = std::find_if(agents.begin(), agents.end(), [&](const auto& a) { return a.id == id; });
    return it == agents.end() ? nullptr : &*it;
}

bool WorldSnapshot::blacked_out(std::string_view observer, std::string_view target) const
{
    return std::any_of(blackouts.begin(), blackouts.end(), [&](const Blackout& b) {
        return b.observer == observer && b.target == target;
    });
}

Embedding random_unit_embedding(std::size_t dim, std::mt19937_64& rng)
{
    if (dim == 0) throw InvalidInput("embedding dimension must be positive");
    std::normal_distribution<double> gauss(0.0, 1.0);
    Embedding e(dim);
    double norm = 0.0;
    do {
        norm = 0.0;
        for (auto& v : e) {
            v = gauss(rng);
            norm += v * v;
        }
    } while (norm < 1e-12);
    norm = std::sqrt(norm);
    for (auto& v : e) v /= norm;
    return e;
}

double euclidean_range(const Pose2D& a, const Pose2D& b)
{
    return std::hypot(b.x - a.x, b.y - a.y);
}

World::World(double dt, ActuatorLimits limits, double imu_sigma, std::uint64_t seed)
    : clock_(dt), limits_(limits), imu_sigma_(imu_sigma), rng_(seed)
{
    if (imu_sigma < 0.0) throw InvalidInput("imu sigma must be non-negative");
}

void World::add(AgentState agent)
{
    if (find(agent.id)) throw InvalidInput("duplicate agent id: " + agent.id);
    agent.pose.theta = normalize_angle(agent.pose.theta);
    sense_imu(agent);
    agents_.push_back(std::move(agent));
}

bool World::remove(std::string_view id)
{
    auto it = std::find_if(agents_.begin(), agents_.end(), [&](const auto& a) { return a.id == id; });
    if (it == agents_.end()) return false;
    agents_.erase(it);
    return true;
}

AgentState* World::find(std::string_view id)
{
    auto it = std::find_if(agents_.begin(), agents_.end(), [&](const auto& a) { return a.id == id; });
    return it == agents_.end() ? nullptr : &*it;
}

const AgentState* World::find(std::string_view id) const
{
    return const_cast<World*>(this)->find(id);
}

void World::step(std::span<const std::pair<AgentId, VelocityCommand>> commands)
{
    for (auto& agent : agents_) {
        VelocityCommand cmd{0.0, 0.0, clock_.tick()};
        for (const auto& [id, c] : commands) {
            if (id == agent.id) cmd = c;
        }
        agent = step_kinematics(agent, cmd, clock_.dt(), limits_);
        sense_imu(agent);
    }
    clock_.advance();
}

void World::sense_imu(AgentState& agent)
{
    // Drawn for every agent every tick so the stream does not depend on which
    // agents happen to be moving.
    std::normal_distribution<double> noise(0.0, 1.0);
    agent.imu_heading = normalize_angle(agent.pose.theta + imu_sigma_ * noise(rng_));
}

WorldSnapshot World::snapshot() const
{
    return WorldSnapshot{clock_.tick(), agents_, blackouts_};
}

}  // namespace platoon::world
