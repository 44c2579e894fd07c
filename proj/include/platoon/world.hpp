#pragma once

#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "platoon/common.hpp"

namespace platoon::world {

enum class Role { Leader, Follower, Obstacle };

std::string_view to_string(Role role);
Role parse_role(std::string_view text);

struct Pose2D {
    double x = 0.0;      // m
    double y = 0.0;      // m
    double theta = 0.0;  // rad, (-pi, pi]

    bool operator==(const Pose2D&) const = default;
};

// Result lies in (-pi, pi]. Throws InvalidInput on NaN/inf.
double normalize_angle(double theta);

struct ActuatorLimits {
    double v_max = 0.5;  // m/s
    double w_max = 2.0;  // rad/s
};

struct VelocityCommand {
    double linear = 0.0;   // m/s
    double angular = 0.0;  // rad/s
    Tick tick = 0;

    bool is_zero() const { return linear == 0.0 && angular == 0.0; }
    bool operator==(const VelocityCommand&) const = default;
};

// Physical extent of the visible marker / body, used by the synthetic camera.
struct Footprint {
    double width = 0.15;   // m
    double height = 0.15;  // m
};

struct AgentState {
    AgentId id;
    Role role = Role::Follower;
    Pose2D pose;
    double linear_vel = 0.0;
    double angular_vel = 0.0;
    Embedding marker_embedding;
    double imu_heading = 0.0;
    Footprint footprint;
};

// Euler step of the unicycle model. Commands outside the limits are clamped.
AgentState step_kinematics(const AgentState& state, const VelocityCommand& cmd, double dt,
                           const ActuatorLimits& limits = {});

class SimClock {
public:
    explicit SimClock(double dt = 0.05);

    Tick tick() const { return tick_; }
    double dt() const { return dt_; }
    double seconds() const { return static_cast<double>(tick_) * dt_; }
    void advance() { ++tick_; }

private:
    Tick tick_ = 0;
    double dt_;
};

// Detector blackout: `observer` cannot see `target` (scripted occlusion).
struct Blackout {
    AgentId observer;
    AgentId target;
};

// Immutable view of the world at one tick.
struct WorldSnapshot {
    Tick tick = 0;
    std::vector<AgentState> agents;
    std::vector<Blackout> blackouts;

    const AgentState* find(std::string_view id) const;
    bool blacked_out(std::string_view observer, std::string_view target) const;
};

// Unit vector of dimension `dim` drawn from the given engine.
Embedding random_unit_embedding(std::size_t dim, std::mt19937_64& rng);

double euclidean_range(const Pose2D& a, const Pose2D& b);

// Entity registry plus ground-truth integration and IMU sensing.
class World {
public:
    World(double dt, ActuatorLimits limits, double imu_sigma, std::uint64_t seed);

    void add(AgentState agent);
    bool remove(std::string_view id);
    AgentState* find(std::string_view id);
    const AgentState* find(std::string_view id) const;

    void set_blackouts(std::vector<Blackout> blackouts) { blackouts_ = std::move(blackouts); }

    // Applies one command per agent (missing agents receive zero velocity)
    // then advances the clock.
    void step(std::span<const std::pair<AgentId, VelocityCommand>> commands);

    WorldSnapshot snapshot() const;
    const SimClock& clock() const { return clock_; }
    const ActuatorLimits& limits() const { return limits_; }
    const std::vector<AgentState>& agents() const { return agents_; }

private:
    void sense_imu(AgentState& agent);

    SimClock clock_;
    ActuatorLimits limits_;
    double imu_sigma_;
    std::mt19937_64 rng_;
    std::vector<AgentState> agents_;
    std::vector<Blackout> blackouts_;
};

}  // namespace platoon::world
