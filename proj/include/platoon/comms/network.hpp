#pragma once

// Tick-quantised virtual network used in simulation mode. Messages are opaque
// wire strings; each link owns a seeded RNG so runs are reproducible.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "platoon/common.hpp"

namespace platoon::comms {

struct LinkConfig {
    int latency = 1;            // ticks, fixed part
    int jitter = 0;             // ticks, uniform extra in [0, jitter]
    double drop_probability = 0.0;
    bool fifo = true;

    void validate() const;
    int max_latency() const { return latency + jitter; }
};

struct Envelope {
    std::uint64_t seq = 0;  // per-link send order
    std::string endpoint;   // e.g. "/status"
    std::string body;
    Tick sent = 0;
    Tick deliver_at = 0;
    int status = 0;  // response status; 0 on requests
};

// One-directional link. Delivered messages arrive exactly once, ordered by
// (deliver_at, seq); with `fifo` set deliver_at never decreases in send order.
class VirtualLink {
public:
    VirtualLink(LinkConfig cfg, std::uint64_t seed);

    // Returns false when the message was dropped.
    bool send(std::string endpoint, std::string body, Tick now, int status = 0);

    // Every message with deliver_at <= now, in delivery order.
    std::vector<Envelope> receive(Tick now);

    std::size_t in_flight() const { return queue_.size(); }
    std::uint64_t sent_count() const { return next_seq_; }
    std::uint64_t dropped_count() const { return dropped_; }
    const LinkConfig& config() const { return cfg_; }
    // Scripted outages; throws InvalidInput outside [0, 1].
    void set_drop_probability(double p);

private:
    LinkConfig cfg_;
    std::mt19937_64 rng_;
    std::vector<Envelope> queue_;  // kept sorted by (deliver_at, seq)
    std::uint64_t next_seq_ = 0;
    std::uint64_t dropped_ = 0;
    Tick last_deliver_ = 0;
};

}  // namespace platoon::comms
