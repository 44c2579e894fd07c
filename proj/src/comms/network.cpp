#include "platoon/comms/network.hpp"

#include <algorithm>

namespace platoon::comms {

void LinkConfig::validate() const
{
    if (latency < 0) throw InvalidInput("link: latency must be >= 0");
    if (jitter < 0) throw InvalidInput("link: jitter must be >= 0");
    if (!(drop_probability >= 0.0 && drop_probability <= 1.0))
        throw InvalidInput("link: drop_probability must be in [0, 1]");
}

VirtualLink::VirtualLink(LinkConfig cfg, std::uint64_t seed) : cfg_(cfg), rng_(seed)
{
    cfg_.validate();
}

bool VirtualLink::send(std::string endpoint, std::string body, Tick now, int status)
{
    const std::uint64_t seq = next_seq_++;
    // Both draws happen for every message so the stream does not depend on
    // which branch was taken.
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng_);
    const int extra = std::uniform_int_distribution<int>(0, cfg_.jitter)(rng_);
    if (cfg_.drop_probability >= 1.0 || u < cfg_.drop_probability) {
        ++dropped_;
        return false;
    }
    Tick deliver = now + cfg_.latency + extra;
    if (cfg_.fifo) deliver = std::max(deliver, last_deliver_);
    last_deliver_ = std::max(last_deliver_, deliver);

    Envelope e{seq, std::move(endpoint), std::move(body), now, deliver, status};
    auto pos = std::upper_bound(queue_.begin(), queue_.end(), e, [](const Envelope& a, const Envelope& b) {
        return a.deliver_at != b.deliver_at ? a.deliver_at < b.deliver_at : a.seq < b.seq;
    });
    queue_.insert(pos, std::move(e));
    return true;
}

void VirtualLink::set_drop_probability(double p)
{
    LinkConfig next = cfg_;
    next.drop_probability = p;
    next.validate();
    cfg_ = next;
}

std::vector<Envelope> VirtualLink::receive(Tick now)
{
    auto end = std::find_if(queue_.begin(), queue_.end(),
                            [now](const Envelope& e) { return e.deliver_at > now; });
    std::vector<Envelope> out(std::make_move_iterator(queue_.begin()), std::make_move_iterator(end));
    queue_.erase(queue_.begin(), end);
    return out;
}

}  // namespace platoon::comms
