#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "decent/common/random.hpp"
#include "decent/dht/node.hpp"
#include "decent/sim/event_loop.hpp"

namespace decent::sim {

/// Position in the unit square.
struct Point {
    double x = 0;
    double y = 0;
};

Point random_point(Rng& rng);

/// One-way delay = base + per_unit * Euclidean distance.
struct LatencyModel {
    double base_ms = 5;
    double per_unit_ms = 100;

    Micros one_way(const Point& a, const Point& b) const;
};

/// A request to one endpoint. `serve` runs at the callee when the request arrives and returns
/// whether a reply goes back.
struct Call {
    Point to;
    std::uint64_t tag = 0;
    std::function<bool()> serve;
};

/// Storage-layer misbehaviour of a node. Routing answers stay honest.
enum class Behavior : std::uint8_t { honest = 0, drop, stale_replay, refuse_append, garbage };

const char* to_string(Behavior b) noexcept;
Behavior behavior_from_string(std::string_view s);

/// Node whose storage lies according to `behavior`. Malicious nodes never republish.
class AdversarialNode final : public dht::DhtNode {
public:
    AdversarialNode(dht::Contact self, dht::DhtParams params, Behavior behavior, std::uint64_t seed);

    std::optional<dht::Message> handle(const dht::Message& request) override;
    bool honest() const override { return false; }
    bool maintains() const override { return false; }
    Behavior behavior() const { return behavior_; }

private:
    Behavior behavior_;
    DeterministicRng rng_;
};

/// In-memory overlay transport with coordinate latency and timeouts.
class Network final : public dht::Transport {
public:
    Network(EventLoop& loop, LatencyModel latency, Micros timeout);

    EventLoop& loop() { return loop_; }
    const LatencyModel& latency() const { return latency_; }

    void attach(std::unique_ptr<dht::DhtNode> node, Point where);
    /// Takes the node offline for good; its state is discarded.
    void detach(dht::Address address);
    bool online(dht::Address address) const { return nodes_.contains(address); }
    dht::DhtNode* node(dht::Address address);
    Point position(dht::Address address) const;
    std::vector<dht::DhtNode*> nodes();
    std::size_t size() const { return nodes_.size(); }

    /// Parallel requests from `from`; returns per call whether a reply arrived before the timeout.
    /// Moves the loop's clock to the moment the last reply or timeout resolved.
    std::vector<bool> rpc(const Point& from, std::vector<Call> calls);

    std::vector<std::optional<dht::Message>> exchange(const dht::Contact& from,
                                                      std::span<const dht::Outgoing> batch) override;

    std::uint64_t messages() const { return messages_; }

    /// The true `n` closest online nodes to `target`.
    std::vector<dht::Contact> true_closest(const Id160& target, std::size_t n) const;

private:
    struct Entry {
        std::unique_ptr<dht::DhtNode> node;
        Point where;
    };

    EventLoop& loop_;
    LatencyModel latency_;
    Micros timeout_;
    std::map<dht::Address, Entry> nodes_;
    std::uint64_t messages_ = 0;
};

}  // namespace decent::sim
