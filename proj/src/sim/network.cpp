#include "decent/sim/network.hpp"

#include <cmath>

#include "decent/common/error.hpp"

namespace decent::sim {

namespace {

enum EventKind : std::uint32_t { deliver = 1, reply = 2, timeout = 3 };

}  // namespace

Point random_point(Rng& rng) { return {rng.unit(), rng.unit()}; }

Micros LatencyModel::one_way(const Point& a, const Point& b) const {
    const double d = std::hypot(a.x - b.x, a.y - b.y);
    return static_cast<Micros>(std::llround((base_ms + per_unit_ms * d) * 1000.0));
}

const char* to_string(Behavior b) noexcept {
    switch (b) {
        case Behavior::honest: return "honest";
        case Behavior::drop: return "drop";
        case Behavior::stale_replay: return "stale-replay";
        case Behavior::refuse_append: return "refuse-append";
        case Behavior::garbage: return "garbage";
    }
    return "?";
}

Behavior behavior_from_string(std::string_view s) {
    for (auto b : {Behavior::honest, Behavior::drop, Behavior::stale_replay, Behavior::refuse_append, Behavior::garbage})
        if (s == to_string(b)) return b;
    throw Error(Errc::invalid_argument, "unknown adversary behavior '" + std::string(s) + "'");
}

AdversarialNode::AdversarialNode(dht::Contact self, dht::DhtParams params, Behavior behavior, std::uint64_t seed)
    : DhtNode(self, params), behavior_(behavior), rng_(seed) {}

std::optional<dht::Message> AdversarialNode::handle(const dht::Message& request) {
    using dht::MessageType;
    if (request.type == MessageType::ping || request.type == MessageType::find_node) return DhtNode::handle(request);
    auto ack = [&] {
        auto r = reply_to(request, MessageType::store_result);
        r.status = dht::StoreStatus::ok;
        return r;
    };
    switch (behavior_) {
        case Behavior::honest: return DhtNode::handle(request);
        case Behavior::drop:
            if (request.type == MessageType::get) return reply_to(request, MessageType::get_result);
            return ack();
        case Behavior::stale_replay:
            if (request.type == MessageType::put_update && store().get(request.key)) return ack();
            return DhtNode::handle(request);
        case Behavior::refuse_append:
            if (request.type == MessageType::append) return ack();
            return DhtNode::handle(request);
        case Behavior::garbage: {
            auto r = DhtNode::handle(request);
            if (r && r->record) {
                r->record->version += 1000;
                Bytes junk(r->record->blob.size());
                rng_.fill(junk);
                r->record->blob = std::move(junk);
                r->record->auth = rng_.random<dht::Signature>();
            }
            return r;
        }
    }
    return std::nullopt;
}

Network::Network(EventLoop& loop, LatencyModel latency, Micros timeout)
    : loop_(loop), latency_(latency), timeout_(timeout) {}

void Network::attach(std::unique_ptr<dht::DhtNode> node, Point where) {
    const auto address = node->contact().address;
    node->set_liveness([this](const dht::Contact& c) { return online(c.address); });
    nodes_[address] = Entry{std::move(node), where};
}

void Network::detach(dht::Address address) { nodes_.erase(address); }

dht::DhtNode* Network::node(dht::Address address) {
    auto it = nodes_.find(address);
    return it == nodes_.end() ? nullptr : it->second.node.get();
}

Point Network::position(dht::Address address) const {
    auto it = nodes_.find(address);
    if (it == nodes_.end()) throw Error(Errc::not_found, "no node at address " + std::to_string(address));
    return it->second.where;
}

std::vector<dht::DhtNode*> Network::nodes() {
    std::vector<dht::DhtNode*> out;
    out.reserve(nodes_.size());
    for (auto& [_, e] : nodes_) out.push_back(e.node.get());
    return out;
}

std::vector<bool> Network::rpc(const Point& from, std::vector<Call> calls) {
    const std::size_t n = calls.size();
    std::vector<bool> replied(n, false), resolved(n, false);
    std::size_t pending = n;
    const Micros start = loop_.now();
    for (std::size_t i = 0; i < n; ++i) {
        ++messages_;
        const Micros there = latency_.one_way(from, calls[i].to);
        loop_.at(start + there, deliver, calls[i].tag, i, [&, i, there] {
            if (!calls[i].serve()) return;
            loop_.at(loop_.now() + there, reply, calls[i].tag, i, [&, i] {
                if (resolved[i]) return;
                resolved[i] = replied[i] = true;
                --pending;
            });
        });
        loop_.at(start + timeout_, timeout, calls[i].tag, i, [&, i] {
            if (resolved[i]) return;
            resolved[i] = true;
            --pending;
        });
    }
    while (pending > 0 && loop_.step()) {
    }
    loop_.clear();
    return replied;
}

std::vector<std::optional<dht::Message>> Network::exchange(const dht::Contact& from,
                                                           std::span<const dht::Outgoing> batch) {
    std::vector<std::optional<dht::Message>> replies(batch.size());
    std::vector<Call> calls;
    calls.reserve(batch.size());
    const Point origin = position(from.address);
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const auto& out = batch[i];
        auto it = nodes_.find(out.to.address);
        // Unknown addresses still cost a timeout.
        const Point where = it == nodes_.end() ? origin : it->second.where;
        const std::uint64_t tag = (static_cast<std::uint64_t>(out.to.address) << 8) | static_cast<std::uint8_t>(out.message.type);
        calls.push_back({where, tag, [this, &out, &replies, i] {
                             auto* node = this->node(out.to.address);
                             if (!node) return false;
                             replies[i] = node->handle(out.message);
                             return replies[i].has_value();
                         }});
    }
    auto ok = rpc(origin, std::move(calls));
    for (std::size_t i = 0; i < replies.size(); ++i)
        if (!ok[i]) replies[i].reset();
    return replies;
}

std::vector<dht::Contact> Network::true_closest(const Id160& target, std::size_t n) const {
    std::vector<dht::Contact> all;
    all.reserve(nodes_.size());
    for (const auto& [_, e] : nodes_) all.push_back(e.node->contact());
    if (n < all.size()) {
        std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n), all.end(),
                          [&](const dht::Contact& a, const dht::Contact& b) {
                              return xor_distance(a.id, target) < xor_distance(b.id, target);
                          });
        all.resize(n);
    } else {
        dht::sort_by_distance(all, target);
    }
    return all;
}

}  // namespace decent::sim
