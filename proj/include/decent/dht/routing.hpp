#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <functional>
#include <vector>

#include "decent/common/ids.hpp"

namespace decent::dht {

/// Network address in the simulated overlay.
using Address = std::uint32_t;

struct Contact {
    NodeId id;
    Address address = 0;

    friend bool operator==(const Contact&, const Contact&) = default;
};

/// Kademlia k-buckets. Bucket i holds contacts at XOR distance in [2^i, 2^(i+1)), least recently
/// seen first.
class RoutingTable {
public:
    static constexpr std::size_t bucket_count = 160;
    using LivenessCheck = std::function<bool(const Contact&)>;

    RoutingTable(NodeId self, std::size_t k) : self_(self), k_(k) {}

    const NodeId& self() const { return self_; }
    std::size_t bucket_size() const { return k_; }

    /// Records contact with `c`. When the bucket is full, the least recently seen entry is pinged
    /// through `alive`; a live entry is kept and `c` dropped, a dead one is evicted for `c`.
    void observe(const Contact& c, const LivenessCheck& alive = {});
    void remove(const NodeId& id);
    bool contains(const NodeId& id) const;

    std::vector<Contact> closest(const NodeId& target, std::size_t n) const;
    const std::deque<Contact>& bucket(std::size_t i) const { return buckets_[i]; }
    std::size_t size() const;

private:
    NodeId self_;
    std::size_t k_;
    std::array<std::deque<Contact>, bucket_count> buckets_;
};

/// Sorts contacts by XOR distance to `target`, nearest first.
void sort_by_distance(std::vector<Contact>& contacts, const NodeId& target);

}  // namespace decent::dht
