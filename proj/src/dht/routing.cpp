#include "decent/dht/routing.hpp"

#include <algorithm>

namespace decent::dht {

void RoutingTable::observe(const Contact& c, const LivenessCheck& alive) {
    int idx = bucket_index(xor_distance(self_, c.id));
    if (idx < 0) return;  // ourselves
    auto& bucket = buckets_[static_cast<std::size_t>(idx)];
    auto it = std::find_if(bucket.begin(), bucket.end(), [&](const Contact& e) { return e.id == c.id; });
    if (it != bucket.end()) {
        bucket.erase(it);
        bucket.push_back(c);
        return;
    }
    if (bucket.size() < k_) {
        bucket.push_back(c);
        return;
    }
    auto oldest = bucket.front();
    bucket.pop_front();
    if (alive && alive(oldest)) bucket.push_back(oldest);
    else bucket.push_back(c);
}

void RoutingTable::remove(const NodeId& id) {
    int idx = bucket_index(xor_distance(self_, id));
    if (idx < 0) return;
    auto& bucket = buckets_[static_cast<std::size_t>(idx)];
    std::erase_if(bucket, [&](const Contact& e) { return e.id == id; });
}

bool RoutingTable::contains(const NodeId& id) const {
    int idx = bucket_index(xor_distance(self_, id));
    if (idx < 0) return false;
    const auto& bucket = buckets_[static_cast<std::size_t>(idx)];
    return std::any_of(bucket.begin(), bucket.end(), [&](const Contact& e) { return e.id == id; });
}

std::vector<Contact> RoutingTable::closest(const NodeId& target, std::size_t n) const {
    std::vector<Contact> all;
    all.reserve(size());
    for (const auto& b : buckets_) all.insert(all.end(), b.begin(), b.end());
    auto cmp = [&](const Contact& a, const Contact& b) {
        return xor_distance(a.id, target) < xor_distance(b.id, target);
    };
    if (all.size() > n) {
        std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n), all.end(), cmp);
        all.resize(n);
    } else {
        std::sort(all.begin(), all.end(), cmp);
    }
    return all;
}

std::size_t RoutingTable::size() const {
    std::size_t n = 0;
    for (const auto& b : buckets_) n += b.size();
    return n;
}

void sort_by_distance(std::vector<Contact>& contacts, const NodeId& target) {
    std::sort(contacts.begin(), contacts.end(), [&](const Contact& a, const Contact& b) {
        return xor_distance(a.id, target) < xor_distance(b.id, target);
    });
}

}  // namespace decent::dht
