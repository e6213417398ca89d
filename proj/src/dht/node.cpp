#include "decent/dht/node.hpp"

#include <algorithm>
#include <set>

#include "decent/common/error.hpp"
#include "decent/common/random.hpp"

namespace decent::dht {

DhtNode::DhtNode(Contact self, DhtParams params, StoreLimits limits)
    : self_(self), params_(params), table_(self.id, params.k), store_(limits) {}

Message DhtNode::reply_to(const Message& request, MessageType type) const {
    Message m;
    m.type = type;
    m.request_id = request.request_id;
    m.sender = self_;
    m.key = request.key;
    return m;
}

std::optional<Message> DhtNode::handle(const Message& request) {
    if (request.sender.id != self_.id) table_.observe(request.sender, alive_);
    switch (request.type) {
        case MessageType::ping: return reply_to(request, MessageType::pong);
        case MessageType::find_node: {
            auto reply = reply_to(request, MessageType::nodes);
            reply.contacts = table_.closest(request.key, params_.k);
            return reply;
        }
        default: return handle_storage(request);
    }
}

std::optional<Message> DhtNode::handle_storage(const Message& request) {
    auto result = [&](StoreStatus s) {
        auto reply = reply_to(request, MessageType::store_result);
        reply.status = s;
        return reply;
    };
    switch (request.type) {
        case MessageType::put_new:
            if (!request.record) return result(StoreStatus::not_found);
            return result(store_.put_new(*request.record));
        case MessageType::put_update:
            if (!request.record) return result(StoreStatus::not_found);
            return result(store_.put_update(*request.record));
        case MessageType::append: return result(store_.append(request.key, request.entry));
        case MessageType::remove: return result(store_.remove(request.key, request.signature));
        case MessageType::get: {
            auto reply = reply_to(request, MessageType::get_result);
            if (const auto* r = store_.get(request.key)) reply.record = *r;
            return reply;
        }
        default: return std::nullopt;
    }
}

LookupResult iterative_lookup(DhtNode& origin, Transport& transport, const Id160& target) {
    enum class State { fresh, answered, failed };
    struct Candidate {
        Contact contact;
        Id160 distance;
        State state;
    };
    const auto k = origin.params().k;
    const auto alpha = origin.params().alpha;

    std::vector<Candidate> shortlist;
    std::set<NodeId> seen;
    auto add = [&](const Contact& c, State s) {
        if (seen.insert(c.id).second) shortlist.push_back({c, xor_distance(c.id, target), s});
    };
    add(origin.contact(), State::answered);
    for (const auto& c : origin.table().closest(target, k)) add(c, State::fresh);

    LookupResult out;
    static std::uint64_t next_request = 1;
    for (;;) {
        std::sort(shortlist.begin(), shortlist.end(),
                  [](const Candidate& a, const Candidate& b) { return a.distance < b.distance; });
        std::vector<std::size_t> picked;
        std::size_t live = 0;
        for (std::size_t i = 0; i < shortlist.size() && live < k && picked.size() < alpha; ++i) {
            if (shortlist[i].state == State::failed) continue;
            ++live;
            if (shortlist[i].state == State::fresh) picked.push_back(i);
        }
        if (picked.empty()) break;

        std::vector<Outgoing> batch;
        for (auto i : picked) {
            Message m;
            m.type = MessageType::find_node;
            m.request_id = next_request++;
            m.sender = origin.contact();
            m.key = target;
            batch.push_back({shortlist[i].contact, std::move(m)});
        }
        ++out.rounds;
        out.queries += batch.size();
        auto replies = transport.exchange(origin.contact(), batch);
        for (std::size_t j = 0; j < picked.size(); ++j) {
            auto& cand = shortlist[picked[j]];
            if (!replies[j] || replies[j]->type != MessageType::nodes) {
                cand.state = State::failed;
                origin.table().remove(cand.contact.id);
                continue;
            }
            cand.state = State::answered;
            origin.table().observe(cand.contact);
            for (const auto& c : replies[j]->contacts) add(c, State::fresh);
        }
    }
    for (const auto& c : shortlist) {
        if (out.closest.size() == k) break;
        if (c.state == State::answered) out.closest.push_back(c.contact);
    }
    out.complete = out.closest.size() >= k;
    return out;
}

void join(DhtNode& node, Transport& transport, const Contact& bootstrap) {
    const auto& self = node.contact().id;
    node.table().observe(bootstrap);
    auto lookup = iterative_lookup(node, transport, self);
    // Refresh every bucket farther than the nearest neighbour with a lookup of a random id in it.
    int nearest = RoutingTable::bucket_count;
    for (const auto& c : lookup.closest)
        if (c.id != self) nearest = std::min(nearest, bucket_index(xor_distance(self, c.id)));
    DeterministicRng rng(self.view());
    for (int b = nearest + 1; b < static_cast<int>(RoutingTable::bucket_count); ++b) {
        auto d = rng.random<NodeId>();
        const auto byte = static_cast<std::size_t>(19 - b / 8);
        const auto bit = static_cast<std::uint8_t>(1u << (b % 8));
        for (std::size_t i = 0; i < byte; ++i) d.bytes[i] = 0;
        d.bytes[byte] = static_cast<std::uint8_t>((d.bytes[byte] & (bit - 1)) | bit);
        iterative_lookup(node, transport, xor_distance(self, d));
    }
}

MaintenanceStats replica_maintenance(DhtNode& node, Transport& transport) {
    MaintenanceStats stats;
    if (!node.maintains()) return stats;
    std::vector<ObjectId> ids;
    for (const auto& [id, _] : node.store().records()) ids.push_back(id);
    static std::uint64_t next_request = 1ull << 62;
    const auto R = node.params().replicas;
    for (const auto& id : ids) {
        if (node.store().take_touched(id)) continue;
        const auto* rec = node.store().get(id);
        if (!rec) continue;
        auto lookup = iterative_lookup(node, transport, id);
        ++stats.lookups;
        bool responsible = false;
        std::vector<Outgoing> batch;
        for (std::size_t i = 0; i < lookup.closest.size() && i < R; ++i) {
            const auto& c = lookup.closest[i];
            if (c.id == node.contact().id) {
                responsible = true;
                continue;
            }
            Message m;
            m.type = MessageType::put_update;
            m.request_id = next_request++;
            m.sender = node.contact();
            m.key = id;
            m.record = *rec;
            batch.push_back({c, std::move(m)});
        }
        stats.pushes += batch.size();
        auto replies = transport.exchange(node.contact(), batch);
        std::size_t confirmed = 0;
        for (const auto& r : replies)
            if (r && (r->status == StoreStatus::ok || r->status == StoreStatus::current)) ++confirmed;
        if (!responsible && confirmed > 0) {
            node.store().drop(id);
            ++stats.dropped;
        }
    }
    return stats;
}

// ---------------------------------------------------------------------------------------------

std::vector<Contact> OverlayClient::replica_set(const ObjectId& id) {
    last_lookup_ = iterative_lookup(home_, transport_, id);
    auto out = last_lookup_.closest;
    if (out.size() > home_.params().replicas) out.resize(home_.params().replicas);
    return out;
}

std::vector<std::optional<Message>> OverlayClient::send(const std::vector<Contact>& targets, const Message& proto) {
    static std::uint64_t next_request = 1ull << 61;
    std::vector<std::optional<Message>> replies(targets.size());
    std::vector<Outgoing> batch;
    std::vector<std::size_t> slots;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        Message m = proto;
        m.request_id = next_request++;
        m.sender = home_.contact();
        if (targets[i].id == home_.contact().id) {
            replies[i] = home_.handle(m);
            continue;
        }
        batch.push_back({targets[i], std::move(m)});
        slots.push_back(i);
    }
    auto remote = transport_.exchange(home_.contact(), batch);
    for (std::size_t j = 0; j < slots.size(); ++j) replies[slots[j]] = std::move(remote[j]);
    return replies;
}

PutOutcome OverlayClient::store_to_replicas(const ObjectId& id, const Message& proto) {
    auto replies = send(replica_set(id), proto);
    PutOutcome out;
    for (const auto& r : replies) {
        if (!r || r->type != MessageType::store_result) {
            ++out.unreachable;
        } else if (r->status == StoreStatus::ok || r->status == StoreStatus::current) {
            ++out.accepted;
        } else {
            if (out.refused++ == 0) out.refusal = r->status;
        }
    }
    return out;
}

PutOutcome OverlayClient::put_new(const StoredRecord& record) {
    Message m;
    m.type = MessageType::put_new;
    m.key = record.id;
    m.record = record;
    return store_to_replicas(record.id, m);
}

PutOutcome OverlayClient::put_update(const StoredRecord& record) {
    Message m;
    m.type = MessageType::put_update;
    m.key = record.id;
    m.record = record;
    return store_to_replicas(record.id, m);
}

PutOutcome OverlayClient::append(const ObjectId& id, const Bytes& entry) {
    Message m;
    m.type = MessageType::append;
    m.key = id;
    m.entry = entry;
    return store_to_replicas(id, m);
}

PutOutcome OverlayClient::remove(const ObjectId& id, const Signature& sig) {
    Message m;
    m.type = MessageType::remove;
    m.key = id;
    m.signature = sig;
    return store_to_replicas(id, m);
}

FetchResult OverlayClient::get_fresh(const ObjectId& id) {
    auto targets = replica_set(id);
    Message m;
    m.type = MessageType::get;
    m.key = id;
    auto replies = send(targets, m);
    std::vector<StoredRecord> found;
    std::size_t responses = 0;
    for (auto& r : replies) {
        if (!r || r->type != MessageType::get_result) continue;
        ++responses;
        if (r->record && r->record->id == id) found.push_back(std::move(*r->record));
    }
    auto out = collate(std::move(found), targets.size());
    out.responses = responses;
    return out;
}

}  // namespace decent::dht
