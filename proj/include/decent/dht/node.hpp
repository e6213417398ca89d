#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "decent/dht/client.hpp"
#include "decent/dht/messages.hpp"
#include "decent/dht/routing.hpp"
#include "decent/dht/store.hpp"

namespace decent::dht {

struct DhtParams {
    std::size_t k = 20;        // bucket size and lookup width
    std::size_t alpha = 3;     // parallel queries per lookup round
    std::size_t replicas = 5;  // R
};

struct Outgoing {
    Contact to;
    Message message;
};

/// Request/response channel between nodes, supplied by the simulator.
class Transport {
public:
    virtual ~Transport() = default;
    /// Sends the whole batch in parallel and waits until each request has a reply or has timed
    /// out (nullopt).
    virtual std::vector<std::optional<Message>> exchange(const Contact& from, std::span<const Outgoing> batch) = 0;
};

/// One overlay participant: routing state plus a record store, processing one message at a time.
class DhtNode {
public:
    DhtNode(Contact self, DhtParams params, StoreLimits limits = {});
    virtual ~DhtNode() = default;

    const Contact& contact() const { return self_; }
    const DhtParams& params() const { return params_; }
    RoutingTable& table() { return table_; }
    const RoutingTable& table() const { return table_; }
    RecordStore& store() { return store_; }
    const RecordStore& store() const { return store_; }

    /// Liveness probe used for bucket eviction.
    void set_liveness(RoutingTable::LivenessCheck check) { alive_ = std::move(check); }

    /// nullopt means no reply.
    virtual std::optional<Message> handle(const Message& request);
    virtual bool honest() const { return true; }
    /// Whether this node republishes its records during maintenance.
    virtual bool maintains() const { return true; }

    Message reply_to(const Message& request, MessageType type) const;

protected:
    std::optional<Message> handle_storage(const Message& request);

private:
    Contact self_;
    DhtParams params_;
    RoutingTable table_;
    RecordStore store_;
    RoutingTable::LivenessCheck alive_;
};

struct LookupResult {
    /// Up to k responsive nodes nearest the target, nearest first; may include the origin.
    std::vector<Contact> closest;
    std::size_t rounds = 0;
    std::size_t queries = 0;
    /// False when fewer than k nodes were reachable.
    bool complete = true;
};

/// Iterative Kademlia lookup with alpha parallel FIND_NODE queries per round; stops once the k
/// nearest known nodes have all answered.
LookupResult iterative_lookup(DhtNode& origin, Transport& transport, const Id160& target);

/// Joins through `bootstrap`: seeds the table and looks up the node's own id.
void join(DhtNode& node, Transport& transport, const Contact& bootstrap);

struct MaintenanceStats {
    std::size_t lookups = 0;
    std::size_t pushes = 0;
    std::size_t dropped = 0;
};

/// Re-pushes each held record to the current R nearest nodes. Records another holder already
/// pushed here since the last pass are skipped; records this node is no longer responsible for
/// are dropped once a replica confirms.
MaintenanceStats replica_maintenance(DhtNode& node, Transport& transport);

/// DhtClient over the overlay, issuing requests from `home`.
class OverlayClient final : public DhtClient {
public:
    OverlayClient(DhtNode& home, Transport& transport) : home_(home), transport_(transport) {}

    PutOutcome put_new(const StoredRecord& record) override;
    PutOutcome put_update(const StoredRecord& record) override;
    PutOutcome append(const ObjectId& id, const Bytes& entry) override;
    PutOutcome remove(const ObjectId& id, const Signature& sig) override;
    FetchResult get_fresh(const ObjectId& id) override;

    /// Lookup statistics of the most recent operation.
    const LookupResult& last_lookup() const { return last_lookup_; }

private:
    std::vector<Contact> replica_set(const ObjectId& id);
    std::vector<std::optional<Message>> send(const std::vector<Contact>& targets, const Message& proto);
    PutOutcome store_to_replicas(const ObjectId& id, const Message& proto);

    DhtNode& home_;
    Transport& transport_;
    LookupResult last_lookup_;
};

}  // namespace decent::dht
