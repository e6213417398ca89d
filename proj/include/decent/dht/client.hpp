#pragma once

#include <cstddef>
#include <vector>

#include "decent/dht/record.hpp"
#include "decent/dht/store.hpp"

namespace decent::dht {

struct PutOutcome {
    std::size_t accepted = 0;
    std::size_t refused = 0;
    std::size_t unreachable = 0;
    /// First refusal reason seen, meaningful when refused > 0.
    StoreStatus refusal = StoreStatus::ok;

    bool ok() const { return accepted > 0; }
};

/// Every distinct record version the replicas returned, highest version first. Only the reader
/// can tell which are authentic, so nothing is filtered here. Append lists are the union over all
/// responding replicas.
struct FetchResult {
    std::vector<StoredRecord> candidates;
    std::size_t queried = 0;
    std::size_t responses = 0;
};

/// Storage operations as seen by a user agent.
class DhtClient {
public:
    virtual ~DhtClient() = default;

    virtual PutOutcome put_new(const StoredRecord& record) = 0;
    virtual PutOutcome put_update(const StoredRecord& record) = 0;
    virtual PutOutcome append(const ObjectId& id, const Bytes& entry) = 0;
    virtual PutOutcome remove(const ObjectId& id, const Signature& sig) = 0;
    virtual FetchResult get_fresh(const ObjectId& id) = 0;
};

/// Single in-process storage node; backs the CLI and unit tests.
class LocalDht final : public DhtClient {
public:
    explicit LocalDht(StoreLimits limits = {}) : store_(limits) {}
    explicit LocalDht(RecordStore store) : store_(std::move(store)) {}

    PutOutcome put_new(const StoredRecord& record) override;
    PutOutcome put_update(const StoredRecord& record) override;
    PutOutcome append(const ObjectId& id, const Bytes& entry) override;
    PutOutcome remove(const ObjectId& id, const Signature& sig) override;
    FetchResult get_fresh(const ObjectId& id) override;

    RecordStore& store() { return store_; }
    const RecordStore& store() const { return store_; }

private:
    RecordStore store_;
};

/// Collapses replica responses into FetchResult form.
FetchResult collate(std::vector<StoredRecord> responses, std::size_t queried);

}  // namespace decent::dht
