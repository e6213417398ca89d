#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "decent/dht/record.hpp"

namespace decent::dht {

enum class StoreStatus : std::uint8_t {
    ok = 0,
    exists,         // put_new on a claimed id
    not_found,
    bad_signature,  // not signed by the stored WAPK's secret
    stale_version,  // version not above the stored one
    too_large,
    current,        // replica already holds this exact version
};

const char* to_string(StoreStatus s) noexcept;

struct StoreLimits {
    std::size_t max_append_bytes = 64 * 1024;
};

/// Storage rules of an honest node: first write binds the WAPK, overwrites and deletes must be
/// signed under it with a strictly higher version, appends are unauthenticated.
class RecordStore {
public:
    explicit RecordStore(StoreLimits limits = {}) : limits_(limits) {}

    /// Claims `record.id`; `record.auth` must verify under `record.wapk`.
    StoreStatus put_new(const StoredRecord& record);
    /// Unknown ids take the put_new path. Incoming append entries are merged either way.
    StoreStatus put_update(const StoredRecord& record);
    StoreStatus append(const ObjectId& id, Bytes entry);
    StoreStatus remove(const ObjectId& id, const Signature& sig);

    const StoredRecord* get(const ObjectId& id) const;
    const std::map<ObjectId, StoredRecord>& records() const { return records_; }
    /// Local eviction after hand-off; not a network operation.
    void drop(const ObjectId& id) { records_.erase(id); }

    /// Ids written since the last call; replica maintenance skips those (another holder already
    /// pushed them this round).
    bool take_touched(const ObjectId& id);

private:
    StoreLimits limits_;
    std::map<ObjectId, StoredRecord> records_;
    std::map<ObjectId, bool> touched_;
};

void encode(Writer& out, const RecordStore& store);
RecordStore decode_store(Reader& in, StoreLimits limits = {});

}  // namespace decent::dht
