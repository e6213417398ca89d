#include "decent/dht/store.hpp"

namespace decent::dht {

const char* to_string(StoreStatus s) noexcept {
    switch (s) {
        case StoreStatus::ok: return "ok";
        case StoreStatus::exists: return "exists";
        case StoreStatus::not_found: return "not found";
        case StoreStatus::bad_signature: return "bad signature";
        case StoreStatus::stale_version: return "stale version";
        case StoreStatus::too_large: return "too large";
        case StoreStatus::current: return "current";
    }
    return "?";
}

StoreStatus RecordStore::put_new(const StoredRecord& record) {
    if (records_.contains(record.id)) return StoreStatus::exists;
    if (!write_auth_valid(record, record.wapk)) return StoreStatus::bad_signature;
    for (const auto& a : record.appends)
        if (a.size() > limits_.max_append_bytes) return StoreStatus::too_large;
    records_.emplace(record.id, record);
    touched_[record.id] = true;
    return StoreStatus::ok;
}

StoreStatus RecordStore::put_update(const StoredRecord& record) {
    auto it = records_.find(record.id);
    if (it == records_.end()) return put_new(record);
    auto& stored = it->second;
    if (record.wapk != stored.wapk) return StoreStatus::bad_signature;
    // Same authenticated content: only the unauthenticated append list can differ.
    if (record.version == stored.version && record.blob == stored.blob) {
        merge_appends(stored.appends, record.appends);
        touched_[record.id] = true;
        return StoreStatus::current;
    }
    if (!write_auth_valid(record, stored.wapk)) return StoreStatus::bad_signature;
    if (record.version <= stored.version) return StoreStatus::stale_version;
    auto appends = std::move(stored.appends);
    merge_appends(appends, record.appends);
    stored = record;
    stored.appends = std::move(appends);
    touched_[record.id] = true;
    return StoreStatus::ok;
}

StoreStatus RecordStore::append(const ObjectId& id, Bytes entry) {
    auto it = records_.find(id);
    if (it == records_.end()) return StoreStatus::not_found;
    if (entry.size() > limits_.max_append_bytes) return StoreStatus::too_large;
    it->second.appends.push_back(std::move(entry));
    return StoreStatus::ok;
}

StoreStatus RecordStore::remove(const ObjectId& id, const Signature& sig) {
    auto it = records_.find(id);
    if (it == records_.end()) return StoreStatus::not_found;
    if (!crypto::verify(it->second.wapk, delete_auth_message(id, it->second.version), sig))
        return StoreStatus::bad_signature;
    records_.erase(it);
    touched_.erase(id);
    return StoreStatus::ok;
}

const StoredRecord* RecordStore::get(const ObjectId& id) const {
    auto it = records_.find(id);
    return it == records_.end() ? nullptr : &it->second;
}

bool RecordStore::take_touched(const ObjectId& id) {
    auto it = touched_.find(id);
    if (it == touched_.end() || !it->second) return false;
    it->second = false;
    return true;
}

void encode(Writer& out, const RecordStore& store) {
    out.varint(store.records().size());
    for (const auto& [_, r] : store.records()) encode(out, r);
}

RecordStore decode_store(Reader& in, StoreLimits limits) {
    RecordStore store(limits);
    auto n = in.varint();
    for (std::uint64_t i = 0; i < n; ++i) {
        auto r = decode_record(in);
        auto appends = std::move(r.appends);
        r.appends.clear();
        store.put_new(r);
        for (auto& a : appends) store.append(r.id, std::move(a));
    }
    return store;
}

}  // namespace decent::dht
