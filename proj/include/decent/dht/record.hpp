#pragma once

#include <cstdint>
#include <vector>

#include "decent/common/bytes.hpp"
#include "decent/common/ids.hpp"
#include "decent/crypto/signature.hpp"

namespace decent::dht {

using crypto::Signature;
using crypto::VerifyKey;

/// What a storage node holds for one object. Everything except `version` and `wapk` is opaque.
struct StoredRecord {
    ObjectId id;
    std::uint64_t version = 0;
    /// Write-authentication key bound at first write; immutable for the record's lifetime.
    VerifyKey wapk;
    Bytes blob;
    /// Appended entries in arrival order.
    std::vector<Bytes> appends;
    /// Signature under the WASK over write_auth_message(id, version, digest(blob)).
    Signature auth;

    friend bool operator==(const StoredRecord&, const StoredRecord&) = default;
};

using Digest = std::array<std::uint8_t, 32>;

Digest blob_digest(ByteView blob);
Bytes write_auth_message(const ObjectId& id, std::uint64_t version, const Digest& blob_digest);
Bytes delete_auth_message(const ObjectId& id, std::uint64_t version);

/// True when `record.auth` verifies under `wapk` for the record's id, version and blob.
bool write_auth_valid(const StoredRecord& record, const VerifyKey& wapk);

void encode(Writer& out, const StoredRecord& record);
StoredRecord decode_record(Reader& in);

/// Appends entries of `from` missing in `into` (by content digest), keeping arrival order.
void merge_appends(std::vector<Bytes>& into, const std::vector<Bytes>& from);

}  // namespace decent::dht
