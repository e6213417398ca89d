#include "decent/dht/record.hpp"

#include <set>

#include "decent/common/error.hpp"
#include "decent/crypto/kdf.hpp"

namespace decent::dht {

namespace {
constexpr std::size_t max_appends = 1u << 20;
}

Digest blob_digest(ByteView blob) { return crypto::digest(blob); }

Bytes write_auth_message(const ObjectId& id, std::uint64_t version, const Digest& digest) {
    Writer w;
    w.str("decent-write-v1").fixed(id).u64(version).raw(digest);
    return std::move(w).take();
}

Bytes delete_auth_message(const ObjectId& id, std::uint64_t version) {
    Writer w;
    w.str("decent-delete-v1").fixed(id).u64(version);
    return std::move(w).take();
}

bool write_auth_valid(const StoredRecord& record, const VerifyKey& wapk) {
    return crypto::verify(wapk, write_auth_message(record.id, record.version, blob_digest(record.blob)), record.auth);
}

void encode(Writer& out, const StoredRecord& record) {
    out.fixed(record.id).u64(record.version).fixed(record.wapk).blob(record.blob).fixed(record.auth);
    out.varint(record.appends.size());
    for (const auto& a : record.appends) out.blob(a);
}

StoredRecord decode_record(Reader& in) {
    StoredRecord r;
    r.id = in.fixed<ObjectId>();
    r.version = in.u64();
    r.wapk = in.fixed<VerifyKey>();
    r.blob = in.blob();
    r.auth = in.fixed<Signature>();
    auto n = in.varint();
    if (n > max_appends) throw Error(Errc::malformed, "too many append entries");
    r.appends.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) r.appends.push_back(in.blob());
    return r;
}

void merge_appends(std::vector<Bytes>& into, const std::vector<Bytes>& from) {
    std::set<Digest> seen;
    for (const auto& a : into) seen.insert(crypto::digest(a));
    for (const auto& a : from)
        if (seen.insert(crypto::digest(a)).second) into.push_back(a);
}

}  // namespace decent::dht
