#include "decent/dht/client.hpp"

#include <algorithm>
#include <map>
#include <tuple>

#include "decent/common/error.hpp"

namespace decent::dht {

namespace {

PutOutcome single(StoreStatus s) {
    PutOutcome out;
    if (s == StoreStatus::ok || s == StoreStatus::current) {
        out.accepted = 1;
    } else {
        out.refused = 1;
        out.refusal = s;
    }
    return out;
}

}  // namespace

PutOutcome LocalDht::put_new(const StoredRecord& record) { return single(store_.put_new(record)); }
PutOutcome LocalDht::put_update(const StoredRecord& record) { return single(store_.put_update(record)); }
PutOutcome LocalDht::append(const ObjectId& id, const Bytes& entry) { return single(store_.append(id, entry)); }
PutOutcome LocalDht::remove(const ObjectId& id, const Signature& sig) { return single(store_.remove(id, sig)); }

FetchResult LocalDht::get_fresh(const ObjectId& id) {
    std::vector<StoredRecord> found;
    if (const auto* r = store_.get(id)) found.push_back(*r);
    auto out = collate(std::move(found), 1);
    out.responses = 1;
    return out;
}

FetchResult collate(std::vector<StoredRecord> responses, std::size_t queried) {
    FetchResult out;
    out.queried = queried;
    out.responses = responses.size();
    std::vector<Bytes> appends;
    std::map<std::tuple<std::uint64_t, Digest, VerifyKey>, std::size_t> seen;
    for (auto& r : responses) {
        merge_appends(appends, r.appends);
        auto key = std::make_tuple(r.version, blob_digest(r.blob), r.wapk);
        if (seen.contains(key)) continue;
        seen.emplace(key, out.candidates.size());
        out.candidates.push_back(std::move(r));
    }
    for (auto& c : out.candidates) c.appends = appends;
    std::stable_sort(out.candidates.begin(), out.candidates.end(),
                     [](const StoredRecord& a, const StoredRecord& b) { return a.version > b.version; });
    return out;
}

}  // namespace decent::dht
