#pragma once

#include <cstdint>
#include <string>

#include "decent/common/bytes.hpp"

namespace decent {

struct Id160Tag {};

/// 160-bit identifier shared by DHT node ids and object ids (objects are keyed by their id).
using Id160 = FixedBytes<20, Id160Tag>;
using NodeId = Id160;
using ObjectId = Id160;

/// XOR metric.
Id160 xor_distance(const Id160& a, const Id160& b);

/// Index of the highest set bit of `d`, i.e. the k-bucket holding a contact at distance d.
/// Returns -1 for d == 0.
int bucket_index(const Id160& d);

/// Social identity of an account. Plain string handle; never sent to storage nodes.
struct UserId {
    std::string name;

    friend auto operator<=>(const UserId&, const UserId&) = default;
    friend bool operator==(const UserId&, const UserId&) = default;
};

}  // namespace decent
