#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "decent/dht/record.hpp"
#include "decent/dht/routing.hpp"
#include "decent/dht/store.hpp"

namespace decent::dht {

enum class MessageType : std::uint8_t {
    ping = 1,
    find_node = 2,
    put_new = 3,
    put_update = 4,
    append = 5,
    remove = 6,  // DELETE on the wire
    get = 7,

    pong = 0x81,
    nodes = 0x82,
    store_result = 0x83,
    get_result = 0x84,
};

const char* to_string(MessageType t) noexcept;
inline bool is_request(MessageType t) { return static_cast<std::uint8_t>(t) < 0x80; }

/// One wire message. Which fields are meaningful depends on `type`:
///   find_node: key = target               nodes: contacts
///   put_new/put_update: record             store_result: status
///   append: key, entry                     get: key
///   remove: key, signature                 get_result: record (absent if not held)
struct Message {
    MessageType type = MessageType::ping;
    std::uint64_t request_id = 0;
    Contact sender;
    Id160 key;
    std::optional<StoredRecord> record;
    Bytes entry;
    Signature signature;
    std::vector<Contact> contacts;
    StoreStatus status = StoreStatus::ok;
};

Bytes encode(const Message& m);
Message decode_message(ByteView data);

}  // namespace decent::dht
