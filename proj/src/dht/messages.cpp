#include "decent/dht/messages.hpp"

#include "decent/common/error.hpp"

namespace decent::dht {

const char* to_string(MessageType t) noexcept {
    switch (t) {
        case MessageType::ping: return "PING";
        case MessageType::find_node: return "FIND_NODE";
        case MessageType::put_new: return "PUT_NEW";
        case MessageType::put_update: return "PUT_UPDATE";
        case MessageType::append: return "APPEND";
        case MessageType::remove: return "DELETE";
        case MessageType::get: return "GET";
        case MessageType::pong: return "PONG";
        case MessageType::nodes: return "NODES";
        case MessageType::store_result: return "STORE_RESULT";
        case MessageType::get_result: return "GET_RESULT";
    }
    return "?";
}

namespace {

void write_contact(Writer& w, const Contact& c) { w.fixed(c.id).u32(c.address); }
Contact read_contact(Reader& r) {
    Contact c;
    c.id = r.fixed<NodeId>();
    c.address = r.u32();
    return c;
}

}  // namespace

Bytes encode(const Message& m) {
    Writer w;
    w.u8(static_cast<std::uint8_t>(m.type)).u64(m.request_id);
    write_contact(w, m.sender);
    switch (m.type) {
        case MessageType::ping:
        case MessageType::pong: break;
        case MessageType::find_node:
        case MessageType::get: w.fixed(m.key); break;
        case MessageType::put_new:
        case MessageType::put_update:
            if (!m.record) throw Error(Errc::invalid_argument, "store message without record");
            encode(w, *m.record);
            break;
        case MessageType::append: w.fixed(m.key).blob(m.entry); break;
        case MessageType::remove: w.fixed(m.key).fixed(m.signature); break;
        case MessageType::nodes:
            w.varint(m.contacts.size());
            for (const auto& c : m.contacts) write_contact(w, c);
            break;
        case MessageType::store_result: w.u8(static_cast<std::uint8_t>(m.status)); break;
        case MessageType::get_result:
            w.fixed(m.key).u8(m.record ? 1 : 0);
            if (m.record) encode(w, *m.record);
            break;
    }
    return std::move(w).take();
}

Message decode_message(ByteView data) {
    Reader r(data);
    Message m;
    m.type = static_cast<MessageType>(r.u8());
    m.request_id = r.u64();
    m.sender = read_contact(r);
    switch (m.type) {
        case MessageType::ping:
        case MessageType::pong: break;
        case MessageType::find_node:
        case MessageType::get: m.key = r.fixed<Id160>(); break;
        case MessageType::put_new:
        case MessageType::put_update:
            m.record = decode_record(r);
            m.key = m.record->id;
            break;
        case MessageType::append:
            m.key = r.fixed<Id160>();
            m.entry = r.blob();
            break;
        case MessageType::remove:
            m.key = r.fixed<Id160>();
            m.signature = r.fixed<Signature>();
            break;
        case MessageType::nodes: {
            auto n = r.varint();
            if (n > 1024) throw Error(Errc::malformed, "too many contacts");
            for (std::uint64_t i = 0; i < n; ++i) m.contacts.push_back(read_contact(r));
            break;
        }
        case MessageType::store_result: {
            auto s = r.u8();
            if (s > static_cast<std::uint8_t>(StoreStatus::current)) throw Error(Errc::malformed, "bad store status");
            m.status = static_cast<StoreStatus>(s);
            break;
        }
        case MessageType::get_result:
            m.key = r.fixed<Id160>();
            if (r.u8()) m.record = decode_record(r);
            break;
        default: throw Error(Errc::malformed, "unknown message type");
    }
    r.expect_done();
    return m;
}

}  // namespace decent::dht
