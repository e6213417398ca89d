#include "decent/common/bytes.hpp"

#include "decent/common/error.hpp"

namespace decent {

std::string to_hex(ByteView data) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(data.size() * 2);
    for (auto b : data) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0xf]);
    }
    return out;
}

namespace {
int nibble(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}
}  // namespace

Bytes from_hex(std::string_view hex) {
    if (hex.size() % 2 != 0) throw Error(Errc::malformed, "odd-length hex string");
    Bytes out(hex.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i) {
        int hi = nibble(hex[2 * i]), lo = nibble(hex[2 * i + 1]);
        if (hi < 0 || lo < 0) throw Error(Errc::malformed, "invalid hex digit");
        out[i] = static_cast<std::uint8_t>((hi << 4) | lo);
    }
    return out;
}

Writer& Writer::u32(std::uint32_t v) {
    for (int shift = 24; shift >= 0; shift -= 8) buf_.push_back(static_cast<std::uint8_t>(v >> shift));
    return *this;
}

Writer& Writer::u64(std::uint64_t v) {
    for (int shift = 56; shift >= 0; shift -= 8) buf_.push_back(static_cast<std::uint8_t>(v >> shift));
    return *this;
}

Writer& Writer::varint(std::uint64_t v) {
    while (v >= 0x80) {
        buf_.push_back(static_cast<std::uint8_t>(v | 0x80));
        v >>= 7;
    }
    buf_.push_back(static_cast<std::uint8_t>(v));
    return *this;
}

Writer& Writer::blob(ByteView data) {
    u32(static_cast<std::uint32_t>(data.size()));
    return raw(data);
}

ByteView Reader::raw(std::size_t n) {
    if (remaining() < n) throw Error(Errc::malformed, "truncated input");
    auto out = data_.subspan(pos_, n);
    pos_ += n;
    return out;
}

std::uint8_t Reader::u8() { return raw(1)[0]; }

std::uint32_t Reader::u32() {
    std::uint32_t v = 0;
    for (auto b : raw(4)) v = (v << 8) | b;
    return v;
}

std::uint64_t Reader::u64() {
    std::uint64_t v = 0;
    for (auto b : raw(8)) v = (v << 8) | b;
    return v;
}

std::uint64_t Reader::varint() {
    std::uint64_t v = 0;
    for (int shift = 0; shift < 64; shift += 7) {
        auto b = u8();
        v |= static_cast<std::uint64_t>(b & 0x7f) << shift;
        if (!(b & 0x80)) return v;
    }
    throw Error(Errc::malformed, "varint overflow");
}

Bytes Reader::blob() {
    auto n = u32();
    auto view = raw(n);
    return {view.begin(), view.end()};
}

std::string Reader::str() {
    auto n = u32();
    auto view = raw(n);
    return {view.begin(), view.end()};
}

void Reader::expect_done() const {
    if (!done()) throw Error(Errc::malformed, "trailing bytes after encoding");
}

}  // namespace decent
