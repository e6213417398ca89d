#pragma once

#include <algorithm>
#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace decent {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

std::string to_hex(ByteView data);
Bytes from_hex(std::string_view hex);

inline ByteView as_bytes(std::string_view s) {
    return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

inline void append(Bytes& out, ByteView data) { out.insert(out.end(), data.begin(), data.end()); }

/// Fixed-size opaque byte string; the base for identifiers, keys and group encodings.
template <std::size_t N, typename Tag>
struct FixedBytes {
    static constexpr std::size_t size_bytes = N;
    std::array<std::uint8_t, N> bytes{};

    ByteView view() const { return {bytes.data(), N}; }
    std::string hex() const { return to_hex(view()); }
    bool is_zero() const {
        return std::all_of(bytes.begin(), bytes.end(), [](std::uint8_t b) { return b == 0; });
    }

    static FixedBytes from(ByteView data) {
        FixedBytes out;
        std::copy_n(data.begin(), std::min(N, data.size()), out.bytes.begin());
        return out;
    }

    friend auto operator<=>(const FixedBytes&, const FixedBytes&) = default;
    friend bool operator==(const FixedBytes&, const FixedBytes&) = default;
};

struct FixedBytesHash {
    template <std::size_t N, typename Tag>
    std::size_t operator()(const FixedBytes<N, Tag>& v) const noexcept {
        std::size_t h = 0;
        for (std::size_t i = 0; i < std::min<std::size_t>(N, sizeof(std::size_t)); ++i)
            h = (h << 8) | v.bytes[i];
        return h;
    }
};

/// Canonical encoder: big-endian fixed-width integers, LEB128 varints, u32 length prefixes.
class Writer {
public:
    Writer& u8(std::uint8_t v) {
        buf_.push_back(v);
        return *this;
    }
    Writer& u32(std::uint32_t v);
    Writer& u64(std::uint64_t v);
    Writer& varint(std::uint64_t v);
    Writer& raw(ByteView data) {
        append(buf_, data);
        return *this;
    }
    Writer& blob(ByteView data);
    Writer& str(std::string_view s) { return blob(as_bytes(s)); }
    template <std::size_t N, typename Tag>
    Writer& fixed(const FixedBytes<N, Tag>& v) {
        return raw(v.view());
    }

    const Bytes& bytes() const& { return buf_; }
    Bytes take() && { return std::move(buf_); }

private:
    Bytes buf_;
};

/// Decoder matching Writer. Every read throws Error(Errc::malformed) on truncation.
class Reader {
public:
    explicit Reader(ByteView data) : data_(data) {}

    std::uint8_t u8();
    std::uint32_t u32();
    std::uint64_t u64();
    std::uint64_t varint();
    ByteView raw(std::size_t n);
    Bytes blob();
    std::string str();
    template <std::size_t N, typename Tag>
    FixedBytes<N, Tag> fixed() {
        return FixedBytes<N, Tag>::from(raw(N));
    }
    template <typename T>
    T fixed() {
        return T::from(raw(T::size_bytes));
    }

    bool done() const { return pos_ == data_.size(); }
    std::size_t remaining() const { return data_.size() - pos_; }
    /// Throws unless the whole input was consumed.
    void expect_done() const;

private:
    ByteView data_;
    std::size_t pos_ = 0;
};

}  // namespace decent
