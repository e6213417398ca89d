#include "decent/crypto/kdf.hpp"

#include <sodium.h>

#include <algorithm>

#include "decent/common/error.hpp"

namespace decent::crypto {

namespace {

void hmac(std::uint8_t out[32], ByteView key, std::initializer_list<ByteView> parts) {
    crypto_auth_hmacsha256_state st;
    crypto_auth_hmacsha256_init(&st, key.data(), key.size());
    for (auto p : parts) crypto_auth_hmacsha256_update(&st, p.data(), p.size());
    crypto_auth_hmacsha256_final(&st, out);
}

}  // namespace

std::array<std::uint8_t, 32> hkdf_extract(ByteView salt, ByteView ikm) {
    static const std::array<std::uint8_t, 32> zero_salt{};
    std::array<std::uint8_t, 32> prk;
    hmac(prk.data(), salt.empty() ? ByteView(zero_salt) : salt, {ikm});
    return prk;
}

Bytes hkdf_expand(ByteView prk, ByteView info, std::size_t length) {
    if (length > 255 * 32) throw Error(Errc::invalid_argument, "hkdf output too long");
    Bytes out;
    out.reserve(length);
    std::array<std::uint8_t, 32> block{};
    std::size_t block_len = 0;
    for (std::uint8_t counter = 1; out.size() < length; ++counter) {
        hmac(block.data(), prk, {ByteView(block.data(), block_len), info, ByteView(&counter, 1)});
        block_len = block.size();
        auto take = std::min(block.size(), length - out.size());
        out.insert(out.end(), block.begin(), block.begin() + static_cast<std::ptrdiff_t>(take));
    }
    return out;
}

Bytes hkdf(ByteView salt, ByteView ikm, ByteView info, std::size_t length) {
    auto prk = hkdf_extract(salt, ikm);
    return hkdf_expand(prk, info, length);
}

std::array<std::uint8_t, 32> derive_key(std::string_view label, ByteView ikm, ByteView context) {
    Bytes info(label.begin(), label.end());
    info.push_back(0);
    append(info, context);
    auto okm = hkdf(as_bytes("decent-kdf-v1"), ikm, info, 32);
    std::array<std::uint8_t, 32> out;
    std::copy(okm.begin(), okm.end(), out.begin());
    return out;
}

std::array<std::uint8_t, 32> digest(ByteView data) {
    std::array<std::uint8_t, 32> out;
    crypto_generichash(out.data(), out.size(), data.data(), data.size(), nullptr, 0);
    return out;
}

}  // namespace decent::crypto
