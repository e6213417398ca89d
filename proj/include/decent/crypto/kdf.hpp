#pragma once

#include <array>
#include <cstddef>
#include <string_view>

#include "decent/common/bytes.hpp"

namespace decent::crypto {

/// HKDF-SHA256 (RFC 5869).
std::array<std::uint8_t, 32> hkdf_extract(ByteView salt, ByteView ikm);
Bytes hkdf_expand(ByteView prk, ByteView info, std::size_t length);
Bytes hkdf(ByteView salt, ByteView ikm, ByteView info, std::size_t length);

/// 32-byte key for one purpose; `label` separates domains (leaf mask, root seal, owner seal).
std::array<std::uint8_t, 32> derive_key(std::string_view label, ByteView ikm, ByteView context = {});

/// BLAKE2b-256.
std::array<std::uint8_t, 32> digest(ByteView data);

}  // namespace decent::crypto
