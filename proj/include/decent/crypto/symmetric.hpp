#pragma once

#include "decent/common/bytes.hpp"
#include "decent/common/random.hpp"

namespace decent::crypto {

struct SymKeyTag {};
using SymKey = FixedBytes<32, SymKeyTag>;

/// XChaCha20-Poly1305. Output is nonce || ciphertext || tag.
Bytes sym_seal(const SymKey& key, ByteView plaintext, ByteView associated_data, Rng& rng);

/// Throws Error(auth_failure) on any modification of ciphertext or associated data, or a wrong key.
Bytes sym_open(const SymKey& key, ByteView sealed, ByteView associated_data);

}  // namespace decent::crypto
