#pragma once

#include "decent/common/bytes.hpp"
#include "decent/common/random.hpp"

namespace decent::crypto {

struct VerifyKeyTag {};
struct SignatureTag {};
struct SigningSeedTag {};

using VerifyKey = FixedBytes<32, VerifyKeyTag>;
using Signature = FixedBytes<64, SignatureTag>;
using SigningSeed = FixedBytes<32, SigningSeedTag>;

/// Ed25519 key pair. Serialised as its 32-byte seed.
class SigningKey {
public:
    static SigningKey generate(Rng& rng);
    static SigningKey from_seed(const SigningSeed& seed);

    const SigningSeed& seed() const { return seed_; }
    const VerifyKey& verify_key() const { return vk_; }
    Signature sign(ByteView message) const;

private:
    SigningSeed seed_;
    std::array<std::uint8_t, 64> secret_{};
    VerifyKey vk_;
};

bool verify(const VerifyKey& vk, ByteView message, const Signature& sig);

}  // namespace decent::crypto
