#include "decent/crypto/signature.hpp"

#include <sodium.h>

namespace decent::crypto {

SigningKey SigningKey::generate(Rng& rng) { return from_seed(rng.random<SigningSeed>()); }

SigningKey SigningKey::from_seed(const SigningSeed& seed) {
    SigningKey k;
    k.seed_ = seed;
    crypto_sign_seed_keypair(k.vk_.bytes.data(), k.secret_.data(), seed.bytes.data());
    return k;
}

Signature SigningKey::sign(ByteView message) const {
    Signature sig;
    crypto_sign_detached(sig.bytes.data(), nullptr, message.data(), message.size(), secret_.data());
    return sig;
}

bool verify(const VerifyKey& vk, ByteView message, const Signature& sig) {
    return crypto_sign_verify_detached(sig.bytes.data(), message.data(), message.size(), vk.bytes.data()) == 0;
}

}  // namespace decent::crypto
