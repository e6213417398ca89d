#include "decent/crypto/symmetric.hpp"

#include <sodium.h>

#include "decent/common/error.hpp"

namespace decent::crypto {

namespace {
constexpr std::size_t nonce_len = crypto_aead_xchacha20poly1305_ietf_NPUBBYTES;
constexpr std::size_t tag_len = crypto_aead_xchacha20poly1305_ietf_ABYTES;
}  // namespace

Bytes sym_seal(const SymKey& key, ByteView plaintext, ByteView associated_data, Rng& rng) {
    Bytes out(nonce_len + plaintext.size() + tag_len);
    rng.fill(std::span(out.data(), nonce_len));
    unsigned long long written = 0;
    crypto_aead_xchacha20poly1305_ietf_encrypt(out.data() + nonce_len, &written, plaintext.data(), plaintext.size(),
                                               associated_data.data(), associated_data.size(), nullptr, out.data(),
                                               key.bytes.data());
    out.resize(nonce_len + written);
    return out;
}

Bytes sym_open(const SymKey& key, ByteView sealed, ByteView associated_data) {
    if (sealed.size() < nonce_len + tag_len) throw Error(Errc::auth_failure, "sealed payload too short");
    Bytes out(sealed.size() - nonce_len - tag_len);
    unsigned long long written = 0;
    if (crypto_aead_xchacha20poly1305_ietf_decrypt(out.data(), &written, nullptr, sealed.data() + nonce_len,
                                                   sealed.size() - nonce_len, associated_data.data(),
                                                   associated_data.size(), sealed.data(), key.bytes.data()) != 0)
        throw Error(Errc::auth_failure, "authenticated decryption failed");
    out.resize(written);
    return out;
}

}  // namespace decent::crypto
