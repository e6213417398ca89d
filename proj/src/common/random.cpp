#include "decent/common/random.hpp"

#include <sodium.h>

#include <cstring>

namespace decent {

std::uint64_t Rng::next_u64() {
    std::array<std::uint8_t, 8> buf;
    fill(buf);
    std::uint64_t v;
    std::memcpy(&v, buf.data(), sizeof v);
    return v;
}

std::uint64_t Rng::uniform(std::uint64_t bound) {
    if (bound <= 1) return 0;
    // Rejection sampling removes modulo bias.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    for (;;) {
        auto v = next_u64();
        if (v < limit) return v % bound;
    }
}

double Rng::unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

void SystemRng::fill(std::span<std::uint8_t> out) { randombytes_buf(out.data(), out.size()); }

DeterministicRng::DeterministicRng(std::uint64_t seed) {
    std::array<std::uint8_t, 8> le;
    for (int i = 0; i < 8; ++i) le[i] = static_cast<std::uint8_t>(seed >> (8 * i));
    crypto_generichash(key_.data(), key_.size(), le.data(), le.size(), nullptr, 0);
}

DeterministicRng::DeterministicRng(ByteView seed_material) {
    crypto_generichash(key_.data(), key_.size(), seed_material.data(), seed_material.size(), nullptr, 0);
}

void DeterministicRng::fill(std::span<std::uint8_t> out) {
    std::array<std::uint8_t, crypto_stream_chacha20_ietf_NONCEBYTES> nonce{};
    for (int i = 0; i < 8; ++i) nonce[i] = static_cast<std::uint8_t>(counter_ >> (8 * i));
    ++counter_;
    crypto_stream_chacha20_ietf(out.data(), out.size(), nonce.data(), key_.data());
}

DeterministicRng DeterministicRng::fork(std::uint64_t label) {
    Writer w;
    w.raw(key_).u64(label).u64(counter_++);
    return DeterministicRng(ByteView(w.bytes()));
}

}  // namespace decent
