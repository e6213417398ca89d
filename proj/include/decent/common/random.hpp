#pragma once

#include <array>
#include <cstdint>
#include <span>

#include "decent/common/bytes.hpp"

namespace decent {

/// Randomness source for every key, nonce and identifier. Injected so simulations replay
/// bit-identically from a seed.
class Rng {
public:
    virtual ~Rng() = default;
    virtual void fill(std::span<std::uint8_t> out) = 0;

    template <typename T>
    T random() {
        T value;
        fill(value.bytes);
        return value;
    }
    std::uint64_t next_u64();
    /// Uniform in [0, bound).
    std::uint64_t uniform(std::uint64_t bound);
    /// Uniform in [0, 1).
    double unit();
};

/// OS entropy.
class SystemRng final : public Rng {
public:
    void fill(std::span<std::uint8_t> out) override;
};

/// ChaCha20 keystream keyed by a seed; each fill() consumes a fresh block counter.
class DeterministicRng final : public Rng {
public:
    explicit DeterministicRng(std::uint64_t seed);
    explicit DeterministicRng(ByteView seed_material);

    void fill(std::span<std::uint8_t> out) override;

    /// Child generator with an independent stream, labelled by `label`.
    DeterministicRng fork(std::uint64_t label);

private:
    std::array<std::uint8_t, 32> key_{};
    std::uint64_t counter_ = 0;
};

}  // namespace decent
