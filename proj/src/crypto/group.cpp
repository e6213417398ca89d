#include "decent/crypto/group.hpp"

#include <sodium.h>

#include "decent/common/error.hpp"

namespace decent::crypto {

namespace {

class Ristretto255 final : public Group {
public:
    Ristretto255() {
        if (sodium_init() < 0) throw Error(Errc::io_error, "libsodium initialisation failed");
    }

    GroupKind kind() const override { return GroupKind::ristretto255; }
    std::string_view name() const override { return "ristretto255"; }

    Scalar random_scalar(Rng& rng) const override {
        std::array<std::uint8_t, crypto_core_ristretto255_NONREDUCEDSCALARBYTES> wide;
        Scalar s;
        do {
            rng.fill(wide);
            crypto_core_ristretto255_scalar_reduce(s.bytes.data(), wide.data());
        } while (s.is_zero());
        return s;
    }

    Scalar scalar(std::uint64_t v) const override {
        Scalar s;
        for (int i = 0; i < 8; ++i) s.bytes[i] = static_cast<std::uint8_t>(v >> (8 * i));
        return s;
    }

    Scalar add(const Scalar& a, const Scalar& b) const override {
        Scalar r;
        crypto_core_ristretto255_scalar_add(r.bytes.data(), a.bytes.data(), b.bytes.data());
        return r;
    }

    Scalar sub(const Scalar& a, const Scalar& b) const override {
        Scalar r;
        crypto_core_ristretto255_scalar_sub(r.bytes.data(), a.bytes.data(), b.bytes.data());
        return r;
    }

    Scalar mul(const Scalar& a, const Scalar& b) const override {
        Scalar r;
        crypto_core_ristretto255_scalar_mul(r.bytes.data(), a.bytes.data(), b.bytes.data());
        return r;
    }

    Scalar invert(const Scalar& a) const override {
        Scalar r;
        if (crypto_core_ristretto255_scalar_invert(r.bytes.data(), a.bytes.data()) != 0)
            throw Error(Errc::invalid_argument, "inverse of zero scalar");
        return r;
    }

    Element identity() const override { return Element{}; }

    Element base_exp(const Scalar& a) const override {
        Element r;
        if (crypto_scalarmult_ristretto255_base(r.bytes.data(), a.bytes.data()) != 0) return identity();
        return r;
    }

    Element exp(const Element& e, const Scalar& a) const override {
        if (!valid(e)) throw Error(Errc::malformed, "invalid ristretto255 element");
        if (e.is_zero() || a.is_zero()) return identity();
        Element r;
        // libsodium reports an identity result as failure.
        if (crypto_scalarmult_ristretto255(r.bytes.data(), a.bytes.data(), e.bytes.data()) != 0) return identity();
        return r;
    }

    Element combine(const Element& a, const Element& b) const override {
        if (a.is_zero()) return b;
        if (b.is_zero()) return a;
        Element r;
        if (crypto_core_ristretto255_add(r.bytes.data(), a.bytes.data(), b.bytes.data()) != 0)
            throw Error(Errc::malformed, "invalid ristretto255 element");
        return r;
    }

    bool valid(const Element& e) const override {
        return e.is_zero() || crypto_core_ristretto255_is_valid_point(e.bytes.data()) == 1;
    }
};

class Schnorr62 final : public Group {
    using u64 = std::uint64_t;
    __extension__ typedef unsigned __int128 u128;

    static constexpr u64 p = 4611686018427377339ULL;
    static constexpr u64 q = (p - 1) / 2;
    static constexpr u64 g = 4;  // a quadratic residue, so it generates the order-q subgroup

    static u64 load(const auto& fb) {
        u64 v = 0;
        for (int i = 7; i >= 0; --i) v = (v << 8) | fb.bytes[static_cast<std::size_t>(i)];
        return v;
    }
    template <typename T>
    static T store(u64 v) {
        T out;
        for (int i = 0; i < 8; ++i) out.bytes[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(v >> (8 * i));
        return out;
    }
    static u64 mulmod(u64 a, u64 b, u64 m) { return static_cast<u64>(static_cast<u128>(a) * b % m); }
    static u64 powmod(u64 base, u64 e, u64 m) {
        u64 r = 1;
        base %= m;
        while (e) {
            if (e & 1) r = mulmod(r, base, m);
            base = mulmod(base, base, m);
            e >>= 1;
        }
        return r;
    }

public:
    GroupKind kind() const override { return GroupKind::schnorr62; }
    std::string_view name() const override { return "schnorr62"; }

    Scalar random_scalar(Rng& rng) const override { return store<Scalar>(1 + rng.uniform(q - 1)); }
    Scalar scalar(u64 v) const override { return store<Scalar>(v % q); }
    Scalar add(const Scalar& a, const Scalar& b) const override {
        return store<Scalar>(static_cast<u64>((static_cast<u128>(load(a)) + load(b)) % q));
    }
    Scalar sub(const Scalar& a, const Scalar& b) const override {
        return store<Scalar>(static_cast<u64>((static_cast<u128>(load(a)) + q - load(b) % q) % q));
    }
    Scalar mul(const Scalar& a, const Scalar& b) const override { return store<Scalar>(mulmod(load(a), load(b), q)); }
    Scalar invert(const Scalar& a) const override {
        auto v = load(a) % q;
        if (v == 0) throw Error(Errc::invalid_argument, "inverse of zero scalar");
        return store<Scalar>(powmod(v, q - 2, q));
    }

    Element identity() const override { return store<Element>(1); }
    Element base_exp(const Scalar& a) const override { return store<Element>(powmod(g, load(a), p)); }
    Element exp(const Element& e, const Scalar& a) const override {
        if (!valid(e)) throw Error(Errc::malformed, "invalid schnorr62 element");
        return store<Element>(powmod(load(e), load(a), p));
    }
    Element combine(const Element& a, const Element& b) const override {
        return store<Element>(mulmod(load(a), load(b), p));
    }
    bool valid(const Element& e) const override {
        for (std::size_t i = 8; i < Element::size_bytes; ++i)
            if (e.bytes[i] != 0) return false;
        auto v = load(e);
        return v >= 1 && v < p && powmod(v, q, p) == 1;
    }
};

}  // namespace

const Group& ristretto255() {
    static const Ristretto255 instance;
    return instance;
}

const Group& schnorr62() {
    static const Schnorr62 instance;
    return instance;
}

const Group& group(GroupKind kind) {
    switch (kind) {
        case GroupKind::ristretto255: return ristretto255();
        case GroupKind::schnorr62: return schnorr62();
    }
    throw Error(Errc::malformed, "unknown group kind");
}

Scalar lagrange_at_zero(const Group& g, std::uint32_t i, std::span<const std::uint32_t> xs) {
    auto num = g.scalar(1);
    auto den = g.scalar(1);
    for (auto j : xs) {
        if (j == i) continue;
        // (0 - j) / (i - j) == j / (j - i)
        num = g.mul(num, g.scalar(j));
        den = g.mul(den, g.sub(g.scalar(j), g.scalar(i)));
    }
    return g.mul(num, g.invert(den));
}

}  // namespace decent::crypto
