#pragma once

#include <cstdint>
#include <string_view>

#include "decent/common/bytes.hpp"
#include "decent/common/random.hpp"

namespace decent::crypto {

struct ScalarTag {};
struct ElementTag {};

/// Exponent modulo the group order, in the backend's canonical 32-byte encoding.
using Scalar = FixedBytes<32, ScalarTag>;
/// Group element, 32-byte canonical encoding.
using Element = FixedBytes<32, ElementTag>;

enum class GroupKind : std::uint8_t {
    ristretto255 = 1,
    /// Order-q subgroup of Z_p^* with a 62-bit safe prime. Fast and reproducible, but only
    /// meant for tests; discrete log is easy at this size.
    schnorr62 = 2,
};

/// Prime-order cyclic group written multiplicatively: exp(g, a) is g^a.
class Group {
public:
    virtual ~Group() = default;

    virtual GroupKind kind() const = 0;
    virtual std::string_view name() const = 0;

    /// Uniform in [1, q-1].
    virtual Scalar random_scalar(Rng& rng) const = 0;
    virtual Scalar scalar(std::uint64_t v) const = 0;
    virtual Scalar add(const Scalar& a, const Scalar& b) const = 0;
    virtual Scalar sub(const Scalar& a, const Scalar& b) const = 0;
    virtual Scalar mul(const Scalar& a, const Scalar& b) const = 0;
    /// Throws Error(invalid_argument) on zero.
    virtual Scalar invert(const Scalar& a) const = 0;

    virtual Element identity() const = 0;
    /// g^a for the fixed generator g.
    virtual Element base_exp(const Scalar& a) const = 0;
    /// e^a. Throws Error(malformed) when `e` is not a valid element encoding.
    virtual Element exp(const Element& e, const Scalar& a) const = 0;
    virtual Element combine(const Element& a, const Element& b) const = 0;
    virtual bool valid(const Element& e) const = 0;
};

const Group& group(GroupKind kind);
const Group& ristretto255();
const Group& schnorr62();

/// Lagrange coefficient at zero for x-coordinate `i` over the point set `xs`.
Scalar lagrange_at_zero(const Group& g, std::uint32_t i, std::span<const std::uint32_t> xs);

}  // namespace decent::crypto
