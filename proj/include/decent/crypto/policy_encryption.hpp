#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "decent/common/ids.hpp"
#include "decent/common/random.hpp"
#include "decent/crypto/group.hpp"
#include "decent/crypto/proxy.hpp"
#include "decent/crypto/symmetric.hpp"
#include "decent/policy/policy.hpp"

namespace decent::crypto {

using policy::NameMap;
using policy::PolicyTree;

struct OwnerSecretTag {};
using OwnerSecret = FixedBytes<32, OwnerSecretTag>;

/// A key authority's secret: one exponent per attribute it issues.
struct MasterKey {
    GroupKind group = GroupKind::ristretto255;
    /// Seeds owner-only sealing (write-auth secret keys stored inside objects).
    OwnerSecret owner_secret;
    std::map<AttributeId, Scalar> exponents;
};

/// g^a per attribute; what encryptors need.
struct PublicParams {
    GroupKind group = GroupKind::ristretto255;
    std::map<AttributeId, Element> attribute_keys;
};

/// Proxy consulted on one hop of a decryption: the proxy run by `proxy_owner`, keyed by `holder`.
struct ProxyHop {
    UserId proxy_owner;
    UserId holder;

    friend bool operator==(const ProxyHop&, const ProxyHop&) = default;
};

/// Attribute key held by a contact. Each exponent is the attribute exponent times one blinding
/// factor per hop, so it is useless without every proxy on the chain.
struct ContactKey {
    GroupKind group = GroupKind::ristretto255;
    UserId holder;
    UserId issuer;
    std::map<AttributeId, Scalar> blinded;
    /// chain[0] is the direct issuer's proxy; chain.back() is the attribute authority's.
    std::vector<ProxyHop> chain;

    std::size_t delegation_depth() const { return chain.empty() ? 0 : chain.size() - 1; }
    const UserId& authority() const { return chain.back().proxy_owner; }
    AttributeSet attributes() const;
};

struct MaskedShare {
    std::uint32_t leaf_index = 0;
    std::array<std::uint8_t, 32> masked{};

    friend bool operator==(const MaskedShare&, const MaskedShare&) = default;
};

/// Hybrid capsule: the root secret is Shamir-shared down the policy tree, each leaf share masked
/// with a key derived from g^(r*a), and the payload key sealed under a key derived from the root.
struct PolicyCiphertext {
    GroupKind group = GroupKind::ristretto255;
    Element ephemeral;  // g^r
    std::vector<MaskedShare> shares;  // one per leaf, in leaf preorder
    PolicyTree policy = PolicyTree::leaf({});
    Bytes sealed;

    friend bool operator==(const PolicyCiphertext&, const PolicyCiphertext&) = default;
};

struct DecryptStats {
    std::size_t proxy_rounds = 0;
    std::size_t refused = 0;
};

/// Policy-based encryption with proxy-mediated decryption. Holds references to the group and the
/// randomness source; every call draws fresh randomness.
class PolicyEncryption {
public:
    PolicyEncryption(const Group& group, Rng& rng) : group_(group), rng_(rng) {}

    const Group& group() const { return group_; }
    Rng& rng() const { return rng_; }

    /// Throws Error(invalid_argument) on duplicate names.
    std::pair<MasterKey, NameMap> keygen_master(std::span<const std::string> names) const;
    /// Adds a fresh attribute to an existing authority.
    AttributeId add_attribute(MasterKey& master, NameMap& names, const std::string& name) const;
    PublicParams public_params(const MasterKey& master) const;

    /// Fresh blinding per attribute; re-issuing an attribute replaces the proxy entry, which
    /// kills the holder's previous key and anything delegated from it.
    ContactKey issue_key(const MasterKey& master, ProxyState& proxy, const UserId& issuer, const UserId& holder,
                         const AttributeSet& attrs) const;

    /// Re-blinds a subset of `delegator`'s attributes for `new_holder`; the delegator's proxy gains
    /// the unblinding entries.
    ContactKey delegate(const ContactKey& delegator, ProxyState& delegator_proxy, const UserId& new_holder,
                        const AttributeSet& attrs) const;

    PolicyCiphertext encrypt(const PolicyTree& policy, const SymKey& payload, const PublicParams& params) const;

    /// `proxies` follows key.chain order. Retries with a smaller attribute set when a proxy
    /// refuses. Throws Error(policy_unsatisfied), Error(revoked) or Error(auth_failure).
    SymKey decrypt(const PolicyCiphertext& ct, const ContactKey& key, std::span<ProxyHandle* const> proxies,
                   DecryptStats* stats = nullptr) const;

private:
    const Group& group_;
    Rng& rng_;
};

void encode(Writer& out, const MasterKey& key);
MasterKey decode_master_key(Reader& in);
void encode(Writer& out, const PublicParams& params);
PublicParams decode_public_params(Reader& in);
void encode(Writer& out, const ContactKey& key);
ContactKey decode_contact_key(Reader& in);
void encode(Writer& out, const PolicyCiphertext& ct);
PolicyCiphertext decode_policy_ciphertext(Reader& in);

}  // namespace decent::crypto
