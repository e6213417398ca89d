#include "decent/crypto/policy_encryption.hpp"

#include <set>

#include "decent/common/error.hpp"
#include "decent/crypto/kdf.hpp"

namespace decent::crypto {

AttributeSet ContactKey::attributes() const {
    AttributeSet out;
    for (const auto& [id, _] : blinded) out.insert(id);
    return out;
}

namespace {

std::array<std::uint8_t, 32> leaf_mask(const Element& seed, std::uint32_t leaf_index, const Element& ephemeral) {
    Writer ctx;
    ctx.u32(leaf_index).fixed(ephemeral);
    return derive_key("leaf-mask", seed.view(), ctx.bytes());
}

SymKey root_seal_key(const Scalar& root) { return SymKey::from(derive_key("root-seal", root.view())); }

Bytes seal_context(const Element& ephemeral, const PolicyTree& policy) {
    Writer w;
    w.str("decent-pbe-v1").fixed(ephemeral);
    policy::encode(w, policy);
    return std::move(w).take();
}

void check_group(GroupKind expected, GroupKind actual) {
    if (expected != actual) throw Error(Errc::invalid_argument, "group mismatch between keys and engine");
}

}  // namespace

std::pair<MasterKey, NameMap> PolicyEncryption::keygen_master(std::span<const std::string> names) const {
    MasterKey master;
    master.group = group_.kind();
    master.owner_secret = rng_.random<OwnerSecret>();
    NameMap map;
    for (const auto& name : names) add_attribute(master, map, name);
    return {std::move(master), std::move(map)};
}

AttributeId PolicyEncryption::add_attribute(MasterKey& master, NameMap& names, const std::string& name) const {
    if (names.contains(name)) throw Error(Errc::invalid_argument, "duplicate attribute name '" + name + "'");
    AttributeId id;
    do {
        id = rng_.random<AttributeId>();
    } while (master.exponents.contains(id));
    master.exponents.emplace(id, group_.random_scalar(rng_));
    names.emplace(name, id);
    return id;
}

PublicParams PolicyEncryption::public_params(const MasterKey& master) const {
    check_group(group_.kind(), master.group);
    PublicParams params;
    params.group = master.group;
    for (const auto& [id, a] : master.exponents) params.attribute_keys.emplace(id, group_.base_exp(a));
    return params;
}

ContactKey PolicyEncryption::issue_key(const MasterKey& master, ProxyState& proxy, const UserId& issuer,
                                       const UserId& holder, const AttributeSet& attrs) const {
    check_group(group_.kind(), master.group);
    check_group(group_.kind(), proxy.group);
    ContactKey key;
    key.group = master.group;
    key.holder = holder;
    key.issuer = issuer;
    key.chain.push_back({issuer, holder});
    for (const auto& attr : attrs) {
        auto it = master.exponents.find(attr);
        if (it == master.exponents.end())
            throw Error(Errc::unknown_attribute, "attribute " + attr.hex() + " not issued by this authority");
        auto blinding = group_.random_scalar(rng_);
        key.blinded.emplace(attr, group_.mul(it->second, blinding));
        proxy.unblinding.insert_or_assign({holder, attr}, group_.invert(blinding));
    }
    return key;
}

ContactKey PolicyEncryption::delegate(const ContactKey& delegator, ProxyState& delegator_proxy,
                                      const UserId& new_holder, const AttributeSet& attrs) const {
    check_group(group_.kind(), delegator.group);
    check_group(group_.kind(), delegator_proxy.group);
    ContactKey key;
    key.group = delegator.group;
    key.holder = new_holder;
    key.issuer = delegator.holder;
    key.chain.push_back({delegator.holder, new_holder});
    key.chain.insert(key.chain.end(), delegator.chain.begin(), delegator.chain.end());
    for (const auto& attr : attrs) {
        auto it = delegator.blinded.find(attr);
        if (it == delegator.blinded.end())
            throw Error(Errc::invalid_argument, "attribute " + attr.hex() + " not held by delegator");
        auto blinding = group_.random_scalar(rng_);
        key.blinded.emplace(attr, group_.mul(it->second, blinding));
        delegator_proxy.unblinding.insert_or_assign({new_holder, attr}, group_.invert(blinding));
    }
    return key;
}

namespace {

struct ShareWriter {
    const Group& g;
    Rng& rng;
    const PublicParams& params;
    const Scalar& r;
    const Element& ephemeral;
    std::vector<MaskedShare>& out;
    std::uint32_t next_leaf = 0;

    void distribute(const PolicyTree& node, const Scalar& secret) {
        if (node.is_leaf()) {
            auto pk = params.attribute_keys.find(node.attribute());
            if (pk == params.attribute_keys.end())
                throw Error(Errc::unknown_attribute, "no public key for attribute " + node.attribute().hex());
            MaskedShare share;
            share.leaf_index = next_leaf++;
            auto mask = leaf_mask(g.exp(pk->second, r), share.leaf_index, ephemeral);
            for (std::size_t i = 0; i < mask.size(); ++i) share.masked[i] = secret.bytes[i] ^ mask[i];
            out.push_back(share);
            return;
        }
        // Degree k-1 polynomial with constant term `secret`; child i receives p(i).
        std::vector<Scalar> coeffs{secret};
        for (std::uint32_t j = 1; j < node.k(); ++j) coeffs.push_back(g.random_scalar(rng));
        for (std::uint32_t i = 0; i < node.children().size(); ++i) {
            auto x = g.scalar(i + 1);
            auto value = coeffs.back();
            for (std::size_t j = coeffs.size() - 1; j-- > 0;) value = g.add(g.mul(value, x), coeffs[j]);
            distribute(node.children()[i], value);
        }
    }
};

Scalar reconstruct(const Group& g, const policy::SelectedNode& node, const std::vector<MaskedShare>& shares,
                   const std::map<std::uint32_t, std::array<std::uint8_t, 32>>& masks) {
    if (node.leaf_index) {
        const auto& masked = shares.at(*node.leaf_index).masked;
        const auto& mask = masks.at(*node.leaf_index);
        Scalar s;
        for (std::size_t i = 0; i < s.bytes.size(); ++i) s.bytes[i] = masked[i] ^ mask[i];
        return s;
    }
    std::vector<std::uint32_t> xs;
    for (const auto& c : node.children) xs.push_back(c.position);
    Scalar acc{};
    for (const auto& c : node.children) {
        auto term = g.mul(lagrange_at_zero(g, c.position, xs), reconstruct(g, c, shares, masks));
        acc = g.add(acc, term);
    }
    return acc;
}

}  // namespace

PolicyCiphertext PolicyEncryption::encrypt(const PolicyTree& policy, const SymKey& payload,
                                           const PublicParams& params) const {
    check_group(group_.kind(), params.group);
    PolicyCiphertext ct;
    ct.group = group_.kind();
    ct.policy = policy;
    auto r = group_.random_scalar(rng_);
    ct.ephemeral = group_.base_exp(r);
    auto root = group_.random_scalar(rng_);
    ShareWriter writer{group_, rng_, params, r, ct.ephemeral, ct.shares};
    writer.distribute(policy, root);
    ct.sealed = sym_seal(root_seal_key(root), payload.view(), seal_context(ct.ephemeral, policy), rng_);
    return ct;
}

SymKey PolicyEncryption::decrypt(const PolicyCiphertext& ct, const ContactKey& key,
                                 std::span<ProxyHandle* const> proxies, DecryptStats* stats) const {
    check_group(group_.kind(), ct.group);
    check_group(group_.kind(), key.group);
    if (key.chain.empty()) throw Error(Errc::invalid_argument, "contact key has no proxy chain");
    if (proxies.size() != key.chain.size())
        throw Error(Errc::invalid_argument, "decryption needs " + std::to_string(key.chain.size()) +
                                                " proxies, got " + std::to_string(proxies.size()));
    if (ct.shares.size() != ct.policy.leaf_count()) throw Error(Errc::malformed, "share count does not match policy");

    auto held = key.attributes();
    std::set<AttributeId> refused;
    std::map<AttributeId, Element> seeds;  // g^(r*a)

    for (;;) {
        auto selection = policy::select_leaves(ct.policy, held);
        if (!selection) {
            if (!refused.empty()) throw Error(Errc::revoked, "proxy refused every usable attribute");
            throw Error(Errc::policy_unsatisfied, "key attributes do not satisfy the policy");
        }
        bool retry = false;
        for (const auto& leaf : selection->leaves) {
            if (seeds.contains(leaf.attribute)) continue;
            // The ephemeral exponent y keeps g^(r*a) hidden from every proxy on the chain.
            auto y = group_.random_scalar(rng_);
            auto partial = group_.exp(ct.ephemeral, group_.mul(key.blinded.at(leaf.attribute), y));
            bool ok = true;
            for (std::size_t hop = 0; hop < proxies.size(); ++hop) {
                if (stats) ++stats->proxy_rounds;
                auto next = proxies[hop]->transform(key.chain[hop].holder, leaf.attribute, partial);
                if (!next) {
                    ok = false;
                    break;
                }
                partial = *next;
            }
            if (!ok) {
                if (stats) ++stats->refused;
                refused.insert(leaf.attribute);
                held.erase(leaf.attribute);
                retry = true;
                break;
            }
            seeds.emplace(leaf.attribute, group_.exp(partial, group_.invert(y)));
        }
        if (retry) continue;

        std::map<std::uint32_t, std::array<std::uint8_t, 32>> masks;
        for (const auto& leaf : selection->leaves)
            masks.emplace(leaf.leaf_index, leaf_mask(seeds.at(leaf.attribute), leaf.leaf_index, ct.ephemeral));
        auto root = reconstruct(group_, selection->root, ct.shares, masks);
        auto opened = sym_open(root_seal_key(root), ct.sealed, seal_context(ct.ephemeral, ct.policy));
        if (opened.size() != SymKey::size_bytes) throw Error(Errc::malformed, "sealed payload has wrong length");
        return SymKey::from(opened);
    }
}

// ---------------------------------------------------------------------------------------------

namespace {

GroupKind read_group(Reader& in) {
    auto kind = static_cast<GroupKind>(in.u8());
    (void)group(kind);
    return kind;
}

}  // namespace

void encode(Writer& out, const MasterKey& key) {
    out.u8(static_cast<std::uint8_t>(key.group)).fixed(key.owner_secret).varint(key.exponents.size());
    for (const auto& [id, a] : key.exponents) out.fixed(id).fixed(a);
}

MasterKey decode_master_key(Reader& in) {
    MasterKey key;
    key.group = read_group(in);
    key.owner_secret = in.fixed<OwnerSecret>();
    auto n = in.varint();
    for (std::uint64_t i = 0; i < n; ++i) {
        auto id = in.fixed<AttributeId>();
        key.exponents.emplace(id, in.fixed<Scalar>());
    }
    return key;
}

void encode(Writer& out, const PublicParams& params) {
    out.u8(static_cast<std::uint8_t>(params.group)).varint(params.attribute_keys.size());
    for (const auto& [id, pk] : params.attribute_keys) out.fixed(id).fixed(pk);
}

PublicParams decode_public_params(Reader& in) {
    PublicParams params;
    params.group = read_group(in);
    auto n = in.varint();
    for (std::uint64_t i = 0; i < n; ++i) {
        auto id = in.fixed<AttributeId>();
        params.attribute_keys.emplace(id, in.fixed<Element>());
    }
    return params;
}

void encode(Writer& out, const ContactKey& key) {
    out.u8(static_cast<std::uint8_t>(key.group)).str(key.holder.name).str(key.issuer.name);
    out.varint(key.blinded.size());
    for (const auto& [id, b] : key.blinded) out.fixed(id).fixed(b);
    out.varint(key.chain.size());
    for (const auto& hop : key.chain) out.str(hop.proxy_owner.name).str(hop.holder.name);
}

ContactKey decode_contact_key(Reader& in) {
    ContactKey key;
    key.group = read_group(in);
    key.holder = UserId{in.str()};
    key.issuer = UserId{in.str()};
    auto n = in.varint();
    for (std::uint64_t i = 0; i < n; ++i) {
        auto id = in.fixed<AttributeId>();
        key.blinded.emplace(id, in.fixed<Scalar>());
    }
    auto hops = in.varint();
    if (hops == 0 || hops > 64) throw Error(Errc::malformed, "invalid proxy chain length");
    for (std::uint64_t i = 0; i < hops; ++i) {
        ProxyHop hop;
        hop.proxy_owner = UserId{in.str()};
        hop.holder = UserId{in.str()};
        key.chain.push_back(std::move(hop));
    }
    return key;
}

void encode(Writer& out, const PolicyCiphertext& ct) {
    out.u8(static_cast<std::uint8_t>(ct.group)).fixed(ct.ephemeral);
    policy::encode(out, ct.policy);
    out.varint(ct.shares.size());
    for (const auto& s : ct.shares) out.u32(s.leaf_index).raw(s.masked);
    out.blob(ct.sealed);
}

PolicyCiphertext decode_policy_ciphertext(Reader& in) {
    PolicyCiphertext ct;
    ct.group = read_group(in);
    ct.ephemeral = in.fixed<Element>();
    ct.policy = policy::decode(in);
    auto n = in.varint();
    if (n != ct.policy.leaf_count()) throw Error(Errc::malformed, "share count does not match policy");
    for (std::uint64_t i = 0; i < n; ++i) {
        MaskedShare s;
        s.leaf_index = in.u32();
        if (s.leaf_index != i) throw Error(Errc::malformed, "shares out of order");
        auto raw = in.raw(32);
        std::copy(raw.begin(), raw.end(), s.masked.begin());
        ct.shares.push_back(s);
    }
    ct.sealed = in.blob();
    return ct;
}

}  // namespace decent::crypto
