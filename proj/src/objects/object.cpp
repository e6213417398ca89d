#include "decent/objects/object.hpp"

#include "decent/common/error.hpp"
#include "decent/crypto/kdf.hpp"
#include "decent/crypto/symmetric.hpp"

namespace decent::objects {

namespace {

constexpr std::string_view body_domain = "decent-body-v1";
constexpr std::string_view body_sig_domain = "decent-body-sig-v1";
constexpr std::string_view append_domain = "decent-append-v1";
constexpr std::string_view append_sig_domain = "decent-append-sig-v1";

enum class ContentTag : std::uint8_t { status = 1, wall, profile, root, bytes };

Bytes body_ad(const ObjectId& id, std::uint64_t version, const VerifyKey& wapk) {
    Writer w;
    w.str(body_domain).fixed(id).u64(version).fixed(wapk);
    return std::move(w).take();
}

void encode_append_policy(Writer& w, const std::optional<AppendPolicy>& ap) {
    w.u8(ap ? 1 : 0);
    if (ap) {
        w.fixed(ap->apspk);
        crypto::encode(w, ap->apssk_capsule);
    }
}

std::optional<AppendPolicy> decode_append_policy(Reader& r) {
    auto flag = r.u8();
    if (flag > 1) throw Error(Errc::malformed, "bad append policy flag");
    if (!flag) return std::nullopt;
    AppendPolicy ap;
    ap.apspk = r.fixed<VerifyKey>();
    ap.apssk_capsule = crypto::decode_policy_ciphertext(r);
    return ap;
}

Bytes body_sig_message(const ContainerObject& obj) {
    Writer w;
    w.str(body_sig_domain).fixed(obj.id).u64(obj.version);
    encode(w, obj.content);
    encode_append_policy(w, obj.append_policy);
    return std::move(w).take();
}

Bytes append_sig_message(const ObjectId& parent, const VerifyKey& apspk, const ObjectReference& ref) {
    Writer w;
    w.str(append_sig_domain).fixed(parent).fixed(apspk);
    encode(w, ref);
    return std::move(w).take();
}

Bytes append_ad(const ObjectId& parent) {
    Writer w;
    w.str(append_domain).fixed(parent);
    return std::move(w).take();
}

SymKey wask_seal_key(const crypto::OwnerSecret& secret, const ObjectId& id) {
    return SymKey{crypto::derive_key("wask-seal", secret.view(), id.view())};
}

Bytes wask_ad(const ObjectId& id, const VerifyKey& wapk) {
    Writer w;
    w.fixed(id).fixed(wapk);
    return std::move(w).take();
}

std::optional<AppendPolicy> fresh_append_policy(const crypto::PolicyEncryption& pe, const PolicyTree& policy,
                                                const crypto::PublicParams& params) {
    auto apssk = crypto::SigningKey::generate(pe.rng());
    return AppendPolicy{apssk.verify_key(), pe.encrypt(policy, SymKey{apssk.seed().bytes}, params)};
}

SealedObject seal(const ContainerObject& obj, const SymKey& key, const VerifyKey& wapk, Bytes wask_capsule, Rng& rng) {
    Writer body;
    body.u64(obj.version);
    encode(body, obj.content);
    encode_append_policy(body, obj.append_policy);
    body.fixed(obj.body_signature);
    SealedObject s;
    s.id = obj.id;
    s.version = obj.version;
    s.wapk = wapk;
    s.wask_capsule = std::move(wask_capsule);
    s.sealed_body = crypto::sym_seal(key, body.bytes(), body_ad(obj.id, obj.version, wapk), rng);
    return s;
}

void encode_key_capsule(Writer& w, const std::variant<PolicyCiphertext, SymKey>& key) {
    if (const auto* ct = std::get_if<PolicyCiphertext>(&key)) {
        w.u8(0);
        crypto::encode(w, *ct);
    } else {
        w.u8(1).fixed(std::get<SymKey>(key));
    }
}

}  // namespace

CreatedObject create_object(const crypto::PolicyEncryption& pe, Content content, const PolicyTree& read_policy,
                            const std::optional<PolicyTree>& append_policy, const OwnerKeys& owner) {
    auto& rng = pe.rng();
    CreatedObject out{.object = {}, .sealed = {}, .ref = {}, .key = rng.random<SymKey>(),
                      .wask = crypto::SigningKey::generate(rng)};
    auto& obj = out.object;
    obj.id = rng.random<ObjectId>();
    obj.version = 1;
    obj.content = std::move(content);
    if (append_policy) obj.append_policy = fresh_append_policy(pe, *append_policy, owner.params);
    obj.body_signature = owner.writer.sign(body_sig_message(obj));

    const auto& wapk = out.wask.verify_key();
    auto wask_capsule = crypto::sym_seal(wask_seal_key(owner.master.owner_secret, obj.id), out.wask.seed().view(),
                                         wask_ad(obj.id, wapk), rng);
    out.sealed = seal(obj, out.key, wapk, std::move(wask_capsule), rng);
    out.ref = make_reference(pe, obj.id, out.key, read_policy, owner.writer.verify_key(), owner.params);
    return out;
}

ObjectReference make_reference(const crypto::PolicyEncryption& pe, const ObjectId& id, const SymKey& key,
                               const std::optional<PolicyTree>& read_policy, const std::optional<VerifyKey>& spk,
                               const crypto::PublicParams& params) {
    ObjectReference ref;
    ref.id = id;
    if (read_policy)
        ref.key = pe.encrypt(*read_policy, key, params);
    else
        ref.key = key;
    ref.spk = spk;
    return ref;
}

OpenedObject open_with_key(const SealedObject& sealed, const SymKey& key, const VerifyKey& spk) {
    auto body = crypto::sym_open(key, sealed.sealed_body, body_ad(sealed.id, sealed.version, sealed.wapk));
    OpenedObject out;
    out.key = key;
    auto& obj = out.object;
    obj.id = sealed.id;
    Reader r(body);
    obj.version = r.u64();
    obj.content = decode_content(r);
    obj.append_policy = decode_append_policy(r);
    obj.body_signature = r.fixed<Signature>();
    r.expect_done();
    if (obj.version != sealed.version) throw Error(Errc::malformed, "version mismatch");
    if (!crypto::verify(spk, body_sig_message(obj), obj.body_signature))
        throw Error(Errc::bad_signature, "body signature does not verify");

    const auto ad = append_ad(obj.id);
    for (const auto& raw : sealed.appends) {
        if (!obj.append_policy) {
            ++out.dropped_appends;
            continue;
        }
        try {
            auto plain = crypto::sym_open(key, raw, ad);
            Reader er(plain);
            AppendEntry entry;
            entry.ref = decode_reference(er);
            entry.signature = er.fixed<Signature>();
            er.expect_done();
            if (!crypto::verify(obj.append_policy->apspk,
                                append_sig_message(obj.id, obj.append_policy->apspk, entry.ref), entry.signature)) {
                ++out.dropped_appends;
                continue;
            }
            obj.appends.push_back(std::move(entry));
        } catch (const Error&) {
            ++out.dropped_appends;
        }
    }
    return out;
}

OpenedObject open_object(const SealedObject& sealed, const ObjectReference& ref, CapsuleOpener& opener,
                         const std::optional<VerifyKey>& inherited_spk) {
    if (ref.id != sealed.id) throw Error(Errc::invalid_argument, "reference is for a different object");
    const auto& spk = ref.spk ? ref.spk : inherited_spk;
    if (!spk) throw Error(Errc::invalid_argument, "no verification key for object");
    SymKey key = ref.bare() ? std::get<SymKey>(ref.key) : opener.open(std::get<PolicyCiphertext>(ref.key));
    return open_with_key(sealed, key, *spk);
}

Bytes build_append_entry(const OpenedObject& parent, const ObjectReference& comment, CapsuleOpener& opener,
                         Rng& rng) {
    const auto& ap = parent.object.append_policy;
    if (!ap) throw Error(Errc::policy_unsatisfied, "object does not accept appends");
    auto seed = opener.open(ap->apssk_capsule);
    auto apssk = crypto::SigningKey::from_seed(crypto::SigningSeed{seed.bytes});
    if (apssk.verify_key() != ap->apspk) throw Error(Errc::auth_failure, "append key does not match");
    Writer w;
    encode(w, comment);
    w.fixed(apssk.sign(append_sig_message(parent.object.id, ap->apspk, comment)));
    return crypto::sym_seal(parent.key, w.bytes(), append_ad(parent.object.id), rng);
}

UpdatedObject update_object(const crypto::PolicyEncryption& pe, const OpenedObject& old, const SealedObject& old_sealed,
                            Content content, const OwnerKeys& owner, const AppendPolicyChange& append_change) {
    if (old.object.id != old_sealed.id) throw Error(Errc::invalid_argument, "sealed object does not match");
    UpdatedObject out;
    auto& obj = out.object;
    obj.id = old.object.id;
    obj.version = old.object.version + 1;
    obj.content = std::move(content);
    if (std::holds_alternative<KeepAppendPolicy>(append_change))
        obj.append_policy = old.object.append_policy;
    else if (const auto* tree = std::get_if<PolicyTree>(&append_change))
        obj.append_policy = fresh_append_policy(pe, *tree, owner.params);
    obj.body_signature = owner.writer.sign(body_sig_message(obj));
    out.sealed = seal(obj, old.key, old_sealed.wapk, old_sealed.wask_capsule, pe.rng());
    return out;
}

crypto::SigningKey unseal_wask(const SealedObject& sealed, const crypto::OwnerSecret& owner_secret) {
    auto seed = crypto::sym_open(wask_seal_key(owner_secret, sealed.id), sealed.wask_capsule,
                                 wask_ad(sealed.id, sealed.wapk));
    auto wask = crypto::SigningKey::from_seed(crypto::SigningSeed::from(seed));
    if (wask.verify_key() != sealed.wapk) throw Error(Errc::auth_failure, "write key does not match");
    return wask;
}

dht::StoredRecord to_record(const SealedObject& sealed, const crypto::SigningKey& wask) {
    if (wask.verify_key() != sealed.wapk) throw Error(Errc::invalid_argument, "wrong write key for object");
    dht::StoredRecord r;
    r.id = sealed.id;
    r.version = sealed.version;
    r.wapk = sealed.wapk;
    Writer w;
    w.blob(sealed.wask_capsule).blob(sealed.sealed_body);
    r.blob = std::move(w).take();
    r.appends = sealed.appends;
    r.auth = wask.sign(dht::write_auth_message(r.id, r.version, dht::blob_digest(r.blob)));
    return r;
}

SealedObject from_record(const dht::StoredRecord& record) {
    SealedObject s;
    s.id = record.id;
    s.version = record.version;
    s.wapk = record.wapk;
    Reader r(record.blob);
    s.wask_capsule = r.blob();
    s.sealed_body = r.blob();
    r.expect_done();
    s.appends = record.appends;
    return s;
}

Signature delete_signature(const SealedObject& sealed, const crypto::SigningKey& wask) {
    return wask.sign(dht::delete_auth_message(sealed.id, sealed.version));
}

void encode(Writer& out, const ObjectReference& ref) {
    out.fixed(ref.id);
    encode_key_capsule(out, ref.key);
    out.u8(ref.spk ? 1 : 0);
    if (ref.spk) out.fixed(*ref.spk);
}

ObjectReference decode_reference(Reader& in) {
    ObjectReference ref;
    ref.id = in.fixed<ObjectId>();
    switch (in.u8()) {
        case 0: ref.key = crypto::decode_policy_ciphertext(in); break;
        case 1: ref.key = in.fixed<SymKey>(); break;
        default: throw Error(Errc::malformed, "bad reference key tag");
    }
    switch (in.u8()) {
        case 0: break;
        case 1: ref.spk = in.fixed<VerifyKey>(); break;
        default: throw Error(Errc::malformed, "bad reference spk flag");
    }
    return ref;
}

void encode(Writer& out, const Content& content) {
    std::visit(
        [&](const auto& c) {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, StatusContent>) {
                out.u8(static_cast<std::uint8_t>(ContentTag::status)).str(c.author).str(c.text).u64(c.timestamp);
            } else if constexpr (std::is_same_v<T, WallContent>) {
                out.u8(static_cast<std::uint8_t>(ContentTag::wall)).varint(c.items.size());
                for (const auto& ref : c.items) encode(out, ref);
            } else if constexpr (std::is_same_v<T, ProfileContent>) {
                out.u8(static_cast<std::uint8_t>(ContentTag::profile)).varint(c.fields.size());
                for (const auto& [k, v] : c.fields) out.str(k).str(v);
            } else if constexpr (std::is_same_v<T, RootContent>) {
                out.u8(static_cast<std::uint8_t>(ContentTag::root));
                encode(out, c.profile);
                encode(out, c.wall);
            } else {
                out.u8(static_cast<std::uint8_t>(ContentTag::bytes)).blob(c.data);
            }
        },
        content);
}

Content decode_content(Reader& in) {
    switch (static_cast<ContentTag>(in.u8())) {
        case ContentTag::status: {
            StatusContent c;
            c.author = in.str();
            c.text = in.str();
            c.timestamp = in.u64();
            return c;
        }
        case ContentTag::wall: {
            WallContent c;
            auto n = in.varint();
            if (n > in.remaining()) throw Error(Errc::malformed, "wall too long");
            for (std::uint64_t i = 0; i < n; ++i) c.items.push_back(decode_reference(in));
            return c;
        }
        case ContentTag::profile: {
            ProfileContent c;
            auto n = in.varint();
            if (n > in.remaining()) throw Error(Errc::malformed, "profile too long");
            for (std::uint64_t i = 0; i < n; ++i) {
                auto k = in.str();
                c.fields[k] = in.str();
            }
            return c;
        }
        case ContentTag::root: {
            RootContent c;
            c.profile = decode_reference(in);
            c.wall = decode_reference(in);
            return c;
        }
        case ContentTag::bytes: return BytesContent{in.blob()};
    }
    throw Error(Errc::malformed, "unknown content type");
}

void encode(Writer& out, const SealedObject& sealed) {
    out.fixed(sealed.id).u64(sealed.version).fixed(sealed.wapk).blob(sealed.wask_capsule).blob(sealed.sealed_body);
    out.varint(sealed.appends.size());
    for (const auto& a : sealed.appends) out.blob(a);
}

SealedObject decode_sealed(Reader& in) {
    SealedObject s;
    s.id = in.fixed<ObjectId>();
    s.version = in.u64();
    s.wapk = in.fixed<VerifyKey>();
    s.wask_capsule = in.blob();
    s.sealed_body = in.blob();
    auto n = in.varint();
    if (n > in.remaining()) throw Error(Errc::malformed, "too many appends");
    for (std::uint64_t i = 0; i < n; ++i) s.appends.push_back(in.blob());
    return s;
}

}  // namespace decent::objects
