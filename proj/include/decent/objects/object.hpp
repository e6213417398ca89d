#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "decent/common/ids.hpp"
#include "decent/crypto/policy_encryption.hpp"
#include "decent/crypto/signature.hpp"
#include "decent/dht/record.hpp"

namespace decent::objects {

using crypto::PolicyCiphertext;
using crypto::Signature;
using crypto::SymKey;
using crypto::VerifyKey;
using policy::PolicyTree;

/// Read capability for one object. `key` is either a policy capsule or the bare key (read
/// inheritance); `spk` may be omitted when the writer is the same as the referencing object's.
struct ObjectReference {
    ObjectId id;
    std::variant<PolicyCiphertext, SymKey> key;
    std::optional<VerifyKey> spk;

    bool bare() const { return std::holds_alternative<SymKey>(key); }
    friend bool operator==(const ObjectReference&, const ObjectReference&) = default;
};

struct StatusContent {
    std::string author;
    std::string text;
    std::uint64_t timestamp = 0;
    friend bool operator==(const StatusContent&, const StatusContent&) = default;
};

/// Newest first.
struct WallContent {
    std::vector<ObjectReference> items;
    friend bool operator==(const WallContent&, const WallContent&) = default;
};

struct ProfileContent {
    std::map<std::string, std::string> fields;
    friend bool operator==(const ProfileContent&, const ProfileContent&) = default;
};

struct RootContent {
    ObjectReference profile;
    ObjectReference wall;
    friend bool operator==(const RootContent&, const RootContent&) = default;
};

struct BytesContent {
    Bytes data;
    friend bool operator==(const BytesContent&, const BytesContent&) = default;
};

using Content = std::variant<StatusContent, WallContent, ProfileContent, RootContent, BytesContent>;

/// Signing half of the append policy, sealed under the A-policy.
struct AppendPolicy {
    VerifyKey apspk;
    PolicyCiphertext apssk_capsule;
    friend bool operator==(const AppendPolicy&, const AppendPolicy&) = default;
};

/// A comment reference that verified under the parent's APSPK.
struct AppendEntry {
    ObjectReference ref;
    Signature signature;
    friend bool operator==(const AppendEntry&, const AppendEntry&) = default;
};

struct ContainerObject {
    ObjectId id;
    std::uint64_t version = 1;
    Content content;
    /// Absent for objects nobody may comment on.
    std::optional<AppendPolicy> append_policy;
    Signature body_signature;
    std::vector<AppendEntry> appends;

    friend bool operator==(const ContainerObject&, const ContainerObject&) = default;
};

/// What storage nodes see.
struct SealedObject {
    ObjectId id;
    std::uint64_t version = 1;
    VerifyKey wapk;
    /// WASK seed sealed to the owner.
    Bytes wask_capsule;
    Bytes sealed_body;
    std::vector<Bytes> appends;

    friend bool operator==(const SealedObject&, const SealedObject&) = default;
};

/// Turns a policy capsule into its key, typically through a contact key and its proxies.
class CapsuleOpener {
public:
    virtual ~CapsuleOpener() = default;
    /// Throws Error(policy_unsatisfied), Error(revoked) or Error(auth_failure).
    virtual SymKey open(const PolicyCiphertext& capsule) = 0;
};

/// Opener backed by a single contact key.
class ContactKeyOpener final : public CapsuleOpener {
public:
    ContactKeyOpener(const crypto::PolicyEncryption& pe, const crypto::ContactKey& key,
                     std::vector<crypto::ProxyHandle*> proxies)
        : pe_(pe), key_(key), proxies_(std::move(proxies)) {}

    SymKey open(const PolicyCiphertext& capsule) override { return pe_.decrypt(capsule, key_, proxies_); }

private:
    const crypto::PolicyEncryption& pe_;
    const crypto::ContactKey& key_;
    std::vector<crypto::ProxyHandle*> proxies_;
};

/// The writer's long-term material.
struct OwnerKeys {
    const crypto::MasterKey& master;
    const crypto::PublicParams& params;
    const crypto::SigningKey& writer;
};

struct CreatedObject {
    ContainerObject object;
    SealedObject sealed;
    ObjectReference ref;
    SymKey key;
    crypto::SigningKey wask;
};

/// Fresh id, K, write-auth pair and (when `append_policy` is given) APSPK/APSSK; version 1.
CreatedObject create_object(const crypto::PolicyEncryption& pe, Content content, const PolicyTree& read_policy,
                            const std::optional<PolicyTree>& append_policy, const OwnerKeys& owner);

/// Another reference to an existing object, e.g. under a different read policy.
ObjectReference make_reference(const crypto::PolicyEncryption& pe, const ObjectId& id, const SymKey& key,
                               const std::optional<PolicyTree>& read_policy, const std::optional<VerifyKey>& spk,
                               const crypto::PublicParams& params);

struct OpenedObject {
    ContainerObject object;
    SymKey key;
    std::size_t dropped_appends = 0;
};

/// Recovers K from the reference, opens the body (Error(auth_failure) on tampering), checks the
/// body signature under the reference's SPK or `inherited_spk` (Error(bad_signature)), and keeps
/// only append entries signed under APSPK.
OpenedObject open_object(const SealedObject& sealed, const ObjectReference& ref, CapsuleOpener& opener,
                         const std::optional<VerifyKey>& inherited_spk = std::nullopt);
/// Same, with K already known (key cache).
OpenedObject open_with_key(const SealedObject& sealed, const SymKey& key, const VerifyKey& spk);

/// Unseals APSSK through `opener` and signs `comment`; the entry is sealed under the parent's K.
Bytes build_append_entry(const OpenedObject& parent, const ObjectReference& comment, CapsuleOpener& opener,
                         Rng& rng);

struct UpdatedObject {
    ContainerObject object;
    SealedObject sealed;
};

/// How an update treats the append policy.
struct KeepAppendPolicy {};
struct DropAppendPolicy {};
using AppendPolicyChange = std::variant<KeepAppendPolicy, DropAppendPolicy, PolicyTree>;

/// Version + 1, same id, K and WAPK. APSPK/APSSK are kept unless the A-policy changes, in which
/// case a fresh pair is generated and earlier append entries stop verifying. Append entries
/// already stored stay with the record at the storage layer.
UpdatedObject update_object(const crypto::PolicyEncryption& pe, const OpenedObject& old, const SealedObject& old_sealed,
                            Content content, const OwnerKeys& owner,
                            const AppendPolicyChange& append_change = KeepAppendPolicy{});

/// Owner-side recovery of the write-auth secret. Throws Error(auth_failure) for anyone else.
crypto::SigningKey unseal_wask(const SealedObject& sealed, const crypto::OwnerSecret& owner_secret);

/// Storage form; signs write authentication with `wask`.
dht::StoredRecord to_record(const SealedObject& sealed, const crypto::SigningKey& wask);
/// Throws Error(malformed).
SealedObject from_record(const dht::StoredRecord& record);

/// Signature the storage layer needs to delete the object.
Signature delete_signature(const SealedObject& sealed, const crypto::SigningKey& wask);

void encode(Writer& out, const ObjectReference& ref);
ObjectReference decode_reference(Reader& in);
void encode(Writer& out, const Content& content);
Content decode_content(Reader& in);
void encode(Writer& out, const SealedObject& sealed);
SealedObject decode_sealed(Reader& in);

}  // namespace decent::objects
