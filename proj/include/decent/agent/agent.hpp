#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "decent/common/error.hpp"
#include "decent/crypto/policy_encryption.hpp"
#include "decent/dht/client.hpp"
#include "decent/objects/object.hpp"

namespace decent::agent {

using objects::ObjectReference;
using objects::StatusContent;

/// Where a user's revocation proxy lives. The owner mutates its state through `state` and then
/// calls `updated` so replicated forms (threshold shares) can be refreshed.
class ProxyDirectory {
public:
    virtual ~ProxyDirectory() = default;
    /// Throws Error(unavailable) for unknown owners.
    virtual crypto::ProxyHandle& handle(const UserId& owner) = 0;
    virtual crypto::ProxyState& state(const UserId& owner) = 0;
    virtual void updated(const UserId&) {}
};

/// Every proxy held in process.
class LocalProxyDirectory final : public ProxyDirectory {
public:
    crypto::ProxyHandle& handle(const UserId& owner) override;
    crypto::ProxyState& state(const UserId& owner) override;
    /// Creates an empty proxy for `owner` if none exists.
    crypto::ProxyState& ensure(const UserId& owner, crypto::GroupKind group);
    const std::map<UserId, crypto::ProxyState>& states() const { return states_; }

private:
    std::map<UserId, crypto::ProxyState> states_;
    std::map<UserId, crypto::LocalProxy> handles_;
};

struct OpCounters {
    std::uint64_t dht_gets = 0;
    std::uint64_t dht_puts = 0;  // put_new + put_update + delete
    std::uint64_t appends = 0;
    std::uint64_t policy_decrypts = 0;
    std::uint64_t policy_encrypts = 0;
    std::uint64_t proxy_rounds = 0;
    std::uint64_t object_opens = 0;
    std::uint64_t object_seals = 0;
    std::uint64_t failures = 0;

    OpCounters operator-(const OpCounters& o) const;
    friend bool operator==(const OpCounters&, const OpCounters&) = default;
};

struct ContactEntry {
    UserId peer;
    /// Their root reference, as they shared it.
    std::optional<ObjectReference> root;
    /// Key they issued to us.
    std::optional<crypto::ContactKey> key;
    /// Attribute names we issued to them.
    std::set<std::string> issued;
};

struct UserAccount {
    UserId id;
    crypto::MasterKey master;
    policy::NameMap names;
    crypto::PublicParams params;
    crypto::SigningKey writer;
    /// Key to our own attributes, so we can read objects we did not cache.
    crypto::ContactKey self_key;
    /// Reference handed to contacts.
    ObjectReference root_ref;
    ObjectId profile_id;
    ObjectId wall_id;
    /// Latest version of our wall as we wrote it.
    objects::SealedObject wall_sealed;
    objects::OpenedObject wall;
    std::map<std::string, ContactEntry> contacts;
    /// Symmetric keys of objects this user created.
    std::map<ObjectId, crypto::SymKey> key_cache;
    std::uint64_t clock = 0;

    policy::PolicyTree policy(std::string_view text) const { return policy::parse_policy(text, names); }
    std::string describe(const policy::PolicyTree& tree) const;
};

struct JoinOptions {
    std::vector<std::string> attributes{"friend", "family", "coworker", "acquaintance"};
    /// Read policy of root, profile and wall; defaults to any attribute.
    std::string profile_policy;
    /// Who may post on the wall; defaults to the read policy.
    std::string wall_append_policy;
    std::map<std::string, std::string> profile;
};

/// What travels out of band when one user adds another.
struct Introduction {
    UserId from;
    UserId to;
    ObjectReference root;
    crypto::ContactKey key;
};

struct ItemView {
    ObjectId id;
    /// Reference the item was reached through, with any inherited SPK filled in.
    ObjectReference ref;
    std::optional<StatusContent> status;
    std::optional<Errc> error;
    std::string reason;
    std::vector<ItemView> comments;

    bool ok() const { return !error.has_value(); }
};

/// Newest first.
struct WallView {
    UserId owner;
    std::vector<ItemView> statuses;
    std::vector<ItemView> posts;
};

struct FeedItem {
    UserId contact;
    std::optional<ItemView> latest;
    std::string reason;
};

/// One user's agent: account state plus the services it talks to.
class Agent {
public:
    Agent(UserAccount account, const crypto::Group& group, dht::DhtClient& dht, ProxyDirectory& proxies, Rng& rng);

    /// Creates profile, wall and root objects (three put_new operations).
    static Agent join(const UserId& id, const JoinOptions& options, const crypto::Group& group, dht::DhtClient& dht,
                      ProxyDirectory& proxies, Rng& rng);

    UserAccount& account() { return account_; }
    const UserAccount& account() const { return account_; }
    const OpCounters& counters() const { return counters_; }
    void set_dht(dht::DhtClient& dht) { dht_ = &dht; }

    /// Issues a key for `attrs` to `peer` (re-issuing replaces any earlier key) and packages it with
    /// our root reference.
    Introduction introduce(const UserId& peer, const std::set<std::string>& attrs);
    /// Records a peer's introduction in the contact book.
    void accept(const Introduction& intro);

    /// New status object plus a wall overwrite: one put_new and one put_update.
    ObjectReference post_status(const std::string& text, std::string_view read_policy,
                                std::string_view append_policy = {});
    /// Creates a comment object under our `read_policy` and appends it to `parent`.
    ObjectReference comment(const ObjectReference& parent, const std::string& text, std::string_view read_policy);
    /// Adds a reference to one of our own objects to our wall under a different read policy.
    ObjectReference share(const ObjectId& id, std::string_view read_policy);
    /// Posts on a contact's wall as an append entry.
    ObjectReference post_to_wall(const std::string& peer, const std::string& text, std::string_view read_policy);

    /// `peer` empty means our own wall. Throws when the root or wall cannot be opened; item failures
    /// are reported per item.
    WallView view_wall(const std::string& peer = {});
    std::vector<FeedItem> view_newsfeed();

    void revoke_contact(const std::string& peer, const std::set<std::string>& attrs);

    /// Fetches and opens one object, preferring the freshest authentic candidate.
    objects::OpenedObject fetch(const ObjectReference& ref, const std::optional<crypto::VerifyKey>& inherited_spk);

private:
    class Opener;

    const ContactEntry& contact(const std::string& peer) const;
    ObjectReference root_of(const std::string& peer) const;
    std::pair<objects::OpenedObject, objects::OpenedObject> open_root_and_wall(const ObjectReference& root);
    ItemView open_item(const ObjectReference& ref, const std::optional<crypto::VerifyKey>& inherited_spk,
                       bool with_comments);
    void store_new(const objects::CreatedObject& created);
    void prepend_to_wall(const ObjectReference& ref);
    std::uint64_t tick() { return ++account_.clock; }

    UserAccount account_;
    const crypto::Group* group_;
    dht::DhtClient* dht_;
    ProxyDirectory* proxies_;
    Rng* rng_;
    crypto::PolicyEncryption pe_;
    OpCounters counters_;
};

/// Both directions of an asymmetric relationship, exchanged out of band.
void befriend(Agent& a, const std::set<std::string>& a_grants, Agent& b, const std::set<std::string>& b_grants);

}  // namespace decent::agent
