#include "decent/agent/agent.hpp"

#include <algorithm>

namespace decent::agent {

using objects::CreatedObject;
using objects::OpenedObject;
using objects::RootContent;
using objects::WallContent;

crypto::ProxyHandle& LocalProxyDirectory::handle(const UserId& owner) {
    auto it = handles_.find(owner);
    if (it == handles_.end()) throw Error(Errc::unavailable, "no proxy for " + owner.name);
    return it->second;
}

crypto::ProxyState& LocalProxyDirectory::state(const UserId& owner) { return ensure(owner, crypto::GroupKind::ristretto255); }

crypto::ProxyState& LocalProxyDirectory::ensure(const UserId& owner, crypto::GroupKind group) {
    auto [it, fresh] = states_.try_emplace(owner);
    if (fresh) {
        it->second.group = group;
        handles_.emplace(owner, crypto::LocalProxy(it->second));
    }
    return it->second;
}

OpCounters OpCounters::operator-(const OpCounters& o) const {
    return {dht_gets - o.dht_gets,         dht_puts - o.dht_puts,       appends - o.appends,
            policy_decrypts - o.policy_decrypts, policy_encrypts - o.policy_encrypts, proxy_rounds - o.proxy_rounds,
            object_opens - o.object_opens, object_seals - o.object_seals, failures - o.failures};
}

std::string UserAccount::describe(const policy::PolicyTree& tree) const { return policy::to_text(tree, names); }

// Picks the key whose attributes the capsule's policy uses and runs it through that key's proxies.
class Agent::Opener final : public objects::CapsuleOpener {
public:
    explicit Opener(Agent& agent) : agent_(agent) {}

    crypto::SymKey open(const objects::PolicyCiphertext& capsule) override {
        const auto leaves = capsule.policy.leaves();
        auto uses = [&](const crypto::ContactKey& key) {
            return std::any_of(leaves.begin(), leaves.end(), [&](const auto& a) { return key.blinded.contains(a); });
        };
        const crypto::ContactKey* key = nullptr;
        if (uses(agent_.account_.self_key)) {
            key = &agent_.account_.self_key;
        } else {
            for (const auto& [_, c] : agent_.account_.contacts)
                if (c.key && uses(*c.key)) {
                    key = &*c.key;
                    break;
                }
        }
        if (!key) throw Error(Errc::policy_unsatisfied, "no key covers this policy");
        std::vector<crypto::ProxyHandle*> proxies;
        for (const auto& hop : key->chain) proxies.push_back(&agent_.proxies_->handle(hop.proxy_owner));
        ++agent_.counters_.policy_decrypts;
        crypto::DecryptStats stats;
        try {
            auto k = agent_.pe_.decrypt(capsule, *key, proxies, &stats);
            agent_.counters_.proxy_rounds += stats.proxy_rounds;
            return k;
        } catch (...) {
            agent_.counters_.proxy_rounds += stats.proxy_rounds;
            throw;
        }
    }

private:
    Agent& agent_;
};

Agent::Agent(UserAccount account, const crypto::Group& group, dht::DhtClient& dht, ProxyDirectory& proxies, Rng& rng)
    : account_(std::move(account)), group_(&group), dht_(&dht), proxies_(&proxies), rng_(&rng), pe_(group, rng) {}

Agent Agent::join(const UserId& id, const JoinOptions& options, const crypto::Group& group, dht::DhtClient& dht,
                  ProxyDirectory& proxies, Rng& rng) {
    if (options.attributes.empty()) throw Error(Errc::invalid_argument, "an account needs at least one attribute");
    crypto::PolicyEncryption pe(group, rng);
    UserAccount acct;
    acct.id = id;
    std::tie(acct.master, acct.names) = pe.keygen_master(options.attributes);
    acct.params = pe.public_params(acct.master);
    acct.writer = crypto::SigningKey::generate(rng);
    auto& proxy = proxies.state(id);
    proxy.group = acct.master.group;
    policy::AttributeSet all;
    for (const auto& [_, a] : acct.names) all.insert(a);
    acct.self_key = pe.issue_key(acct.master, proxy, id, id, all);
    proxies.updated(id);

    std::string read_text = options.profile_policy;
    if (read_text.empty()) {
        for (const auto& name : options.attributes) read_text += (read_text.empty() ? "" : " OR ") + name;
    }
    const auto read = acct.policy(read_text);
    const auto append = options.wall_append_policy.empty() ? read : acct.policy(options.wall_append_policy);

    Agent agent(std::move(acct), group, dht, proxies, rng);
    auto& a = agent.account_;
    objects::OwnerKeys owner{a.master, a.params, a.writer};
    auto profile = objects::create_object(agent.pe_, objects::ProfileContent{options.profile}, read, std::nullopt, owner);
    auto wall = objects::create_object(agent.pe_, WallContent{}, read, append, owner);
    auto root = objects::create_object(agent.pe_, RootContent{profile.ref, wall.ref}, read, std::nullopt, owner);
    agent.counters_.policy_encrypts += 5;
    for (const auto* c : {&profile, &wall, &root}) agent.store_new(*c);
    a.root_ref = root.ref;
    a.profile_id = profile.object.id;
    a.wall_id = wall.object.id;
    a.wall_sealed = wall.sealed;
    a.wall = OpenedObject{wall.object, wall.key, 0};
    return agent;
}

void Agent::store_new(const CreatedObject& created) {
    ++counters_.object_seals;
    ++counters_.dht_puts;
    auto outcome = dht_->put_new(objects::to_record(created.sealed, created.wask));
    if (!outcome.ok()) {
        ++counters_.failures;
        throw Error(Errc::unavailable, "no replica accepted the new object");
    }
    account_.key_cache[created.object.id] = created.key;
}

Introduction Agent::introduce(const UserId& peer, const std::set<std::string>& attrs) {
    auto& entry = account_.contacts[peer.name];
    entry.peer = peer;
    auto& proxy = proxies_->state(account_.id);
    policy::AttributeSet dropped;
    for (const auto& name : entry.issued)
        if (!attrs.contains(name)) dropped.insert(account_.names.at(name));
    crypto::revoke(proxy, peer, dropped);
    policy::AttributeSet ids;
    for (const auto& name : attrs) {
        auto it = account_.names.find(name);
        if (it == account_.names.end()) throw Error(Errc::unknown_attribute, "unknown attribute '" + name + "'");
        ids.insert(it->second);
    }
    auto key = pe_.issue_key(account_.master, proxy, account_.id, peer, ids);
    proxies_->updated(account_.id);
    entry.issued = attrs;
    return {account_.id, peer, account_.root_ref, std::move(key)};
}

void Agent::accept(const Introduction& intro) {
    if (intro.to != account_.id) throw Error(Errc::invalid_argument, "introduction is for " + intro.to.name);
    auto& entry = account_.contacts[intro.from.name];
    entry.peer = intro.from;
    entry.root = intro.root;
    entry.key = intro.key;
}

void befriend(Agent& a, const std::set<std::string>& a_grants, Agent& b, const std::set<std::string>& b_grants) {
    b.accept(a.introduce(b.account().id, a_grants));
    a.accept(b.introduce(a.account().id, b_grants));
}

const ContactEntry& Agent::contact(const std::string& peer) const {
    auto it = account_.contacts.find(peer);
    if (it == account_.contacts.end()) throw Error(Errc::not_found, "no contact named " + peer);
    return it->second;
}

ObjectReference Agent::root_of(const std::string& peer) const {
    const auto& c = contact(peer);
    if (!c.root) throw Error(Errc::not_found, peer + " has not shared a root reference");
    return *c.root;
}

OpenedObject Agent::fetch(const ObjectReference& ref, const std::optional<crypto::VerifyKey>& inherited_spk) {
    ++counters_.dht_gets;
    auto found = dht_->get_fresh(ref.id);
    if (found.candidates.empty())
        throw Error(found.responses ? Errc::not_found : Errc::unavailable, "object " + ref.id.hex() + " not retrievable");
    const auto& spk = ref.spk ? ref.spk : inherited_spk;
    if (!spk) throw Error(Errc::invalid_argument, "no verification key for object");
    crypto::SymKey key;
    if (auto it = account_.key_cache.find(ref.id); it != account_.key_cache.end()) {
        key = it->second;
    } else if (ref.bare()) {
        key = std::get<crypto::SymKey>(ref.key);
    } else {
        Opener opener(*this);
        key = opener.open(std::get<objects::PolicyCiphertext>(ref.key));
    }
    std::optional<Error> last;
    for (const auto& candidate : found.candidates) {
        try {
            ++counters_.object_opens;
            return objects::open_with_key(objects::from_record(candidate), key, *spk);
        } catch (const Error& e) {
            last = e;
        }
    }
    throw *last;
}

std::pair<OpenedObject, OpenedObject> Agent::open_root_and_wall(const ObjectReference& root_ref) {
    auto root = fetch(root_ref, std::nullopt);
    const auto* rc = std::get_if<RootContent>(&root.object.content);
    if (!rc) throw Error(Errc::malformed, "root reference does not lead to a root object");
    auto wall = fetch(rc->wall, root_ref.spk);
    if (!std::holds_alternative<WallContent>(wall.object.content))
        throw Error(Errc::malformed, "wall reference does not lead to a wall");
    return {std::move(root), std::move(wall)};
}

ItemView Agent::open_item(const ObjectReference& ref, const std::optional<crypto::VerifyKey>& inherited_spk,
                          bool with_comments) {
    ItemView view;
    view.id = ref.id;
    view.ref = ref;
    if (!view.ref.spk) view.ref.spk = inherited_spk;
    try {
        auto opened = fetch(ref, inherited_spk);
        if (const auto* s = std::get_if<StatusContent>(&opened.object.content)) view.status = *s;
        else throw Error(Errc::malformed, "item is not a status");
        if (with_comments)
            for (const auto& entry : opened.object.appends) view.comments.push_back(open_item(entry.ref, std::nullopt, false));
    } catch (const Error& e) {
        ++counters_.failures;
        view.error = e.code();
        view.reason = e.what();
    }
    return view;
}

ObjectReference Agent::post_status(const std::string& text, std::string_view read_policy,
                                   std::string_view append_policy) {
    const auto read = account_.policy(read_policy);
    const auto append = append_policy.empty() ? read : account_.policy(append_policy);
    objects::OwnerKeys owner{account_.master, account_.params, account_.writer};
    auto created = objects::create_object(pe_, StatusContent{account_.id.name, text, tick()}, read, append, owner);
    counters_.policy_encrypts += 2;
    store_new(created);

    prepend_to_wall(created.ref);
    return created.ref;
}

void Agent::prepend_to_wall(const ObjectReference& ref) {
    objects::OwnerKeys owner{account_.master, account_.params, account_.writer};
    WallContent items = std::get<WallContent>(account_.wall.object.content);
    items.items.insert(items.items.begin(), ref);
    auto updated = objects::update_object(pe_, account_.wall, account_.wall_sealed, std::move(items), owner);
    auto wask = objects::unseal_wask(account_.wall_sealed, account_.master.owner_secret);
    ++counters_.object_seals;
    ++counters_.dht_puts;
    auto outcome = dht_->put_update(objects::to_record(updated.sealed, wask));
    if (!outcome.ok()) {
        ++counters_.failures;
        throw Error(Errc::unavailable, std::string("wall update refused: ") + dht::to_string(outcome.refusal));
    }
    account_.wall_sealed = std::move(updated.sealed);
    account_.wall = OpenedObject{std::move(updated.object), account_.wall.key, 0};
}

ObjectReference Agent::share(const ObjectId& id, std::string_view read_policy) {
    auto it = account_.key_cache.find(id);
    if (it == account_.key_cache.end()) throw Error(Errc::not_found, "only objects we created can be shared");
    auto ref = objects::make_reference(pe_, id, it->second, account_.policy(read_policy), account_.writer.verify_key(),
                                       account_.params);
    ++counters_.policy_encrypts;
    prepend_to_wall(ref);
    return ref;
}

ObjectReference Agent::comment(const ObjectReference& parent_ref, const std::string& text,
                               std::string_view read_policy) {
    auto parent = fetch(parent_ref, std::nullopt);
    objects::OwnerKeys owner{account_.master, account_.params, account_.writer};
    auto created = objects::create_object(pe_, StatusContent{account_.id.name, text, tick()},
                                          account_.policy(read_policy), std::nullopt, owner);
    ++counters_.policy_encrypts;
    Opener opener(*this);
    auto entry = objects::build_append_entry(parent, created.ref, opener, *rng_);
    store_new(created);
    ++counters_.appends;
    if (!dht_->append(parent_ref.id, entry).ok()) {
        ++counters_.failures;
        throw Error(Errc::unavailable, "no replica accepted the comment");
    }
    return created.ref;
}

ObjectReference Agent::post_to_wall(const std::string& peer, const std::string& text, std::string_view read_policy) {
    auto [root, wall] = open_root_and_wall(root_of(peer));
    objects::OwnerKeys owner{account_.master, account_.params, account_.writer};
    auto created = objects::create_object(pe_, StatusContent{account_.id.name, text, tick()},
                                          account_.policy(read_policy), std::nullopt, owner);
    ++counters_.policy_encrypts;
    Opener opener(*this);
    auto entry = objects::build_append_entry(wall, created.ref, opener, *rng_);
    store_new(created);
    ++counters_.appends;
    if (!dht_->append(wall.object.id, entry).ok()) {
        ++counters_.failures;
        throw Error(Errc::unavailable, "no replica accepted the wall post");
    }
    return created.ref;
}

WallView Agent::view_wall(const std::string& peer) {
    WallView view;
    view.owner = peer.empty() ? account_.id : contact(peer).peer;
    const auto root_ref = peer.empty() ? account_.root_ref : root_of(peer);
    auto [root, wall] = open_root_and_wall(root_ref);
    for (const auto& ref : std::get<WallContent>(wall.object.content).items)
        view.statuses.push_back(open_item(ref, root_ref.spk, true));
    const auto& posts = wall.object.appends;
    for (auto it = posts.rbegin(); it != posts.rend(); ++it) view.posts.push_back(open_item(it->ref, std::nullopt, false));
    return view;
}

std::vector<FeedItem> Agent::view_newsfeed() {
    std::vector<FeedItem> feed;
    for (const auto& [name, c] : account_.contacts) {
        if (!c.root) continue;
        FeedItem item{c.peer, std::nullopt, {}};
        try {
            auto [root, wall] = open_root_and_wall(*c.root);
            const auto& items = std::get<WallContent>(wall.object.content).items;
            if (items.empty()) {
                item.reason = "no status yet";
            } else {
                item.latest = open_item(items.front(), c.root->spk, false);
                if (!item.latest->ok()) item.reason = item.latest->reason;
            }
        } catch (const Error& e) {
            ++counters_.failures;
            item.reason = e.what();
        }
        feed.push_back(std::move(item));
    }
    return feed;
}

void Agent::revoke_contact(const std::string& peer, const std::set<std::string>& attrs) {
    auto& entry = account_.contacts.at(contact(peer).peer.name);
    policy::AttributeSet ids;
    for (const auto& name : attrs) {
        auto it = account_.names.find(name);
        if (it == account_.names.end()) throw Error(Errc::unknown_attribute, "unknown attribute '" + name + "'");
        ids.insert(it->second);
        entry.issued.erase(name);
    }
    crypto::revoke(proxies_->state(account_.id), entry.peer, ids);
    proxies_->updated(account_.id);
}

}  // namespace decent::agent
