#include <doctest.h>

#include <algorithm>
#include <set>

#include "../support/authority.hpp"
#include "decent/common/error.hpp"
#include "decent/dht/store.hpp"
#include "decent/objects/object.hpp"

using namespace decent;
using namespace decent::objects;
using testing::Authority;
using testing::error_of;

namespace {

/// Alice owns objects; Bob and Carol hold keys from her. Bob also writes comment objects under his
/// own authority, for which Alice and Dave hold keys.
struct World {
    DeterministicRng rng{11};
    crypto::PolicyEncryption pe{crypto::ristretto255(), rng};
    Authority alice{pe, "alice", {"friend", "coworker", "family"}};
    Authority bob{pe, "bob", {"close", "acquaintance"}};
    crypto::SigningKey alice_writer = crypto::SigningKey::generate(rng);
    crypto::SigningKey bob_writer = crypto::SigningKey::generate(rng);
    crypto::LocalProxy alice_proxy{alice.proxy};
    crypto::LocalProxy bob_proxy{bob.proxy};

    crypto::ContactKey bob_key = pe.issue_key(alice.master, alice.proxy, alice.id, bob.id, alice.attrs({"friend"}));
    crypto::ContactKey carol_key =
        pe.issue_key(alice.master, alice.proxy, alice.id, {"carol"}, alice.attrs({"coworker"}));
    crypto::ContactKey alice_from_bob =
        pe.issue_key(bob.master, bob.proxy, bob.id, alice.id, bob.attrs({"close"}));
    crypto::ContactKey dave_from_bob = pe.issue_key(bob.master, bob.proxy, bob.id, {"dave"}, bob.attrs({"close"}));
    crypto::ContactKey dave_from_alice =
        pe.issue_key(alice.master, alice.proxy, alice.id, {"dave"}, alice.attrs({"coworker"}));

    ContactKeyOpener as_bob{pe, bob_key, {&alice_proxy}};
    ContactKeyOpener as_carol{pe, carol_key, {&alice_proxy}};

    OwnerKeys alice_owner() const { return {alice.master, alice.params, alice_writer}; }
    OwnerKeys bob_owner() const { return {bob.master, bob.params, bob_writer}; }

    CreatedObject status(const std::string& text, std::string_view read = "friend",
                         std::optional<std::string_view> append = "friend OR coworker") {
        std::optional<PolicyTree> ap;
        if (append) ap = alice.policy(*append);
        return create_object(pe, StatusContent{"alice", text, 1}, alice.policy(read), ap, alice_owner());
    }
};

/// Routes capsules to whichever of the keys covers their attributes.
class MultiOpener final : public CapsuleOpener {
public:
    MultiOpener(const crypto::PolicyEncryption& pe, std::vector<std::pair<const crypto::ContactKey*, crypto::ProxyHandle*>> keys)
        : pe_(pe), keys_(std::move(keys)) {}
    SymKey open(const PolicyCiphertext& capsule) override {
        ++calls;
        for (auto& [key, proxy] : keys_) {
            auto leaves = capsule.policy.leaves();
            auto attrs = key->attributes();
            bool mine = std::any_of(leaves.begin(), leaves.end(), [&](const auto& a) { return attrs.contains(a); });
            if (mine) {
                crypto::ProxyHandle* proxies[] = {proxy};
                return pe_.decrypt(capsule, *key, proxies);
            }
        }
        throw Error(Errc::policy_unsatisfied, "no key for capsule");
    }
    std::size_t calls = 0;

private:
    const crypto::PolicyEncryption& pe_;
    std::vector<std::pair<const crypto::ContactKey*, crypto::ProxyHandle*>> keys_;
};

class CountingOpener final : public CapsuleOpener {
public:
    SymKey open(const PolicyCiphertext&) override {
        ++calls;
        throw Error(Errc::policy_unsatisfied, "none");
    }
    std::size_t calls = 0;
};

}  // namespace

TEST_CASE("create and open round-trip") {
    World w;
    auto created = w.status("hello");
    CHECK(created.object.version == 1);
    CHECK(created.sealed.version == 1);
    CHECK(created.ref.id == created.object.id);
    CHECK(!created.ref.bare());
    CHECK(created.ref.spk == w.alice_writer.verify_key());

    auto opened = open_object(created.sealed, created.ref, w.as_bob);
    CHECK(opened.object == created.object);
    CHECK(opened.key == created.key);
    CHECK(std::get<StatusContent>(opened.object.content).text == "hello");

    CHECK(error_of([&] { open_object(created.sealed, created.ref, w.as_carol); }) == Errc::policy_unsatisfied);

    auto cached = open_with_key(created.sealed, created.key, w.alice_writer.verify_key());
    CHECK(cached.object == opened.object);

    auto other = w.status("other");
    CHECK(error_of([&] { open_object(other.sealed, created.ref, w.as_bob); }) == Errc::invalid_argument);
}

TEST_CASE("empty wall is a valid version 1 object") {
    World w;
    auto wall = create_object(w.pe, WallContent{}, w.alice.policy("friend OR coworker"), w.alice.policy("friend"),
                              w.alice_owner());
    auto opened = open_object(wall.sealed, wall.ref, w.as_carol);
    CHECK(opened.object.version == 1);
    CHECK(std::get<WallContent>(opened.object.content).items.empty());
}

TEST_CASE("every creation has a fresh id, WAPK and key") {
    World w;
    std::set<ObjectId> ids;
    std::set<crypto::VerifyKey> wapks;
    std::set<SymKey> keys;
    auto policy = w.alice.policy("friend");
    for (int i = 0; i < 1000; ++i) {
        auto c = create_object(w.pe, StatusContent{"alice", "same", 1}, policy, std::nullopt, w.alice_owner());
        ids.insert(c.object.id);
        wapks.insert(c.sealed.wapk);
        keys.insert(c.key);
        CHECK(c.sealed.wapk != w.alice_writer.verify_key());
    }
    CHECK(ids.size() == 1000);
    CHECK(wapks.size() == 1000);
    CHECK(keys.size() == 1000);
}

TEST_CASE("tampering and forgery are distinguished") {
    World w;
    auto created = w.status("genuine");

    SUBCASE("flipped ciphertext byte fails authentication") {
        for (std::size_t pos : {std::size_t{0}, std::size_t{30}, created.sealed.sealed_body.size() - 1}) {
            auto bad = created.sealed;
            bad.sealed_body[pos] ^= 0x01;
            CHECK(error_of([&] { open_object(bad, created.ref, w.as_bob); }) == Errc::auth_failure);
        }
    }
    SUBCASE("plaintext version or WAPK swapped fails authentication") {
        auto bad = created.sealed;
        bad.version = 7;
        CHECK(error_of([&] { open_object(bad, created.ref, w.as_bob); }) == Errc::auth_failure);
        bad = created.sealed;
        bad.wapk = crypto::SigningKey::generate(w.rng).verify_key();
        CHECK(error_of([&] { open_object(bad, created.ref, w.as_bob); }) == Errc::auth_failure);
    }
    SUBCASE("content signed by someone else is a signature failure") {
        auto mallory = crypto::SigningKey::generate(w.rng);
        OwnerKeys fake{w.alice.master, w.alice.params, mallory};
        auto forged = create_object(w.pe, StatusContent{"alice", "forged", 1}, w.alice.policy("friend"), std::nullopt,
                                    fake);
        auto ref = forged.ref;
        ref.spk = w.alice_writer.verify_key();
        CHECK(error_of([&] { open_object(forged.sealed, ref, w.as_bob); }) == Errc::bad_signature);
    }
}

TEST_CASE("reference optimizations") {
    World w;
    auto created = w.status("inherit");
    CountingOpener never;

    auto bare = make_reference(w.pe, created.object.id, created.key, std::nullopt, std::nullopt, w.alice.params);
    CHECK(bare.bare());
    CHECK(error_of([&] { open_object(created.sealed, bare, never); }) == Errc::invalid_argument);
    auto opened = open_object(created.sealed, bare, never, w.alice_writer.verify_key());
    CHECK(opened.object == created.object);
    CHECK(never.calls == 0);

    // A second reference under a different read policy (cross-posting).
    auto coworkers = make_reference(w.pe, created.object.id, created.key, w.alice.policy("coworker"),
                                    w.alice_writer.verify_key(), w.alice.params);
    CHECK(open_object(created.sealed, coworkers, w.as_carol).object == created.object);
    CHECK(error_of([&] { open_object(created.sealed, coworkers, w.as_bob); }) == Errc::policy_unsatisfied);
}

TEST_CASE("comments: append entries, layered read policies") {
    World w;
    auto parent = w.status("parent", "friend OR coworker", "friend");
    auto bob_view = open_object(parent.sealed, parent.ref, w.as_bob);

    auto comment = create_object(w.pe, StatusContent{"bob", "nice", 2}, w.bob.policy("close"), std::nullopt,
                                 w.bob_owner());
    auto entry = build_append_entry(bob_view, comment.ref, w.as_bob, w.rng);
    auto sealed = parent.sealed;
    sealed.appends.push_back(entry);

    // Storage nodes see only ciphertext.
    CHECK(std::search(entry.begin(), entry.end(), comment.object.id.bytes.begin(), comment.object.id.bytes.end()) ==
          entry.end());

    // Dave reads Alice's coworker objects and Bob's close objects: sees both.
    crypto::LocalProxy alice_proxy(w.alice.proxy), bob_proxy(w.bob.proxy);
    MultiOpener dave(w.pe, {{&w.dave_from_alice, &alice_proxy}, {&w.dave_from_bob, &bob_proxy}});
    auto dave_parent = open_object(sealed, parent.ref, dave);
    REQUIRE(dave_parent.object.appends.size() == 1);
    CHECK(dave_parent.object.appends[0].ref == comment.ref);
    auto dave_comment = open_object(comment.sealed, dave_parent.object.appends[0].ref, dave);
    CHECK(std::get<StatusContent>(dave_comment.object.content).text == "nice");

    // Carol satisfies the parent policy but not the comment's.
    auto carol_parent = open_object(sealed, parent.ref, w.as_carol);
    REQUIRE(carol_parent.object.appends.size() == 1);
    CHECK(error_of([&] { open_object(comment.sealed, carol_parent.object.appends[0].ref, w.as_carol); }) ==
          Errc::policy_unsatisfied);

    // Someone holding only Bob's key cannot reach the comment through the parent.
    ContactKeyOpener only_bob(w.pe, w.dave_from_bob, {&bob_proxy});
    CHECK(error_of([&] { open_object(sealed, parent.ref, only_bob); }) == Errc::policy_unsatisfied);

    // Carol fails the A-policy and cannot build an entry.
    CHECK(error_of([&] { build_append_entry(carol_parent, comment.ref, w.as_carol, w.rng); }) ==
          Errc::policy_unsatisfied);

    // Objects without an append policy refuse entries.
    auto closed = w.status("closed", "friend", std::nullopt);
    auto closed_view = open_object(closed.sealed, closed.ref, w.as_bob);
    CHECK(error_of([&] { build_append_entry(closed_view, comment.ref, w.as_bob, w.rng); }) ==
          Errc::policy_unsatisfied);
    auto closed_sealed = closed.sealed;
    closed_sealed.appends.push_back(entry);
    auto reopened = open_object(closed_sealed, closed.ref, w.as_bob);
    CHECK(reopened.object.appends.empty());
    CHECK(reopened.dropped_appends == 1);
}

TEST_CASE("append filtering keeps exactly the authorized entries in order") {
    World w;
    auto parent = w.status("parent", "friend", "friend");
    auto view = open_object(parent.sealed, parent.ref, w.as_bob);
    auto sealed = parent.sealed;
    std::vector<ObjectReference> expected;

    // A key for the APSPK-less forgery: a different signing key sealed under the right K.
    auto other_parent = w.status("other", "friend", "friend");
    auto other_view = open_object(other_parent.sealed, other_parent.ref, w.as_bob);

    for (int i = 0; i < 50; ++i) {
        auto c = create_object(w.pe, StatusContent{"bob", std::to_string(i), 0}, w.alice.policy("friend"),
                               std::nullopt, w.alice_owner());
        auto ref = make_reference(w.pe, c.object.id, c.key, std::nullopt, std::nullopt, w.alice.params);
        sealed.appends.push_back(build_append_entry(view, ref, w.as_bob, w.rng));
        expected.push_back(ref);

        switch (i % 5) {
            case 0: {
                auto id = w.rng.random<ObjectId>();
                sealed.appends.emplace_back(id.bytes.begin(), id.bytes.end());
                break;
            }
            case 1: {
                // A reader who knows K but not APSSK: correct sealing, signature by the wrong key.
                Writer pt;
                encode(pt, ref);
                pt.fixed(crypto::SigningKey::generate(w.rng).sign(as_bytes("x")));
                Writer ad;
                ad.str("decent-append-v1").fixed(parent.object.id);
                sealed.appends.push_back(crypto::sym_seal(view.key, pt.bytes(), ad.bytes(), w.rng));
                break;
            }
            case 2: {
                // Entry for this parent sealed under the wrong key.
                auto e = build_append_entry(other_view, ref, w.as_bob, w.rng);
                sealed.appends.push_back(e);
                break;
            }
            case 3: {
                auto e = build_append_entry(view, ref, w.as_bob, w.rng);
                e[e.size() / 2] ^= 0x40;
                sealed.appends.push_back(e);
                break;
            }
            default: sealed.appends.push_back(Bytes{}); break;
        }
    }
    auto opened = open_object(sealed, parent.ref, w.as_bob);
    REQUIRE(opened.object.appends.size() == 50);
    CHECK(opened.dropped_appends == 50);
    for (std::size_t i = 0; i < 50; ++i) CHECK(opened.object.appends[i].ref == expected[i]);
}

TEST_CASE("updates keep identity and write authentication") {
    World w;
    auto created = w.status("v1");
    dht::RecordStore store;
    REQUIRE(store.put_new(to_record(created.sealed, created.wask)) == dht::StoreStatus::ok);

    auto view = open_object(created.sealed, created.ref, w.as_bob);
    auto comment = make_reference(w.pe, w.rng.random<ObjectId>(), w.rng.random<SymKey>(), std::nullopt, std::nullopt,
                                  w.alice.params);
    auto entry = build_append_entry(view, comment, w.as_bob, w.rng);
    REQUIRE(store.append(created.object.id, entry) == dht::StoreStatus::ok);

    auto fetched = from_record(*store.get(created.object.id));
    auto old = open_object(fetched, created.ref, w.as_bob);
    REQUIRE(old.object.appends.size() == 1);

    auto wask = unseal_wask(fetched, w.alice.master.owner_secret);
    CHECK(wask.verify_key() == created.sealed.wapk);
    CHECK(error_of([&] { unseal_wask(fetched, w.bob.master.owner_secret); }) == Errc::auth_failure);

    auto v2 = update_object(w.pe, old, fetched, StatusContent{"alice", "v2", 2}, w.alice_owner());
    CHECK(v2.sealed.version == 2);
    CHECK(v2.sealed.id == created.sealed.id);
    CHECK(v2.sealed.wapk == created.sealed.wapk);
    CHECK(v2.object.append_policy == created.object.append_policy);

    SUBCASE("owner update is accepted and old comments still verify") {
        REQUIRE(store.put_update(to_record(v2.sealed, wask)) == dht::StoreStatus::ok);
        auto latest = open_object(from_record(*store.get(created.object.id)), created.ref, w.as_bob);
        CHECK(latest.object.version == 2);
        CHECK(std::get<StatusContent>(latest.object.content).text == "v2");
        CHECK(latest.object.appends.size() == 1);
    }
    SUBCASE("an update without the WASK is refused") {
        auto attacker = crypto::SigningKey::generate(w.rng);
        CHECK(error_of([&] { to_record(v2.sealed, attacker); }) == Errc::invalid_argument);
        auto rec = to_record(v2.sealed, wask);
        rec.auth = attacker.sign(dht::write_auth_message(rec.id, rec.version, dht::blob_digest(rec.blob)));
        CHECK(store.put_update(rec) == dht::StoreStatus::bad_signature);
    }
    SUBCASE("changing the A-policy rotates the append keys") {
        auto v3 = update_object(w.pe, old, fetched, StatusContent{"alice", "v2", 2}, w.alice_owner(),
                                w.alice.policy("family"));
        CHECK(v3.object.append_policy->apspk != created.object.append_policy->apspk);
        REQUIRE(store.put_update(to_record(v3.sealed, wask)) == dht::StoreStatus::ok);
        auto latest = open_object(from_record(*store.get(created.object.id)), created.ref, w.as_bob);
        CHECK(latest.object.appends.empty());
        CHECK(error_of([&] { build_append_entry(latest, comment, w.as_bob, w.rng); }) == Errc::policy_unsatisfied);
        auto v4 = update_object(w.pe, latest, v3.sealed, StatusContent{"alice", "v4", 4}, w.alice_owner(),
                                DropAppendPolicy{});
        CHECK(!v4.object.append_policy);
    }
    SUBCASE("delete") {
        CHECK(store.remove(created.object.id, delete_signature(fetched, wask)) == dht::StoreStatus::ok);
    }
}

TEST_CASE("encodings round-trip") {
    World w;
    auto created = w.status("enc");
    auto bare = make_reference(w.pe, created.object.id, created.key, std::nullopt, std::nullopt, w.alice.params);
    for (const auto& ref : {created.ref, bare}) {
        Writer out;
        encode(out, ref);
        Reader in(out.bytes());
        CHECK(decode_reference(in) == ref);
        in.expect_done();
    }
    std::vector<Content> contents{StatusContent{"a", "b", 3}, WallContent{{created.ref, bare}},
                                  ProfileContent{{{"name", "Alice"}, {"city", "Paris"}}},
                                  RootContent{created.ref, bare}, BytesContent{{1, 2, 3}}};
    for (const auto& c : contents) {
        Writer out;
        encode(out, c);
        Reader in(out.bytes());
        CHECK(decode_content(in) == c);
    }
    auto sealed = created.sealed;
    sealed.appends = {{1}, {2, 3}};
    Writer out;
    encode(out, sealed);
    Reader in(out.bytes());
    CHECK(decode_sealed(in) == sealed);
    CHECK(from_record(to_record(sealed, created.wask)) == sealed);

    auto rec = to_record(sealed, created.wask);
    rec.blob.push_back(0);
    CHECK(error_of([&] { from_record(rec); }) == Errc::malformed);
    Reader junk(Bytes{9});
    CHECK(error_of([&] { decode_content(junk); }) == Errc::malformed);
}

TEST_CASE("plaintext-visible bytes of one owner's objects share no key material") {
    World w;
    std::vector<Bytes> visible;
    for (int i = 0; i < 20; ++i) {
        auto c = w.status("s" + std::to_string(i));
        visible.push_back(to_record(c.sealed, c.wask).blob);
        Writer head;
        head.fixed(c.sealed.id).fixed(c.sealed.wapk);
        visible.push_back(head.bytes());
    }
    auto contains = [](const Bytes& hay, ByteView needle) {
        return std::search(hay.begin(), hay.end(), needle.begin(), needle.end()) != hay.end();
    };
    std::vector<Bytes> secrets{Bytes(w.alice_writer.verify_key().view().begin(), w.alice_writer.verify_key().view().end()),
                               Bytes(w.alice.master.owner_secret.view().begin(), w.alice.master.owner_secret.view().end())};
    for (const auto& [_, e] : w.alice.master.exponents) secrets.emplace_back(e.view().begin(), e.view().end());
    for (const auto& v : visible)
        for (const auto& s : secrets) CHECK(!contains(v, s));

    // No 16-byte window repeats between the visible bytes of different objects.
    std::set<Bytes> windows;
    for (std::size_t i = 0; i < visible.size(); i += 2) {
        std::set<Bytes> mine;
        for (std::size_t j : {i, i + 1})
            for (std::size_t p = 0; p + 16 <= visible[j].size(); ++p)
                mine.emplace(visible[j].begin() + p, visible[j].begin() + p + 16);
        for (const auto& m : mine) CHECK(!windows.contains(m));
        windows.insert(mine.begin(), mine.end());
    }
}
