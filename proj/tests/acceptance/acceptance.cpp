// Acceptance run: one PASS/FAIL line per criterion. Optional arguments select criteria by number.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "../support/policy_gen.hpp"
#include "decent/agent/agent.hpp"
#include "decent/common/error.hpp"
#include "decent/crypto/symmetric.hpp"
#include "decent/dht/store.hpp"
#include "decent/objects/object.hpp"
#include "decent/sim/experiments.hpp"

using namespace decent;
using crypto::ContactKey;
using crypto::PolicyEncryption;
using crypto::ProxyHandle;
using crypto::ProxyState;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Authority {
    UserId id;
    crypto::MasterKey master;
    policy::NameMap names;
    crypto::PublicParams params;
    ProxyState proxy;

    Authority(const PolicyEncryption& pe, std::string name, const std::vector<std::string>& attrs) : id{std::move(name)} {
        std::tie(master, names) = pe.keygen_master(attrs);
        params = pe.public_params(master);
        proxy.group = master.group;
    }
    policy::AttributeSet attrs(std::initializer_list<const char*> list) const {
        policy::AttributeSet out;
        for (auto n : list) out.insert(names.at(n));
        return out;
    }
    std::vector<policy::AttributeId> universe() const {
        std::vector<policy::AttributeId> out;
        for (const auto& [_, id] : names) out.push_back(id);
        return out;
    }
};

/// Decrypt outcome: true on the right key, false on any refusal or failure.
bool opens(const PolicyEncryption& pe, const crypto::PolicyCiphertext& ct, const ContactKey& key,
           std::span<ProxyHandle* const> chain, const crypto::SymKey& expected) {
    try {
        return pe.decrypt(ct, key, chain) == expected;
    } catch (const Error&) {
        return false;
    }
}

// 1 ---------------------------------------------------------------------------------------------

Outcome policy_correctness() {
    const auto t0 = std::chrono::steady_clock::now();
    DeterministicRng rng(101);
    PolicyEncryption pe(crypto::ristretto255(), rng);
    std::vector<std::string> names;
    for (int i = 0; i < 8; ++i) names.push_back("a" + std::to_string(i));
    Authority owner(pe, "owner", names);
    const auto universe = owner.universe();
    crypto::LocalProxy proxy(owner.proxy);
    ProxyHandle* chain[] = {&proxy};

    std::size_t mismatches = 0, satisfiable = 0, evaluator_mismatches = 0;
    const int pairs = 10'000;
    for (int i = 0; i < pairs; ++i) {
        const auto tree = testing::random_tree(rng, universe);
        const auto held = testing::random_subset(rng, universe);
        const bool oracle = testing::oracle_evaluate(tree, held);
        evaluator_mismatches += policy::evaluate(tree, held) != oracle;
        satisfiable += oracle;
        const auto key = pe.issue_key(owner.master, owner.proxy, owner.id, UserId{"h" + std::to_string(i)}, held);
        const auto k = rng.random<crypto::SymKey>();
        const auto ct = pe.encrypt(tree, k, owner.params);
        mismatches += opens(pe, ct, key, chain, k) != oracle;
    }
    const double secs = seconds_since(t0);
    return {mismatches == 0 && evaluator_mismatches == 0 && secs < 60,
            fmt("%d pairs (%zu satisfiable), %zu decrypt mismatches, %zu evaluator mismatches, %.1f s (limit 60 s)",
                pairs, satisfiable, mismatches, evaluator_mismatches, secs)};
}

// 2 ---------------------------------------------------------------------------------------------

Outcome immediate_revocation() {
    DeterministicRng rng(202);
    dht::LocalDht dht;
    agent::LocalProxyDirectory proxies;
    const auto& group = crypto::ristretto255();
    auto owner = agent::Agent::join(UserId{"owner"}, {}, group, dht, proxies, rng);
    const std::vector<std::string> attr_names{"friend", "family", "coworker", "acquaintance"};
    std::vector<policy::AttributeId> universe;
    for (const auto& n : attr_names) universe.push_back(owner.account().names.at(n));

    std::vector<std::unique_ptr<agent::Agent>> users;
    std::vector<std::set<std::string>> grants(10);
    for (int u = 0; u < 10; ++u) {
        users.push_back(std::make_unique<agent::Agent>(
            agent::Agent::join(UserId{"u" + std::to_string(u)}, {}, group, dht, proxies, rng)));
        for (const auto& a : attr_names)
            if (rng.uniform(2)) grants[u].insert(a);
        if (grants[u].empty()) grants[u].insert(attr_names[rng.uniform(attr_names.size())]);
        users[u]->accept(owner.introduce(users[u]->account().id, grants[u]));
    }
    // Ten objects, all encrypted before any revocation.
    std::vector<policy::PolicyTree> trees;
    std::map<ObjectId, std::size_t> index;
    for (int o = 0; o < 10; ++o) {
        // The agent takes policies as text, so only trees with a text form are drawn.
        std::string text;
        for (;;) {
            auto tree = testing::random_tree(rng, universe, {3, 6, 3});
            text = owner.account().describe(tree);
            try {
                if (owner.account().policy(text) == tree) {
                    trees.push_back(std::move(tree));
                    break;
                }
            } catch (const Error&) {
            }
        }
        const auto ref = owner.post_status("object " + std::to_string(o), text);
        index[ref.id] = trees.size() - 1;
    }

    std::size_t events = 0, checked = 0, mismatches = 0, readable = 0;
    auto check = [&] {
        for (int u = 0; u < 10; ++u) {
            policy::AttributeSet held;
            for (const auto& a : grants[u]) held.insert(owner.account().names.at(a));
            std::vector<bool> seen(10, false);
            try {
                const auto wall = users[u]->view_wall("owner");
                for (const auto& item : wall.statuses) {
                    const auto o = index.at(item.id);
                    seen[o] = item.ok();
                }
            } catch (const Error&) {
                // Wall itself unreadable: nothing on it is reachable.
            }
            for (std::size_t o = 0; o < 10; ++o) {
                ++checked;
                readable += seen[o];
                mismatches += seen[o] != testing::oracle_evaluate(trees[o], held);
            }
        }
    };
    check();
    for (int e = 0; e < 30; ++e) {
        const auto u = rng.uniform(10);
        if (e % 3 == 2) {
            std::set<std::string> fresh;
            for (const auto& a : attr_names)
                if (rng.uniform(2)) fresh.insert(a);
            users[u]->accept(owner.introduce(users[u]->account().id, fresh));
            grants[u] = fresh;
        } else if (!grants[u].empty()) {
            auto it = grants[u].begin();
            std::advance(it, static_cast<long>(rng.uniform(grants[u].size())));
            const auto attr = *it;
            owner.revoke_contact(users[u]->account().id.name, {attr});
            grants[u].erase(attr);
        }
        ++events;
        check();
    }
    return {mismatches == 0, fmt("10 users x 10 objects, %zu grant events, %zu cells checked (%zu readable), %zu mismatches",
                                 events, checked, readable, mismatches)};
}

// 3 ---------------------------------------------------------------------------------------------

Outcome delegation() {
    DeterministicRng rng(303);
    PolicyEncryption pe(crypto::ristretto255(), rng);
    Authority alice(pe, "alice", {"friend", "foaf"});
    ProxyState bob_proxy{pe.group().kind(), {}};
    const UserId bob{"bob"}, carol{"carol"};
    const auto foaf = alice.attrs({"foaf"});
    const auto bob_key = pe.issue_key(alice.master, alice.proxy, alice.id, bob, alice.attrs({"friend", "foaf"}));
    const auto carol_key = pe.delegate(bob_key, bob_proxy, carol, foaf);
    const auto k = rng.random<crypto::SymKey>();
    const auto ct = pe.encrypt(policy::parse_policy("foaf", alice.names), k, alice.params);

    std::string table;
    bool exact = carol_key.chain.size() == 2;
    for (int alice_revokes = 0; alice_revokes < 2; ++alice_revokes)
        for (int bob_revokes = 0; bob_revokes < 2; ++bob_revokes) {
            ProxyState a = alice.proxy, b = bob_proxy;
            if (alice_revokes) crypto::revoke(a, bob, foaf);
            if (bob_revokes) crypto::revoke(b, carol, foaf);
            crypto::LocalProxy ap(a), bp(b);
            ProxyHandle* chain[] = {&bp, &ap};
            const bool ok = opens(pe, ct, carol_key, chain, k);
            exact = exact && ok == (!alice_revokes && !bob_revokes);
            table += fmt("%s%s:%s ", alice_revokes ? "A-revoked" : "A-live", bob_revokes ? "/B-revoked" : "/B-live",
                         ok ? "opens" : "denied");
        }
    return {exact, "Alice->Bob->Carol on foaf; " + table};
}

// 4 ---------------------------------------------------------------------------------------------

Outcome threshold_proxy() {
    DeterministicRng rng(404);
    PolicyEncryption pe(crypto::ristretto255(), rng);
    Authority alice(pe, "alice", {"friend"});
    const auto key = pe.issue_key(alice.master, alice.proxy, alice.id, {"bob"}, alice.attrs({"friend"}));
    const auto tree = policy::parse_policy("friend", alice.names);
    std::size_t pair_ok = 0, single_open = 0;
    const int trials = 100;
    for (int t = 0; t < trials; ++t) {
        const auto shares = crypto::split_proxy(alice.proxy, 3, 2, rng);
        const auto k = rng.random<crypto::SymKey>();
        const auto ct = pe.encrypt(tree, k, alice.params);
        for (std::uint32_t i = 0; i < 3; ++i) {
            for (std::uint32_t j = i + 1; j < 3; ++j) {
                crypto::ThresholdProxy px(pe.group().kind(), {{shares[i].index, crypto::local_share_endpoint(shares[i])},
                                                              {shares[j].index, crypto::local_share_endpoint(shares[j])}});
                ProxyHandle* chain[] = {&px};
                pair_ok += opens(pe, ct, key, chain, k);
            }
            crypto::ThresholdProxy alone(pe.group().kind(), {{shares[i].index, crypto::local_share_endpoint(shares[i])}});
            ProxyHandle* chain[] = {&alone};
            single_open += opens(pe, ct, key, chain, k);
        }
    }
    return {pair_ok == 3 * trials && single_open == 0,
            fmt("n=3 t=2, %d trials: %zu/%d pair decryptions opened, %zu/%d single-share decryptions opened", trials,
                pair_ok, 3 * trials, single_open, 3 * trials)};
}

// 5 ---------------------------------------------------------------------------------------------

Outcome write_authentication() {
    DeterministicRng rng(505);
    PolicyEncryption pe(crypto::ristretto255(), rng);
    Authority owner(pe, "owner", {"friend"});
    const auto writer = crypto::SigningKey::generate(rng);
    const objects::OwnerKeys keys{owner.master, owner.params, writer};
    const auto tree = policy::parse_policy("friend", owner.names);
    const auto attacker = crypto::SigningKey::generate(rng);

    struct Target {
        objects::OpenedObject opened;
        objects::SealedObject sealed;
        crypto::SigningKey wask;
        std::vector<dht::StoredRecord> history;
    };
    std::vector<Target> targets;
    // Five honest replicas hold every object.
    std::vector<dht::RecordStore> replicas(5);
    for (int i = 0; i < 10; ++i) {
        auto c = objects::create_object(pe, objects::BytesContent{Bytes(32, 1)}, tree, std::nullopt, keys);
        auto rec = objects::to_record(c.sealed, c.wask);
        for (auto& r : replicas) r.put_new(rec);
        targets.push_back({objects::OpenedObject{c.object, c.key, 0}, c.sealed, c.wask, {rec}});
    }

    auto sign_as = [](dht::StoredRecord r, const crypto::SigningKey& k) {
        r.auth = k.sign(dht::write_auth_message(r.id, r.version, dht::blob_digest(r.blob)));
        return r;
    };
    std::size_t attempts = 0, accepted_bad = 0, legit = 0, legit_ok = 0;
    std::map<std::string, std::size_t> kinds;
    for (int i = 0; attempts < 1000; ++i) {
        auto& t = targets[static_cast<std::size_t>(i) % targets.size()];
        const auto& current = t.history.back();
        const int kind = i % 7;
        std::string name;
        bool accepted = false;
        for (auto& r : replicas) {
            dht::StoreStatus s{};
            switch (kind) {
                case 0: {  // higher version signed by a foreign key under the stored WAPK
                    auto forged = current;
                    forged.version += 1;
                    forged.blob = Bytes(40, 7);
                    s = r.put_update(sign_as(forged, attacker));
                    name = "wrong-key";
                    break;
                }
                case 1: {  // attacker substitutes its own WAPK
                    auto forged = current;
                    forged.version += 5;
                    forged.wapk = attacker.verify_key();
                    s = r.put_update(sign_as(forged, attacker));
                    name = "forged-wapk";
                    break;
                }
                case 2: {  // replay of an older authentic version
                    s = t.history.size() > 1 ? r.put_update(t.history[t.history.size() - 2])
                                             : r.put_update(sign_as(current, attacker));
                    name = "replayed-version";
                    break;
                }
                case 3: {  // same version, different content, old signature
                    auto forged = current;
                    forged.blob.push_back(0);
                    s = r.put_update(forged);
                    name = "same-version-swap";
                    break;
                }
                case 4: {  // claim the id afresh under the attacker's WAPK
                    auto forged = current;
                    forged.wapk = attacker.verify_key();
                    s = r.put_new(sign_as(forged, attacker));
                    name = "reclaim-id";
                    break;
                }
                case 5: {  // delete signed by a foreign key
                    s = r.remove(current.id, attacker.sign(dht::delete_auth_message(current.id, current.version)));
                    name = "wrong-key-delete";
                    break;
                }
                default: {  // delete authorised for an older version
                    s = r.remove(current.id, t.wask.sign(dht::delete_auth_message(current.id, current.version - 1)));
                    name = "replayed-delete";
                    break;
                }
            }
            accepted = accepted || s == dht::StoreStatus::ok;
        }
        ++attempts;
        ++kinds[name];
        accepted_bad += accepted;
        for (auto& r : replicas)
            if (!r.get(current.id) || *r.get(current.id) != current) accepted_bad += 1;

        if (i % 10 == 9) {
            // Legitimate owner update after every ten attacks.
            auto up = objects::update_object(pe, t.opened, t.sealed, objects::BytesContent{Bytes(32, static_cast<std::uint8_t>(i))}, keys);
            const auto rec = objects::to_record(up.sealed, t.wask);
            ++legit;
            bool all = true;
            for (auto& r : replicas) all = all && r.put_update(rec) == dht::StoreStatus::ok;
            legit_ok += all;
            t.opened.object = up.object;
            t.sealed = up.sealed;
            t.history.push_back(rec);
        }
    }
    std::string mix;
    for (const auto& [k, n] : kinds) mix += fmt(" %s=%zu", k.c_str(), n);
    return {accepted_bad == 0 && legit_ok == legit,
            fmt("%zu attacks on 5 honest replicas, %zu accepted or altered state; %zu/%zu owner updates accepted;",
                attempts, accepted_bad, legit_ok, legit) +
                mix};
}

// 6 ---------------------------------------------------------------------------------------------

Outcome availability() {
    const auto t0 = std::chrono::steady_clock::now();
    sim::SimConfig c;
    c.nodes = 1000;
    c.malicious = 0.25;
    c.dht.replicas = 5;
    c.churn = 0.05;
    c.seed = 606;
    sim::AvailabilityOptions o;
    o.objects = 1000;
    o.rounds = 100;
    o.check_every = 10;
    const auto r = sim::run_availability(c, o);
    const double secs = seconds_since(t0);
    const double target = r.expected() - 0.01;
    return {r.success_rate() >= target && r.stale == 0 && secs < 600,
            fmt("N=1000 f=0.25 R=5, 1000 objects, 100 rounds, %zu retrievals: success %.4f (target >= %.4f), "
                "%zu stale, all-malicious replica sets %.4f, %zu updates, %.0f s (limit 600 s)",
                r.retrievals, r.success_rate(), target, r.stale, r.all_malicious_rate(), r.updates, secs)};
}

// 7 ---------------------------------------------------------------------------------------------

Outcome append_integrity() {
    DeterministicRng rng(707);
    dht::LocalDht dht;
    agent::LocalProxyDirectory proxies;
    const auto& group = crypto::ristretto255();
    auto join = [&](const char* n) { return agent::Agent::join(UserId{n}, {}, group, dht, proxies, rng); };
    auto alice = join("alice"), bob = join("bob"), carol = join("carol"), dave = join("dave");
    // Bob and Dave are friends; Carol is a coworker, so she reads the status but may not comment.
    agent::befriend(alice, {"friend"}, bob, {"friend"});
    agent::befriend(alice, {"friend"}, dave, {});
    agent::befriend(alice, {"coworker"}, carol, {});
    agent::befriend(bob, {"friend"}, dave, {});
    const auto parent = alice.post_status("parent", "friend OR coworker", "friend");
    const auto other = alice.post_status("other", "friend OR coworker", "friend");

    const auto carol_view = carol.fetch(parent, alice.account().writer.verify_key());
    const auto other_view = carol.fetch(other, alice.account().writer.verify_key());
    const auto forger = crypto::SigningKey::generate(rng);
    std::vector<ObjectId> authorized;
    std::size_t forged = 0, refused_by_agent = 0;
    for (int i = 0; i < 50; ++i) {
        authorized.push_back(bob.comment(parent, "comment " + std::to_string(i), "friend").id);
        Bytes entry;
        const auto ref = objects::make_reference(crypto::PolicyEncryption(group, rng), rng.random<ObjectId>(),
                                                 rng.random<crypto::SymKey>(), std::nullopt, std::nullopt,
                                                 carol.account().params);
        Writer pt;
        objects::encode(pt, ref);
        switch (i % 5) {
            case 0: entry.resize(64 + rng.uniform(64)); rng.fill(entry); break;
            case 1: {  // readable parent key, wrong signer
                pt.fixed(forger.sign(as_bytes("x")));
                Writer ad;
                ad.str("decent-append-v1").fixed(parent.id);
                entry = crypto::sym_seal(carol_view.key, pt.bytes(), ad.bytes(), rng);
                break;
            }
            case 2: {  // sealed for a sibling object
                pt.fixed(forger.sign(as_bytes("y")));
                Writer ad;
                ad.str("decent-append-v1").fixed(other.id);
                entry = crypto::sym_seal(other_view.key, pt.bytes(), ad.bytes(), rng);
                break;
            }
            case 3: {  // a genuine entry with one flipped bit
                const auto rec = dht.get_fresh(parent.id).candidates.front();
                entry = rec.appends.back();
                entry[entry.size() / 3] ^= 0x10;
                break;
            }
            default: break;  // empty entry
        }
        dht.append(parent.id, entry);
        ++forged;
        try {
            carol.comment(parent, "sneaky", "coworker");
        } catch (const Error&) {
            ++refused_by_agent;
        }
    }
    const auto wall = dave.view_wall("alice");
    const agent::ItemView* item = nullptr;
    for (const auto& s : wall.statuses)
        if (s.id == parent.id) item = &s;
    std::vector<ObjectId> rendered;
    std::size_t readable = 0;
    if (item)
        for (const auto& c : item->comments) {
            rendered.push_back(c.id);
            readable += c.ok();
        }
    const auto stored = dht.get_fresh(parent.id).candidates.front().appends.size();
    return {item && rendered == authorized && readable == 50,
            fmt("%zu distinct entries returned (50 authorized, %zu forged attempts), reader rendered %zu comments, %zu readable, order %s; "
                "%zu unauthorized agent comments refused before sending",
                stored, forged, rendered.size(), readable, rendered == authorized ? "exact" : "differs",
                refused_by_agent)};
}

// 8 ---------------------------------------------------------------------------------------------

Outcome storage_blindness() {
    sim::SimConfig c;
    c.nodes = 1000;
    c.seed = 808;
    c.malicious = 0.1;
    c.churn = 0.02;
    sim::Simulation sim(c);
    sim.build();
    sim::Workloads w(sim);
    w.wall({5, 10}, sim::WallMode::others, sim::Composition::full, 4);
    w.newsfeed({5}, 3);
    w.post(20);
    // Revocation and re-issue traffic, then churn and maintenance so records migrate.
    auto& a = sim.add_user("blind-a");
    auto& b = sim.add_user("blind-b");
    agent::befriend(*a.agent, {"friend", "family"}, *b.agent, {"friend"});
    sim.run(a, [](agent::Agent& ag) { ag.post_status("before", "family"); });
    sim.run(a, [](agent::Agent& ag) { ag.revoke_contact("blind-b", {"family"}); });
    sim.run(a, [&](agent::Agent& ag) { b.agent->accept(ag.introduce(UserId{"blind-b"}, {"coworker"})); });
    for (int i = 0; i < 3; ++i) sim.maintenance_round();
    const auto r = sim::scan_storage(sim);
    return {r.records > 0 && r.secret_hits == 0 && r.wapk_repeats == 0,
            fmt("%zu records, %.1f MB scanned at honest nodes against %zu key values: %zu key occurrences, "
                "%zu WAPK repeats",
                r.records, static_cast<double>(r.bytes_scanned) / 1e6, r.secrets, r.secret_hits, r.wapk_repeats)};
}

// 9 ---------------------------------------------------------------------------------------------

double mean_at(const std::vector<sim::Aggregate>& aggs, double x) {
    for (const auto& a : aggs)
        if (a.value == x) return a.sim_ms.mean;
    return NAN;
}

Outcome trend_reproduction() {
    sim::SimConfig c;
    c.nodes = 1000;
    c.seed = 909;
    sim::Simulation sim(c);
    sim.build();
    sim::Workloads w(sim);
    const auto full_rows = w.wall({5, 10, 20, 40}, sim::WallMode::others, sim::Composition::full, 20);
    const auto full = sim::aggregate(full_rows);
    const auto feed = sim::aggregate(w.newsfeed({20, 40}, 20));
    const auto own_rows = w.wall({5, 10, 20}, sim::WallMode::own, sim::Composition::statuses, 20);
    const auto own = sim::aggregate(own_rows);
    const auto others = sim::aggregate(w.wall({5, 10, 20}, sim::WallMode::others, sim::Composition::statuses, 20));

    const double wall_ratio = mean_at(full, 20) / mean_at(full, 10);
    const double feed_ratio = mean_at(feed, 40) / mean_at(feed, 20);
    bool own_faster = true;
    for (double x : {5.0, 10.0, 20.0}) own_faster = own_faster && mean_at(own, x) < mean_at(others, x);
    std::uint64_t own_decrypts = 0;
    for (const auto& r : own_rows) own_decrypts += r.policy_decrypts;
    std::vector<double> xs, ys;
    for (const auto& a : full) {
        xs.push_back(a.value);
        ys.push_back(a.sim_ms.mean);
    }
    const auto fit = sim::fit_line(xs, ys);
    const bool pass = wall_ratio >= 1.8 && wall_ratio <= 2.2 && feed_ratio >= 1.8 && feed_ratio <= 2.2 &&
                      own_faster && own_decrypts == 0;
    return {pass, fmt("others-wall x=20/x=10 %.3f (%.1f s vs %.1f s); newsfeed F=40/F=20 %.3f (%.1f s vs %.1f s); "
                      "own < others at x=5,10,20: %s (own %.1f/%.1f/%.1f s, others %.1f/%.1f/%.1f s); "
                      "own-wall decryptions %llu; others-full linear fit R^2 %.4f",
                      wall_ratio, mean_at(full, 20) / 1e3, mean_at(full, 10) / 1e3, feed_ratio, mean_at(feed, 40) / 1e3,
                      mean_at(feed, 20) / 1e3, own_faster ? "yes" : "no", mean_at(own, 5) / 1e3, mean_at(own, 10) / 1e3,
                      mean_at(own, 20) / 1e3, mean_at(others, 5) / 1e3, mean_at(others, 10) / 1e3,
                      mean_at(others, 20) / 1e3, static_cast<unsigned long long>(own_decrypts), fit.r_squared)};
}

// 10 --------------------------------------------------------------------------------------------

Outcome post_cost() {
    sim::SimConfig c;
    c.nodes = 1000;
    c.seed = 1010;
    sim::Simulation sim(c);
    sim.build();
    sim::Workloads w(sim);
    const auto rows = w.post(100);
    std::map<std::string, std::set<std::tuple<std::uint64_t, std::uint64_t, std::uint64_t, std::uint64_t>>> shapes;
    std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> series;
    for (const auto& r : rows) {
        shapes[r.param].insert({r.dht_gets, r.dht_puts, r.appends, r.failures});
        series[r.param].first.push_back(r.value);
        series[r.param].second.push_back(r.sim_ms);
    }
    bool constant = shapes.size() == 2;
    std::string detail;
    for (const auto& [param, set] : shapes) {
        constant = constant && set.size() == 1;
        const auto [gets, puts, appends, failures] = *set.begin();
        const auto fit = sim::fit_line(series[param].first, series[param].second);
        double mean = 0;
        for (double y : series[param].second) mean += y;
        mean /= static_cast<double>(series[param].second.size());
        detail += fmt("%s: %zu distinct op-count tuple(s) (gets %llu, puts %llu, appends %llu, failures %llu), "
                      "mean %.2f s, slope %.2f ms per wall item; ",
                      param.c_str(), set.size(), static_cast<unsigned long long>(gets),
                      static_cast<unsigned long long>(puts), static_cast<unsigned long long>(appends),
                      static_cast<unsigned long long>(failures), mean / 1e3, fit.slope);
    }
    return {constant, "100 posts then 100 comments; " + detail};
}

// 11 --------------------------------------------------------------------------------------------

Outcome kademlia_scaling() {
    sim::SimConfig c;
    c.nodes = 1000;
    c.seed = 1111;
    sim::Simulation sim(c);
    sim.build();
    const auto h = sim::measure_hops(sim, 1000);
    const double bound = std::log2(1000.0) + 2;
    return {h.mean_rounds <= bound,
            fmt("N=1000, 1000 lookups: mean hops %.2f (bound %.2f), max %zu, %zu/1000 returned the true k closest",
                h.mean_rounds, bound, h.max_rounds, h.exact)};
}

// 12 --------------------------------------------------------------------------------------------

Outcome determinism() {
    sim::SimConfig c;
    c.nodes = 1000;
    c.seed = 1212;
    c.malicious = 0.1;
    sim::ExperimentPlan plan;
    plan.experiment = "wall";
    plan.items = {5, 10};
    plan.trials = 3;
    const auto a = sim::run_experiment(c, plan);
    const auto b = sim::run_experiment(c, plan);
    const auto ca = sim::aggregates_csv(sim::aggregate(a.rows));
    const auto cb = sim::aggregates_csv(sim::aggregate(b.rows));
    return {ca == cb && a.trace_digest == b.trace_digest && !a.rows.empty(),
            fmt("two seeded wall runs: aggregate CSV %zu bytes, %s; event traces %s",
                ca.size(), ca == cb ? "byte-identical" : "differ", a.trace_digest == b.trace_digest ? "identical" : "differ")};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"policy correctness", policy_correctness},
        {"immediate revocation", immediate_revocation},
        {"delegation", delegation},
        {"threshold proxy", threshold_proxy},
        {"write authentication", write_authentication},
        {"availability under adversary", availability},
        {"append integrity", append_integrity},
        {"storage-node blindness", storage_blindness},
        {"trend reproduction", trend_reproduction},
        {"post/comment cost", post_cost},
        {"kademlia scaling", kademlia_scaling},
        {"determinism", determinism},
    };
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int n = static_cast<int>(i) + 1;
        if (!only.empty() && !only.contains(n)) continue;
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        failed += !o.pass;
        std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", n, criteria[i].first, o.detail.c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
