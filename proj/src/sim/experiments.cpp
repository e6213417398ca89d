#include "decent/sim/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <algorithm>
#include <map>
#include <set>
#include <string_view>
#include <unordered_set>

#include <sodium.h>

#include "decent/common/error.hpp"
#include "decent/objects/object.hpp"

namespace decent::sim {

using agent::Agent;

std::string to_string(WallMode m) { return m == WallMode::own ? "own" : "others"; }

std::string to_string(Composition c) {
    switch (c) {
        case Composition::statuses: return "statuses";
        case Composition::posts: return "posts";
        case Composition::full: return "full";
    }
    return "?";
}

std::string Workloads::fresh(const std::string& prefix) { return prefix + std::to_string(next_++); }

std::vector<TrialRow> Workloads::wall(std::vector<std::size_t> items, WallMode mode, Composition composition,
                                      std::size_t trials) {
    std::sort(items.begin(), items.end());
    std::vector<TrialRow> rows;
    const std::string param = to_string(mode) + "-" + to_string(composition);
    for (std::size_t t = 0; t < trials; ++t) {
        auto& owner = sim_.add_user(fresh("owner"));
        auto& friend_ = sim_.add_user(fresh("friend"));
        agent::befriend(*owner.agent, {"friend"}, *friend_.agent, {"friend"});
        Simulation::User* viewer = &owner;
        if (mode == WallMode::others) {
            viewer = &sim_.add_user(fresh("viewer"));
            agent::befriend(*owner.agent, {"friend"}, *viewer->agent, {});
            agent::befriend(*friend_.agent, {"friend"}, *viewer->agent, {});
        }
        const std::string target = mode == WallMode::own ? std::string{} : owner.name;
        std::size_t have = 0;
        for (auto x : items) {
            for (; have < x; ++have) {
                agent::ObjectReference status;
                sim_.run(owner, [&](Agent& a) { status = a.post_status("status " + std::to_string(have), "friend", "friend"); });
                if (composition != Composition::statuses)
                    sim_.run(friend_, [&](Agent& a) { a.post_to_wall(owner.name, "post " + std::to_string(have), "friend"); });
                if (composition == Composition::full)
                    sim_.run(friend_, [&](Agent& a) { a.comment(status, "comment", "friend"); });
            }
            auto m = sim_.run(*viewer, [&](Agent& a) { a.view_wall(target); });
            rows.push_back(make_row("wall", t, param, static_cast<double>(x), m));
        }
    }
    return rows;
}

std::vector<TrialRow> Workloads::newsfeed(std::vector<std::size_t> friends, std::size_t trials) {
    std::sort(friends.begin(), friends.end());
    std::vector<TrialRow> rows;
    for (std::size_t t = 0; t < trials; ++t) {
        auto& reader = sim_.add_user(fresh("reader"));
        std::size_t have = 0;
        for (auto count : friends) {
            for (; have < count; ++have) {
                auto& f = sim_.add_user(fresh("peer"));
                agent::befriend(*f.agent, {"friend"}, *reader.agent, {});
                sim_.run(f, [&](Agent& a) { a.post_status("hello from " + f.name, "friend"); });
            }
            auto m = sim_.run(reader, [](Agent& a) { a.view_newsfeed(); });
            rows.push_back(make_row("newsfeed", t, "friends", static_cast<double>(count), m));
        }
    }
    return rows;
}

std::vector<TrialRow> Workloads::post(std::size_t posts) {
    std::vector<TrialRow> rows;
    auto& owner = sim_.add_user(fresh("poster"));
    auto& peer = sim_.add_user(fresh("commenter"));
    agent::befriend(*owner.agent, {"friend"}, *peer.agent, {"friend"});
    std::vector<agent::ObjectReference> statuses;
    for (std::size_t i = 0; i < posts; ++i) {
        auto m = sim_.run(owner, [&](Agent& a) {
            statuses.push_back(a.post_status("status " + std::to_string(i), "friend", "friend"));
        });
        rows.push_back(make_row("post", i, "status", static_cast<double>(i), m));
    }
    for (std::size_t i = 0; i < statuses.size(); ++i) {
        auto m = sim_.run(peer, [&](Agent& a) { a.comment(statuses[i], "comment " + std::to_string(i), "friend"); });
        rows.push_back(make_row("post", i, "comment", static_cast<double>(i), m));
    }
    return rows;
}

HopStats measure_hops(Simulation& sim, std::size_t lookups) {
    HopStats s;
    std::size_t total = 0;
    const auto k = sim.config().dht.k;
    for (std::size_t i = 0; i < lookups; ++i) {
        auto& origin = sim.random_honest_node();
        const auto target = sim.rng().random<Id160>();
        const auto r = dht::iterative_lookup(origin, sim.network(), target);
        const auto truth = sim.network().true_closest(target, k);
        bool exact = r.closest.size() == truth.size();
        for (std::size_t j = 0; exact && j < truth.size(); ++j) exact = r.closest[j].id == truth[j].id;
        s.exact += exact;
        total += r.rounds;
        s.max_rounds = std::max(s.max_rounds, r.rounds);
    }
    s.lookups = lookups;
    s.mean_rounds = lookups ? static_cast<double>(total) / static_cast<double>(lookups) : 0;
    return s;
}

namespace {

/// Fixed-width secret values looked up at every offset of a scanned buffer.
class SecretSet {
public:
    static constexpr std::size_t width = 32;

    /// Values of another width (small test groups) are skipped.
    template <typename T>
    void add(const T& fixed) {
        if constexpr (T::size_bytes == width) set_.emplace(reinterpret_cast<const char*>(fixed.bytes.data()), width);
    }
    std::size_t size() const { return set_.size(); }

    std::size_t hits(ByteView data) const {
        std::size_t n = 0;
        if (data.size() < width) return 0;
        for (std::size_t i = 0; i + width <= data.size(); ++i)
            n += set_.contains(std::string(reinterpret_cast<const char*>(data.data() + i), width));
        return n;
    }

private:
    std::unordered_set<std::string> set_;
};

}  // namespace

BlindnessReport scan_storage(Simulation& sim) {
    SecretSet secrets;
    for (auto* u : sim.users()) {
        const auto& acct = u->agent->account();
        secrets.add(acct.master.owner_secret);
        for (const auto& [attr, e] : acct.master.exponents) secrets.add(e);
        secrets.add(acct.writer.seed());
        secrets.add(acct.writer.verify_key());
        for (const auto& [attr, e] : acct.params.attribute_keys) secrets.add(e);
        for (const auto& [attr, e] : acct.self_key.blinded) secrets.add(e);
        for (const auto& [name, c] : acct.contacts)
            if (c.key)
                for (const auto& [attr, e] : c.key->blinded) secrets.add(e);
        for (const auto& [id, k] : acct.key_cache) secrets.add(k);
    }
    BlindnessReport r;
    r.secrets = secrets.size();
    std::map<crypto::VerifyKey, std::set<ObjectId>> wapk_owners;
    for (auto* node : sim.network().nodes()) {
        if (!node->honest()) continue;
        for (const auto& [id, rec] : node->store().records()) {
            ++r.records;
            wapk_owners[rec.wapk].insert(id);
            r.secret_hits += secrets.hits(rec.blob);
            r.bytes_scanned += rec.blob.size();
            for (const auto& a : rec.appends) {
                r.secret_hits += secrets.hits(a);
                r.bytes_scanned += a.size();
            }
        }
    }
    for (const auto& [wapk, ids] : wapk_owners) r.wapk_repeats += ids.size() - 1;
    return r;
}

double AvailabilityResult::expected() const { return 1.0 - std::pow(malicious, static_cast<double>(replicas)); }

namespace {

struct TrackedObject {
    objects::OpenedObject opened;
    objects::SealedObject sealed;
    crypto::SigningKey wask;
    std::uint64_t latest = 0;
};

}  // namespace

AvailabilityResult run_availability(const SimConfig& config, const AvailabilityOptions& options,
                                    std::vector<TrialRow>* rows) {
    Simulation sim(config);
    sim.build();
    AvailabilityResult res;
    res.malicious = config.malicious;
    res.replicas = config.dht.replicas;

    auto owner_rng = sim.rng().fork(0x0b1);
    crypto::PolicyEncryption pe(sim.group(), owner_rng);
    const std::vector<std::string> attrs{"reader"};
    auto [master, names] = pe.keygen_master(attrs);
    const auto params = pe.public_params(master);
    const auto writer = crypto::SigningKey::generate(owner_rng);
    const objects::OwnerKeys owner{master, params, writer};
    const auto policy = policy::parse_policy("reader", names);
    const auto spk = writer.verify_key();

    auto store = [&](const objects::SealedObject& sealed, const crypto::SigningKey& wask, bool fresh) {
        dht::OverlayClient client(sim.random_honest_node(), sim.network());
        const auto rec = objects::to_record(sealed, wask);
        if (fresh)
            client.put_new(rec);
        else
            client.put_update(rec);
    };

    std::vector<TrackedObject> tracked;
    tracked.reserve(options.objects);
    for (std::size_t i = 0; i < options.objects; ++i) {
        Bytes payload(64);
        owner_rng.fill(payload);
        auto created = objects::create_object(pe, objects::BytesContent{payload}, policy, std::nullopt, owner);
        store(created.sealed, created.wask, true);
        tracked.push_back({objects::OpenedObject{created.object, created.key, 0}, created.sealed, created.wask,
                           created.sealed.version});
    }

    std::size_t checkpoint = 0;
    auto check = [&] {
        AvailabilityResult round;
        const auto t0 = sim.loop().now();
        for (const auto& obj : tracked) {
            const auto id = obj.sealed.id;
            ++round.retrievals;
            bool all_bad = true;
            for (const auto& c : sim.network().true_closest(id, config.dht.replicas))
                all_bad = all_bad && sim.is_malicious(c.address);
            round.all_malicious += all_bad;

            dht::OverlayClient client(sim.random_honest_node(), sim.network());
            const auto fetched = client.get_fresh(id);
            std::optional<std::uint64_t> got;
            for (const auto& cand : fetched.candidates) {
                try {
                    const auto opened = objects::open_with_key(objects::from_record(cand), obj.opened.key, spk);
                    got = opened.object.version;
                    break;
                } catch (const Error&) {
                }
            }
            if (got && *got == obj.latest) ++round.successes;
            if (got && *got < obj.latest) ++round.stale;
        }
        const auto spent = sim.loop().now() - t0;
        res.retrievals += round.retrievals;
        res.successes += round.successes;
        res.stale += round.stale;
        res.all_malicious += round.all_malicious;
        res.sim_ms += static_cast<double>(spent) / 1000.0;
        if (rows) {
            char param[32];
            std::snprintf(param, sizeof param, "f=%g", config.malicious);
            TrialRow r;
            r.experiment = "adversary";
            r.trial = checkpoint;
            r.param = param;
            r.value = static_cast<double>(config.dht.replicas);
            r.sim_ms = round.retrievals ? static_cast<double>(spent) / 1000.0 / static_cast<double>(round.retrievals) : 0;
            r.dht_gets = round.retrievals;
            r.failures = round.retrievals - round.successes;
            rows->push_back(r);
        }
        ++checkpoint;
    };

    for (std::size_t round = 1; round <= options.rounds; ++round) {
        sim.maintenance_round();
        for (auto& obj : tracked) {
            if (owner_rng.unit() >= options.update_probability) continue;
            Bytes payload(64);
            owner_rng.fill(payload);
            auto up = objects::update_object(pe, obj.opened, obj.sealed, objects::BytesContent{payload}, owner);
            store(up.sealed, obj.wask, false);
            obj.opened.object = up.object;
            obj.sealed = up.sealed;
            obj.latest = up.sealed.version;
            ++res.updates;
        }
        if (options.republish_every && round % options.republish_every == 0)
            for (const auto& obj : tracked) store(obj.sealed, obj.wask, false);
        if (options.check_every && round % options.check_every == 0 && round != options.rounds) check();
    }
    check();
    res.trace_digest = sim.loop().trace_digest();
    return res;
}

ExperimentRun run_experiment(const SimConfig& config, const ExperimentPlan& plan) {
    ExperimentRun run;
    const auto& name = plan.experiment;
    if (name == "adversary") {
        for (double f : plan.fractions)
            for (auto r : plan.replicas) {
                auto c = config;
                c.malicious = f;
                c.dht.replicas = r;
                run.availability.push_back(run_availability(c, plan.availability, &run.rows));
            }
        crypto_generichash_state st;
        crypto_generichash_init(&st, nullptr, 0, run.trace_digest.size());
        for (const auto& a : run.availability) crypto_generichash_update(&st, a.trace_digest.data(), a.trace_digest.size());
        crypto_generichash_final(&st, run.trace_digest.data(), run.trace_digest.size());
        return run;
    }
    if (name != "wall" && name != "newsfeed" && name != "post" && name != "hops")
        throw Error(Errc::invalid_argument, "unknown experiment '" + name + "'");

    Simulation sim(config);
    sim.build();
    Workloads w(sim);
    auto append = [&](std::vector<TrialRow> rows) {
        run.rows.insert(run.rows.end(), std::make_move_iterator(rows.begin()), std::make_move_iterator(rows.end()));
    };
    if (name == "wall") {
        for (auto mode : {WallMode::own, WallMode::others})
            for (auto comp : {Composition::statuses, Composition::posts, Composition::full})
                append(w.wall(plan.items, mode, comp, plan.trials));
    } else if (name == "newsfeed") {
        append(w.newsfeed(plan.friends, plan.trials));
    } else if (name == "post") {
        append(w.post(plan.posts));
    } else {
        run.hops.push_back(measure_hops(sim, plan.hop_lookups));
    }
    run.trace_digest = sim.loop().trace_digest();
    return run;
}

std::string availability_csv(const std::vector<AvailabilityResult>& results) {
    std::string out = "malicious,replicas,retrievals,successes,stale,success_rate,expected,all_malicious_rate,updates\n";
    for (const auto& r : results) {
        char line[256];
        std::snprintf(line, sizeof line, "%g,%zu,%zu,%zu,%zu,%.6f,%.6f,%.6f,%zu\n", r.malicious, r.replicas,
                      r.retrievals, r.successes, r.stale, r.success_rate(), r.expected(), r.all_malicious_rate(),
                      r.updates);
        out += line;
    }
    return out;
}

}  // namespace decent::sim
