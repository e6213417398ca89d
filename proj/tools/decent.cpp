#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "decent/agent/account_io.hpp"
#include "decent/agent/agent.hpp"
#include "decent/common/error.hpp"
#include "decent/sim/experiments.hpp"

namespace fs = std::filesystem;
using namespace decent;
using json = nlohmann::json;

namespace {

Bytes read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error(Errc::io_error, "cannot read " + p.string());
    return Bytes(std::istreambuf_iterator<char>(in), {});
}

void write_file(const fs::path& p, ByteView data) {
    const auto tmp = p.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
        if (!out) throw Error(Errc::io_error, "cannot write " + tmp);
    }
    fs::rename(tmp, p);
}

std::set<std::string> split_list(const std::string& s) {
    std::set<std::string> out;
    std::stringstream in(s);
    for (std::string item; std::getline(in, item, ',');)
        if (!item.empty()) out.insert(item);
    return out;
}

/// Local deployment: one storage node, every proxy and every account under a home directory.
///   store.bin      records held by the storage node
///   proxies.bin    proxy state of every account
///   accounts/*.json
class Home {
public:
    explicit Home(fs::path dir) : dir_(std::move(dir)) {
        fs::create_directories(dir_ / "accounts");
        if (fs::exists(dir_ / "store.bin")) {
            const auto data = read_file(dir_ / "store.bin");
            Reader in(data);
            dht_.store() = dht::decode_store(in);
            in.expect_done();
        }
        if (fs::exists(dir_ / "proxies.bin")) {
            const auto data = read_file(dir_ / "proxies.bin");
            Reader in(data);
            for (auto n = in.varint(); n > 0; --n) {
                UserId owner{in.str()};
                auto state = crypto::decode_proxy_state(in);
                proxies_.ensure(owner, state.group) = std::move(state);
            }
            in.expect_done();
        }
    }

    void save() {
        Writer store;
        dht::encode(store, dht_.store());
        write_file(dir_ / "store.bin", store.bytes());
        Writer proxies;
        proxies.varint(proxies_.states().size());
        for (const auto& [owner, state] : proxies_.states()) {
            proxies.str(owner.name);
            crypto::encode(proxies, state);
        }
        write_file(dir_ / "proxies.bin", proxies.bytes());
        for (auto& [name, a] : agents_) agent::save_account(account_path(name), a->account());
    }

    fs::path account_path(const std::string& name) const { return dir_ / "accounts" / (name + ".json"); }

    agent::Agent& join(const std::string& name, const agent::JoinOptions& options) {
        if (fs::exists(account_path(name))) throw Error(Errc::invalid_argument, "account " + name + " exists");
        const auto& group = crypto::group(crypto::GroupKind::ristretto255);
        proxies_.ensure(UserId{name}, group.kind());
        auto a = agent::Agent::join(UserId{name}, options, group, dht_, proxies_, rng_);
        return *agents_.emplace(name, std::make_unique<agent::Agent>(std::move(a))).first->second;
    }

    agent::Agent& user(const std::string& name) {
        if (auto it = agents_.find(name); it != agents_.end()) return *it->second;
        if (!fs::exists(account_path(name))) throw Error(Errc::not_found, "no account " + name + " in this home");
        auto account = agent::load_account(account_path(name));
        const auto& group = crypto::group(account.master.group);
        auto a = std::make_unique<agent::Agent>(std::move(account), group, dht_, proxies_, rng_);
        return *agents_.emplace(name, std::move(a)).first->second;
    }

private:
    fs::path dir_;
    dht::LocalDht dht_;
    agent::LocalProxyDirectory proxies_;
    SystemRng rng_;
    std::map<std::string, std::unique_ptr<agent::Agent>> agents_;
};

void print_item(const agent::ItemView& item, const std::string& indent) {
    std::cout << indent << item.id.hex().substr(0, 12) << "  ";
    if (item.ok())
        std::cout << item.status->author << ": " << item.status->text << "\n";
    else
        std::cout << "(unreadable: " << item.reason << ")\n";
    for (const auto& c : item.comments) print_item(c, indent + "    ");
}

const agent::ItemView* find_item(const agent::WallView& wall, const std::string& prefix) {
    const agent::ItemView* hit = nullptr;
    auto consider = [&](const agent::ItemView& v) {
        if (v.id.hex().starts_with(prefix)) {
            if (hit) throw Error(Errc::invalid_argument, "object id prefix '" + prefix + "' is ambiguous");
            hit = &v;
        }
    };
    for (const auto& s : wall.statuses) consider(s);
    for (const auto& p : wall.posts) consider(p);
    return hit;
}

sim::SimConfig load_config(const std::string& path) {
    sim::SimConfig c;
    if (path.empty()) return c;
    std::ifstream in(path);
    if (!in) throw Error(Errc::io_error, "cannot read " + path);
    const auto j = json::parse(in);
    c.nodes = j.value("nodes", c.nodes);
    c.malicious = j.value("malicious", c.malicious);
    c.churn = j.value("churn", c.churn);
    c.seed = j.value("seed", c.seed);
    c.timeout_ms = j.value("timeout_ms", c.timeout_ms);
    c.latency.base_ms = j.value("latency_base_ms", c.latency.base_ms);
    c.latency.per_unit_ms = j.value("latency_per_unit_ms", c.latency.per_unit_ms);
    c.dht.k = j.value("k", c.dht.k);
    c.dht.alpha = j.value("alpha", c.dht.alpha);
    c.dht.replicas = j.value("replicas", c.dht.replicas);
    c.proxy_shares = j.value("proxy_shares", c.proxy_shares);
    c.proxy_threshold = j.value("proxy_threshold", c.proxy_threshold);
    if (j.contains("behaviors")) {
        c.behaviors.clear();
        for (const auto& b : j.at("behaviors")) c.behaviors.push_back(sim::behavior_from_string(b.get<std::string>()));
    }
    if (j.contains("costs")) {
        const auto& k = j.at("costs");
        c.costs.policy_encrypt_ms = k.value("policy_encrypt_ms", c.costs.policy_encrypt_ms);
        c.costs.policy_decrypt_ms = k.value("policy_decrypt_ms", c.costs.policy_decrypt_ms);
        c.costs.object_open_ms = k.value("object_open_ms", c.costs.object_open_ms);
        c.costs.object_seal_ms = k.value("object_seal_ms", c.costs.object_seal_ms);
    }
    if (j.contains("group")) {
        const auto g = j.at("group").get<std::string>();
        if (g == "ristretto255") c.group = crypto::GroupKind::ristretto255;
        else if (g == "schnorr62") c.group = crypto::GroupKind::schnorr62;
        else throw Error(Errc::invalid_argument, "unknown group '" + g + "'");
    }
    return c;
}

std::string hex32(const std::array<std::uint8_t, 32>& d) { return to_hex(ByteView(d.data(), d.size())); }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Privacy-preserving social networking over a DHT"};
    app.require_subcommand(1);
    std::string home_dir = std::getenv("DECENT_HOME") ? std::getenv("DECENT_HOME") : "decent-home";
    app.add_option("--home", home_dir, "State directory (default $DECENT_HOME or ./decent-home)");

    std::string user, peer, text, policy, append_policy, attrs = "friend,family,coworker,acquaintance", target;

    auto* join = app.add_subcommand("join", "Create an account: profile, wall and root objects");
    join->add_option("--user", user, "Account name")->required();
    join->add_option("--attributes", attrs, "Comma-separated attributes this user issues");
    join->add_option("--profile-policy", policy, "Read policy of root, profile and wall");
    join->add_option("--wall-append-policy", append_policy, "Who may post on the wall");

    auto* add_contact = app.add_subcommand("add-contact", "Grant attributes to a peer and hand over the root reference");
    add_contact->add_option("--user", user, "Granting account")->required();
    add_contact->add_option("--peer", peer, "Receiving account")->required();
    add_contact->add_option("--grant", attrs, "Comma-separated attributes (may be empty)")->required();

    auto* post = app.add_subcommand("post", "Post a status on your own wall");
    post->add_option("--user", user)->required();
    post->add_option("--text", text)->required();
    post->add_option("--policy", policy, "Read policy, e.g. \"friend OR family\"")->required();
    post->add_option("--append-policy", append_policy, "Who may comment; default nobody");
    post->add_option("--on-wall", target, "Post on this contact's wall instead");

    auto* comment = app.add_subcommand("comment", "Comment on an item of a wall");
    std::string item_prefix;
    comment->add_option("--user", user)->required();
    comment->add_option("--wall", target, "Wall owner (default: own wall)");
    comment->add_option("--item", item_prefix, "Object id or unique prefix, as shown by view-wall")->required();
    comment->add_option("--text", text)->required();
    comment->add_option("--policy", policy, "Read policy of the comment")->required();

    auto* view = app.add_subcommand("view-wall", "Show a wall");
    view->add_option("owner", target, "Wall owner (default: own wall)");
    view->add_option("--user", user)->required();

    auto* feed = app.add_subcommand("newsfeed", "Latest status of every contact");
    feed->add_option("--user", user)->required();

    auto* revoke = app.add_subcommand("revoke", "Revoke attributes from a contact");
    revoke->add_option("--user", user)->required();
    revoke->add_option("--peer", peer)->required();
    revoke->add_option("--attributes", attrs)->required();

    auto* simulate = app.add_subcommand("simulate", "Run a simulated experiment and write CSV results");
    sim::ExperimentPlan plan;
    std::string config_path, out_dir;
    std::size_t nodes = 0, replicas = 0, items = 0, friends = 0, rounds = 0, objects = 0, trials = 0;
    double malicious = -1;
    std::uint64_t seed = 0;
    simulate->add_option("--config", config_path, "JSON file overriding simulation defaults");
    simulate->add_option("--nodes", nodes, "Overlay size");
    simulate->add_option("--malicious", malicious, "Malicious node fraction");
    simulate->add_option("--replicas", replicas, "Replication factor R");
    simulate->add_option("--seed", seed, "Random seed");
    simulate->add_option("--experiment", plan.experiment)
        ->check(CLI::IsMember({"wall", "newsfeed", "post", "adversary", "hops"}))
        ->required();
    simulate->add_option("--items", items, "Wall size x (default sweeps 5,10,20,40)");
    simulate->add_option("--friends", friends, "Friend count F (default sweeps 1,11,20,40)");
    simulate->add_option("--trials", trials, "Trials per point (default 20)");
    simulate->add_option("--rounds", rounds, "Churn and maintenance rounds for adversary runs");
    simulate->add_option("--objects", objects, "Objects for adversary runs");
    simulate->add_option("--out", out_dir, "Output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) {
            auto config = load_config(config_path);
            if (nodes) config.nodes = nodes;
            if (malicious >= 0) config.malicious = malicious;
            if (replicas) config.dht.replicas = replicas;
            if (*simulate->get_option("--seed")) config.seed = seed;
            if (items) plan.items = {items};
            if (friends) plan.friends = {friends};
            if (trials) plan.trials = trials;
            if (rounds) plan.availability.rounds = rounds;
            if (objects) plan.availability.objects = objects;
            if (plan.experiment == "adversary" && (malicious >= 0 || replicas)) {
                plan.fractions = {config.malicious};
                plan.replicas = {config.dht.replicas};
            }
            for (const auto& w : sim::validate(config)) std::cerr << "warning: " << w << "\n";
            const auto run = sim::run_experiment(config, plan);
            sim::emit_results(run.rows, out_dir);
            if (!run.availability.empty()) {
                std::ofstream(fs::path(out_dir) / "availability.csv") << sim::availability_csv(run.availability);
                for (const auto& a : run.availability)
                    std::cout << "f=" << a.malicious << " R=" << a.replicas << " success=" << a.success_rate()
                              << " expected>=" << a.expected() << " stale=" << a.stale << "\n";
            }
            for (const auto& h : run.hops)
                std::cout << "lookups=" << h.lookups << " mean_hops=" << h.mean_rounds << " max_hops=" << h.max_rounds
                          << " exact=" << h.exact << "\n";
            std::cout << "rows=" << run.rows.size() << " trace=" << hex32(run.trace_digest) << "\n";
            return 0;
        }

        Home home(home_dir);
        if (join->parsed()) {
            agent::JoinOptions opts;
            const auto list = split_list(attrs);
            opts.attributes.assign(list.begin(), list.end());
            opts.profile_policy = policy;
            opts.wall_append_policy = append_policy;
            auto& a = home.join(user, opts);
            std::cout << "joined " << user << " root " << a.account().root_ref.id.hex() << "\n";
        } else if (add_contact->parsed()) {
            auto& from = home.user(user);
            auto& to = home.user(peer);
            to.accept(from.introduce(UserId{peer}, split_list(attrs)));
            std::cout << user << " -> " << peer << ": " << (attrs.empty() ? "(no attributes)" : attrs) << "\n";
        } else if (post->parsed()) {
            auto& a = home.user(user);
            const auto ref = target.empty() ? a.post_status(text, policy, append_policy)
                                            : a.post_to_wall(target, text, policy);
            std::cout << ref.id.hex() << "\n";
        } else if (comment->parsed()) {
            auto& a = home.user(user);
            const auto wall = a.view_wall(target);
            const auto* item = find_item(wall, item_prefix);
            if (!item) throw Error(Errc::not_found, "no item " + item_prefix + " on that wall");
            std::cout << a.comment(item->ref, text, policy).id.hex() << "\n";
        } else if (view->parsed()) {
            const auto wall = home.user(user).view_wall(target);
            std::cout << "wall of " << wall.owner.name << "\nstatuses:\n";
            for (const auto& s : wall.statuses) print_item(s, "  ");
            std::cout << "posts:\n";
            for (const auto& p : wall.posts) print_item(p, "  ");
        } else if (feed->parsed()) {
            for (const auto& f : home.user(user).view_newsfeed()) {
                std::cout << f.contact.name << ": ";
                if (f.latest && f.latest->ok())
                    std::cout << f.latest->status->text << "\n";
                else
                    std::cout << "(" << f.reason << ")\n";
            }
        } else if (revoke->parsed()) {
            home.user(user).revoke_contact(peer, split_list(attrs));
            std::cout << "revoked " << attrs << " from " << peer << "\n";
        }
        home.save();
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
