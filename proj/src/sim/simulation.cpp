#include "decent/sim/simulation.hpp"

#include <algorithm>
#include <cmath>

#include "decent/common/error.hpp"

namespace decent::sim {

namespace {

Micros ms(double v) { return static_cast<Micros>(std::llround(v * 1000.0)); }

}  // namespace

Micros CryptoCosts::charge(const agent::OpCounters& ops) const {
    return ms(policy_encrypt_ms * static_cast<double>(ops.policy_encrypts) +
              policy_decrypt_ms * static_cast<double>(ops.policy_decrypts) +
              object_open_ms * static_cast<double>(ops.object_opens) +
              object_seal_ms * static_cast<double>(ops.object_seals));
}

std::vector<std::string> validate(const SimConfig& c) {
    std::vector<std::string> warnings;
    if (c.nodes == 0) throw Error(Errc::invalid_argument, "network needs at least one node");
    if (c.malicious < 0 || c.malicious > 1) throw Error(Errc::invalid_argument, "malicious fraction must be in [0, 1]");
    if (c.malicious > 0.25) warnings.push_back("malicious fraction above 0.25 is outside the threat model");
    if (c.churn < 0 || c.churn > 1) throw Error(Errc::invalid_argument, "churn must be in [0, 1]");
    if (c.dht.replicas == 0 || c.dht.k == 0 || c.dht.alpha == 0)
        throw Error(Errc::invalid_argument, "k, alpha and replicas must be positive");
    if (c.dht.replicas > c.dht.k) throw Error(Errc::invalid_argument, "replicas cannot exceed k");
    if (c.proxy_threshold == 0 || c.proxy_threshold > c.proxy_shares)
        throw Error(Errc::invalid_argument, "proxy threshold must be in [1, shares]");
    if (c.malicious > 0 && c.behaviors.empty()) throw Error(Errc::invalid_argument, "no adversary behaviors given");
    return warnings;
}

/// One user's proxy as seen by clients: a round trip to the proxy node (or to t share nodes in
/// parallel) from wherever the acting user sits.
class Simulation::RemoteProxy final : public crypto::ProxyHandle {
public:
    RemoteProxy(Simulation& sim, const crypto::ProxyState& state, std::vector<crypto::ProxyShareState>& shares,
                std::vector<Point> where)
        : sim_(sim), state_(state), shares_(shares), where_(std::move(where)) {}

    std::optional<crypto::Element> transform(const UserId& holder, const crypto::AttributeId& attr,
                                             const crypto::Element& partial) override {
        CategoryScope scope(sim_.loop_, Category::proxy);
        const Point from = sim_.acting_ ? sim_.acting_->where : Point{};
        if (shares_.empty()) {
            std::optional<crypto::Element> result;
            auto ok = sim_.network_.rpc(from, {Call{where_[0], 0x100, [&] {
                                                         if (state_.contains(holder, attr))
                                                             result = crypto::proxy_transform(state_, holder, attr, partial);
                                                         return true;
                                                     }}});
            return ok[0] ? result : std::nullopt;
        }
        const auto t = sim_.config_.proxy_threshold;
        std::vector<std::uint32_t> participants;
        for (std::uint32_t i = 0; i < t; ++i) participants.push_back(shares_[i].index);
        std::vector<std::optional<crypto::Element>> parts(t);
        std::vector<Call> calls;
        for (std::uint32_t i = 0; i < t; ++i) {
            calls.push_back({where_[i], 0x200u + i, [&, i] {
                                 const auto& share = shares_[i];
                                 if (share.shares.contains({holder, attr}))
                                     parts[i] = crypto::proxy_transform_share(share, holder, attr, partial, participants);
                                 return true;
                             }});
        }
        auto ok = sim_.network_.rpc(from, std::move(calls));
        const auto& g = crypto::group(state_.group);
        auto acc = g.identity();
        for (std::uint32_t i = 0; i < t; ++i) {
            if (!ok[i] || !parts[i]) return std::nullopt;
            acc = g.combine(acc, *parts[i]);
        }
        return acc;
    }

private:
    Simulation& sim_;
    const crypto::ProxyState& state_;
    std::vector<crypto::ProxyShareState>& shares_;
    std::vector<Point> where_;
};

class Simulation::Proxies final : public agent::ProxyDirectory {
public:
    explicit Proxies(Simulation& sim) : sim_(sim) {}

    crypto::ProxyHandle& handle(const UserId& owner) override { return *entry(owner).handle; }
    crypto::ProxyState& state(const UserId& owner) override { return entry(owner).state; }

    void updated(const UserId& owner) override {
        auto& e = entry(owner);
        if (sim_.config_.proxy_shares > 1)
            e.shares = crypto::split_proxy(e.state, sim_.config_.proxy_shares, sim_.config_.proxy_threshold,
                                           sim_.crypto_rng_);
    }

    /// Places a new proxy (or its share nodes) at random points.
    void create(const UserId& owner) {
        auto e = std::make_unique<Entry>();
        e->state.group = sim_.config_.group;
        std::vector<Point> where;
        for (std::uint32_t i = 0; i < sim_.config_.proxy_shares; ++i) where.push_back(random_point(sim_.rng_));
        e->handle = std::make_unique<RemoteProxy>(sim_, e->state, e->shares, std::move(where));
        entries_.emplace(owner, std::move(e));
    }

private:
    struct Entry {
        crypto::ProxyState state;
        std::vector<crypto::ProxyShareState> shares;
        std::unique_ptr<RemoteProxy> handle;
    };

    Entry& entry(const UserId& owner) {
        auto it = entries_.find(owner);
        if (it == entries_.end()) throw Error(Errc::unavailable, "no proxy for " + owner.name);
        return *it->second;
    }

    Simulation& sim_;
    std::map<UserId, std::unique_ptr<Entry>> entries_;
};

Simulation::Simulation(SimConfig config)
    : config_(std::move(config)),
      rng_(config_.seed),
      crypto_rng_(rng_.fork(0xc0)),
      group_(&crypto::group(config_.group)),
      network_(loop_, config_.latency, ms(config_.timeout_ms)),
      proxies_(std::make_unique<Proxies>(*this)) {
    validate(config_);
}

Simulation::~Simulation() = default;

dht::DhtNode& Simulation::add_node(Behavior behavior, bool pinned) {
    dht::Contact c{rng_.random<NodeId>(), next_address_++};
    std::unique_ptr<dht::DhtNode> node;
    if (behavior == Behavior::honest)
        node = std::make_unique<dht::DhtNode>(c, config_.dht);
    else
        node = std::make_unique<AdversarialNode>(c, config_.dht, behavior, rng_.next_u64());
    auto& ref = *node;
    std::optional<dht::Contact> bootstrap;
    if (network_.size() > 0) {
        auto all = network_.nodes();
        bootstrap = all[rng_.uniform(all.size())]->contact();
    }
    network_.attach(std::move(node), random_point(rng_));
    if (behavior != Behavior::honest) malicious_.insert(c.address);
    if (pinned) pinned_.insert(c.address);
    if (bootstrap) dht::join(ref, network_, *bootstrap);
    return ref;
}

void Simulation::build() {
    const auto n = config_.nodes;
    const auto bad = static_cast<std::size_t>(std::llround(config_.malicious * static_cast<double>(n)));
    std::vector<Behavior> roles(n, Behavior::honest);
    for (std::size_t i = 0; i < bad; ++i) roles[i] = config_.behaviors[i % config_.behaviors.size()];
    // Fisher-Yates with the simulation's stream.
    for (std::size_t i = n; i > 1; --i) std::swap(roles[i - 1], roles[rng_.uniform(i)]);
    for (auto role : roles) add_node(role);
}

dht::DhtNode& Simulation::random_honest_node() {
    auto all = network_.nodes();
    std::vector<dht::DhtNode*> honest;
    for (auto* n : all)
        if (n->honest()) honest.push_back(n);
    if (honest.empty()) throw Error(Errc::unavailable, "no honest node online");
    return *honest[rng_.uniform(honest.size())];
}

std::size_t Simulation::malicious_count() const {
    std::size_t n = 0;
    for (auto a : malicious_) n += network_.online(a);
    return n;
}

Simulation::User& Simulation::add_user(const std::string& name, const agent::JoinOptions& options) {
    if (users_.contains(name)) throw Error(Errc::invalid_argument, "user " + name + " exists");
    auto u = std::make_unique<User>();
    u->name = name;
    u->home = &random_honest_node();
    pinned_.insert(u->home->contact().address);
    u->where = network_.position(u->home->contact().address);
    u->client = std::make_unique<dht::OverlayClient>(*u->home, network_);
    proxies_->create(UserId{name});
    acting_ = u.get();
    auto joined = agent::Agent::join(UserId{name}, options, *group_, *u->client, *proxies_, crypto_rng_);
    loop_.advance(config_.costs.charge(joined.counters()), Category::crypto);
    u->agent = std::make_unique<agent::Agent>(std::move(joined));
    acting_ = nullptr;
    return *users_.emplace(name, std::move(u)).first->second;
}

Simulation::User& Simulation::user(const std::string& name) {
    auto it = users_.find(name);
    if (it == users_.end()) throw Error(Errc::not_found, "no user " + name);
    return *it->second;
}

std::vector<Simulation::User*> Simulation::users() {
    std::vector<User*> out;
    for (auto& [name, u] : users_) out.push_back(u.get());
    return out;
}

Measurement Simulation::run(User& u, const std::function<void(agent::Agent&)>& op) {
    Measurement m;
    const auto before = u.agent->counters();
    const auto spent_before = loop_.spent();
    const auto t0 = loop_.now();
    const auto w0 = std::chrono::steady_clock::now();
    acting_ = &u;
    try {
        op(*u.agent);
    } catch (...) {
        acting_ = nullptr;
        loop_.advance(config_.costs.charge(u.agent->counters() - before), Category::crypto);
        throw;
    }
    acting_ = nullptr;
    m.ops = u.agent->counters() - before;
    loop_.advance(config_.costs.charge(m.ops), Category::crypto);
    m.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - w0).count();
    m.sim_us = loop_.now() - t0;
    for (std::size_t i = 0; i < m.by_category.size(); ++i) m.by_category[i] = loop_.spent()[i] - spent_before[i];
    return m;
}

RoundSummary Simulation::maintenance_round() {
    RoundSummary s;
    if (config_.churn > 0) {
        std::vector<dht::DhtNode*> candidates;
        for (auto* n : network_.nodes())
            if (!pinned_.contains(n->contact().address)) candidates.push_back(n);
        const auto leave = static_cast<std::size_t>(std::llround(config_.churn * static_cast<double>(candidates.size())));
        std::vector<Behavior> roles;
        for (std::size_t i = 0; i < leave && !candidates.empty(); ++i) {
            const auto pick = rng_.uniform(candidates.size());
            auto* n = candidates[pick];
            auto* adv = dynamic_cast<AdversarialNode*>(n);
            roles.push_back(adv ? adv->behavior() : Behavior::honest);
            malicious_.erase(n->contact().address);
            network_.detach(n->contact().address);
            candidates.erase(candidates.begin() + static_cast<std::ptrdiff_t>(pick));
            ++s.departed;
        }
        for (auto role : roles) {
            add_node(role);
            ++s.joined;
        }
    }
    std::vector<dht::Address> addresses;
    for (auto* n : network_.nodes()) addresses.push_back(n->contact().address);
    for (auto a : addresses) {
        auto* n = network_.node(a);
        if (!n) continue;
        auto st = dht::replica_maintenance(*n, network_);
        s.maintenance.lookups += st.lookups;
        s.maintenance.pushes += st.pushes;
        s.maintenance.dropped += st.dropped;
    }
    return s;
}

}  // namespace decent::sim
