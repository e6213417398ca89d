#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "decent/agent/agent.hpp"
#include "decent/sim/network.hpp"

namespace decent::sim {

/// Modeled compute cost per operation. Charged as simulated time so runs stay deterministic.
struct CryptoCosts {
    double policy_encrypt_ms = 3.0;
    double policy_decrypt_ms = 5.0;
    double object_open_ms = 0.2;
    double object_seal_ms = 0.3;

    Micros charge(const agent::OpCounters& ops) const;
};

struct SimConfig {
    std::size_t nodes = 1000;
    LatencyModel latency;
    double timeout_ms = 1000;
    /// Fraction of malicious storage nodes; the threat model bounds it at 0.25.
    double malicious = 0;
    std::vector<Behavior> behaviors{Behavior::drop, Behavior::stale_replay, Behavior::refuse_append,
                                    Behavior::garbage};
    /// Fraction of nodes replaced per maintenance round.
    double churn = 0;
    dht::DhtParams dht;
    /// Threshold proxy layout; 1 of 1 means a single proxy node per user.
    std::uint32_t proxy_shares = 1;
    std::uint32_t proxy_threshold = 1;
    CryptoCosts costs;
    crypto::GroupKind group = crypto::GroupKind::ristretto255;
    std::uint64_t seed = 1;
};

/// Throws Error(invalid_argument) for impossible settings; returns warnings for ones outside the
/// threat model.
std::vector<std::string> validate(const SimConfig& config);

struct Measurement {
    Micros sim_us = 0;
    double wall_ms = 0;
    agent::OpCounters ops;
    std::array<Micros, static_cast<std::size_t>(Category::count)> by_category{};
};

struct RoundSummary {
    std::size_t departed = 0;
    std::size_t joined = 0;
    dht::MaintenanceStats maintenance;
};

/// A simulated overlay with users, their agents and their proxies.
class Simulation {
public:
    struct User {
        std::string name;
        dht::DhtNode* home = nullptr;
        Point where;
        std::unique_ptr<dht::OverlayClient> client;
        std::unique_ptr<agent::Agent> agent;
    };

    explicit Simulation(SimConfig config);
    ~Simulation();
    Simulation(const Simulation&) = delete;
    Simulation& operator=(const Simulation&) = delete;

    /// Joins `config.nodes` nodes one by one, assigning malicious roles from the seed.
    void build();

    const SimConfig& config() const { return config_; }
    EventLoop& loop() { return loop_; }
    Network& network() { return network_; }
    DeterministicRng& rng() { return rng_; }
    const crypto::Group& group() const { return *group_; }

    dht::DhtNode& add_node(Behavior behavior, bool pinned = false);
    dht::DhtNode& random_honest_node();
    std::size_t malicious_count() const;
    bool is_malicious(dht::Address a) const { return malicious_.contains(a); }

    /// Joins a user whose agent runs at a random honest node; that node is pinned.
    User& add_user(const std::string& name, const agent::JoinOptions& options = {});
    User& user(const std::string& name);
    std::vector<User*> users();

    /// Runs `op` as `u`, charges modeled crypto time and reports the simulated cost.
    Measurement run(User& u, const std::function<void(agent::Agent&)>& op);

    /// Churn followed by one maintenance pass at every online node. Pinned nodes never leave.
    RoundSummary maintenance_round();

private:
    class Proxies;
    class RemoteProxy;

    SimConfig config_;
    DeterministicRng rng_;
    DeterministicRng crypto_rng_;
    const crypto::Group* group_;
    EventLoop loop_;
    Network network_;
    dht::Address next_address_ = 1;
    std::set<dht::Address> malicious_;
    std::set<dht::Address> pinned_;
    std::unique_ptr<Proxies> proxies_;
    std::map<std::string, std::unique_ptr<User>> users_;
    const User* acting_ = nullptr;
};

}  // namespace decent::sim
